#include "lpm/embedding.h"

#include <set>
#include <stdexcept>

#include "lpm/syntax.h"

namespace lpm {

const ConstInfo* GeneratedEmbedding::role_of(const TermPtr& t) const {
  if (t->kind != TermKind::Const) return nullptr;
  auto it = roles.find(t->name);
  return it == roles.end() ? nullptr : &it->second;
}

Result<GeneratedEmbedding> generate_embedding(const PtsSpec& spec,
                                              const std::string& default_sort) {
  auto v = validate_spec(spec);
  if (!v.ok()) {
    std::string msg = "specification rejected:";
    for (const auto& s : v.violations) msg += "\n  " + s;
    return Diag(DiagCode::SpecInvalid, msg);
  }

  GeneratedEmbedding emb;
  emb.config.spec = spec;
  if (default_sort.empty()) {
    emb.config.default_sort = spec.has_sort("Type") ? "Type" : spec.sorts.front();
  } else {
    if (!spec.has_sort(default_sort))
      return Diag(DiagCode::UnknownSortName,
                  "default sort '" + default_sort + "' is not declared");
    emb.config.default_sort = default_sort;
  }
  const EmbeddingConfig& cfg = emb.config;

  // name-collision guard (sort names containing underscores could fuse)
  {
    std::set<std::string> names;
    size_t expect = 0;
    for (const auto& s : spec.sorts) {
      names.insert(cfg.u_name(s));
      names.insert(cfg.eps_name(s));
      expect += 2;
    }
    for (const auto& [s1, s2] : spec.axioms) {
      (void)s2;
      names.insert(cfg.dot_name(s1));
      expect += 1;
    }
    for (const auto& r : spec.rules) {
      names.insert(cfg.dotpi_name(r));
      expect += 1;
    }
    if (names.size() != expect)
      return Diag(DiagCode::SpecInvalid,
                  "generated constant names collide; rename the sorts");
  }

  // declarations: universes, decoders, sort codes, product codes
  for (const auto& s : spec.sorts) {
    emb.signature.push(cfg.u_name(s), mk_lpm_type());
    emb.roles[cfg.u_name(s)] = {ConstRole::U, {s, "", ""}};
  }
  for (const auto& s : spec.sorts) {
    emb.signature.push(cfg.eps_name(s),
                       mk_pi(mk_const(cfg.u_name(s)), mk_lpm_type()));
    emb.roles[cfg.eps_name(s)] = {ConstRole::Eps, {s, "", ""}};
  }
  for (const auto& [s1, s2] : spec.axioms) {
    emb.signature.push(cfg.dot_name(s1), mk_const(cfg.u_name(s2)));
    emb.roles[cfg.dot_name(s1)] = {ConstRole::Dot, {s1, "", ""}};
  }
  for (const auto& r : spec.rules) {
    // !X:U_s1. ((eps_s1 X) -> U_s2) -> U_s3
    TermPtr inner = mk_pi(mk_app(mk_const(cfg.eps_name(r[0])), mk_var(0)),
                          mk_const(cfg.u_name(r[1])), "x");
    TermPtr ty = mk_pi(mk_const(cfg.u_name(r[0])),
                       mk_pi(inner, mk_const(cfg.u_name(r[2]))), "X");
    emb.signature.push(cfg.dotpi_name(r), ty);
    emb.roles[cfg.dotpi_name(r)] = {ConstRole::DotPi, r};
  }

  // rewrite rules: decoded sort codes unfold to universes, decoded product
  // codes unfold to products
  std::vector<RewriteRule> rules;
  for (const auto& [s1, s2] : spec.axioms) {
    RewriteRule r;
    r.lhs = mk_app(mk_const(cfg.eps_name(s2)), mk_const(cfg.dot_name(s1)));
    r.rhs = mk_const(cfg.u_name(s1));
    r.type = mk_lpm_type();
    rules.push_back(std::move(r));
  }
  for (const auto& pr : spec.rules) {
    RewriteRule r;
    r.pattern_ctx.push_back({"X", mk_const(cfg.u_name(pr[0]))});
    r.pattern_ctx.push_back(
        {"Y", mk_pi(mk_app(mk_const(cfg.eps_name(pr[0])), mk_var(0)),
                    mk_const(cfg.u_name(pr[1])), "x")});
    r.lhs = mk_app(mk_const(cfg.eps_name(pr[2])),
                   mk_app(mk_app(mk_const(cfg.dotpi_name(pr)), mk_var(1)), mk_var(0)));
    r.rhs = mk_pi(mk_app(mk_const(cfg.eps_name(pr[0])), mk_var(1)),
                  mk_app(mk_const(cfg.eps_name(pr[1])),
                         mk_app(mk_var(1), mk_var(0))),
                  "x");
    r.type = mk_lpm_type();
    rules.push_back(std::move(r));
  }
  emb.rewrites = RewriteSystem(std::move(rules));
  return emb;
}

UniverseTable universe_table(const GeneratedEmbedding& emb) {
  UniverseTable tab;
  const EmbeddingConfig& cfg = emb.config;
  for (const auto& [s1, s2] : cfg.spec.axioms)
    tab.axioms[UniverseTable::key(cfg.eps_name(s2), cfg.dot_name(s1))] = {
        cfg.u_name(s1)};
  for (const auto& r : cfg.spec.rules)
    tab.rules[UniverseTable::key(cfg.eps_name(r[2]), cfg.dotpi_name(r))] = {
        cfg.eps_name(r[0]), cfg.eps_name(r[1])};
  return tab;
}

namespace {

struct Translator {
  const GeneratedEmbedding& emb;
  Fuel& fuel;

  Result<std::string> sort_from(const Context& ctx, const TermPtr& type) {
    auto n = pts_normalize(type, fuel);
    if (!n) return n.error();
    const TermPtr& s = n.value();
    if (s->kind == TermKind::Sort && s->sort.kind == SortKind::PtsSort)
      return s->sort.name;
    return Diag(DiagCode::PreconditionViolated,
                "expected a sort, found " + print_term_in(s, ctx));
  }

  // Returns the translated term together with the (untranslated) type of
  // the subject, so product and abstraction nodes can pick their codes.
  Result<std::pair<TermPtr, TermPtr>> tr(const Context& ctx, const TermPtr& t) {
    const EmbeddingConfig& cfg = emb.config;
    switch (t->kind) {
      case TermKind::Var: {
        int m = static_cast<int>(ctx.size());
        if (t->index >= m)
          return Diag(DiagCode::PreconditionViolated, "unbound variable");
        return std::make_pair(t, lift(ctx[m - 1 - t->index].type, t->index + 1));
      }
      case TermKind::Sort: {
        if (t->sort.kind != SortKind::PtsSort)
          return Diag(DiagCode::PreconditionViolated,
                      "lambda-Pi sort in a source term");
        auto s2 = cfg.spec.axiom_sort(t->sort.name);
        if (!s2)
          return Diag(DiagCode::TopSortUntranslatable,
                      "top sort '" + t->sort.name +
                          "' has no term translation (only a type translation)");
        return std::make_pair(TermPtr(mk_const(cfg.dot_name(t->sort.name))),
                              TermPtr(mk_pts_sort(*s2)));
      }
      case TermKind::Const:
        return Diag(DiagCode::PreconditionViolated,
                    "constant '" + t->name + "' in a source term");
      case TermKind::Pi: {
        auto a = tr(ctx, t->a);
        if (!a) return a.error();
        auto s1 = sort_from(ctx, a.value().second);
        if (!s1) return s1.error();
        Context inner = ctx;
        inner.push_back({t->name, t->a});
        auto b = tr(inner, t->b);
        if (!b) return b.error();
        auto s2 = sort_from(inner, b.value().second);
        if (!s2) return s2.error();
        auto rule = cfg.spec.rule_for(s1.value(), s2.value());
        if (!rule)
          return Diag(DiagCode::PreconditionViolated,
                      "no product rule (" + s1.value() + ", " + s2.value() + ", _)");
        // dotPi <A> (\x:(eps_s1 <A>). <B>)
        TermPtr ta = a.value().first;
        TermPtr code = mk_app(
            mk_app(mk_const(cfg.dotpi_name(*rule)), ta),
            mk_lam(mk_app(mk_const(cfg.eps_name(s1.value())), ta),
                   b.value().first, t->name));
        return std::make_pair(code, TermPtr(mk_pts_sort((*rule)[2])));
      }
      case TermKind::Lam: {
        auto a = tr(ctx, t->a);
        if (!a) return a.error();
        auto s1 = sort_from(ctx, a.value().second);
        if (!s1) return s1.error();
        Context inner = ctx;
        inner.push_back({t->name, t->a});
        auto b = tr(inner, t->b);
        if (!b) return b.error();
        TermPtr out = mk_lam(
            mk_app(mk_const(cfg.eps_name(s1.value())), a.value().first),
            b.value().first, t->name);
        return std::make_pair(out,
                              TermPtr(mk_pi(t->a, b.value().second, t->name)));
      }
      case TermKind::App: {
        auto f = tr(ctx, t->a);
        if (!f) return f.error();
        auto u = tr(ctx, t->b);
        if (!u) return u.error();
        auto nf = pts_normalize(f.value().second, fuel);
        if (!nf) return nf.error();
        if (nf.value()->kind != TermKind::Pi)
          return Diag(DiagCode::PreconditionViolated,
                      "application of a non-function in a source term");
        return std::make_pair(TermPtr(mk_app(f.value().first, u.value().first)),
                              subst(nf.value()->b, t->b));
      }
    }
    throw std::logic_error("translate: bad kind");
  }
};

}  // namespace

Result<TermPtr> translate_term(const GeneratedEmbedding& emb, const Context& pts_ctx,
                               const TermPtr& t, Fuel& fuel) {
  Translator tr{emb, fuel};
  auto r = tr.tr(pts_ctx, t);
  if (!r) return r.error();
  return r.value().first;
}

Result<TermPtr> translate_term(const GeneratedEmbedding& emb, const Context& pts_ctx,
                               const TermPtr& t, long long fuel) {
  Fuel f(fuel);
  return translate_term(emb, pts_ctx, t, f);
}

Result<TermPtr> translate_type(const GeneratedEmbedding& emb, const Context& pts_ctx,
                               const TermPtr& type, Fuel& fuel) {
  const EmbeddingConfig& cfg = emb.config;
  if (type->kind == TermKind::Sort && type->sort.kind == SortKind::PtsSort &&
      cfg.spec.is_top_sort(type->sort.name)) {
    if (!cfg.spec.has_sort(type->sort.name))
      return Diag(DiagCode::UnknownSortName,
                  "sort '" + type->sort.name + "' is not declared");
    return TermPtr(mk_const(cfg.u_name(type->sort.name)));
  }
  Translator tr{emb, fuel};
  auto r = tr.tr(pts_ctx, type);
  if (!r) return r.error();
  auto s = tr.sort_from(pts_ctx, r.value().second);
  if (!s) return s.error();
  return TermPtr(mk_app(mk_const(cfg.eps_name(s.value())), r.value().first));
}

Result<TermPtr> translate_type(const GeneratedEmbedding& emb, const Context& pts_ctx,
                               const TermPtr& type, long long fuel) {
  Fuel f(fuel);
  return translate_type(emb, pts_ctx, type, f);
}

Result<Context> translate_context(const GeneratedEmbedding& emb, const Context& pts_ctx,
                                  Fuel& fuel) {
  Context out;
  Context prefix;
  for (const auto& e : pts_ctx) {
    auto ty = translate_type(emb, prefix, e.type, fuel);
    if (!ty) return ty.error();
    out.push_back({e.name, ty.value()});
    prefix.push_back(e);
  }
  return out;
}

Result<Context> translate_context(const GeneratedEmbedding& emb, const Context& pts_ctx,
                                  long long fuel) {
  Fuel f(fuel);
  return translate_context(emb, pts_ctx, f);
}

namespace {

// Back-translation images of the code constants. A decoder with no
// argument becomes the identity on its sort; a bare product code becomes
// the two-argument product former.
TermPtr const_image(const EmbeddingConfig& cfg, const ConstInfo& info,
                    const std::string& name) {
  switch (info.role) {
    case ConstRole::U:
    case ConstRole::Dot:
      return mk_pts_sort(info.sorts[0]);
    case ConstRole::Eps:
      return mk_lam(mk_pts_sort(info.sorts[0]), mk_var(0), "x");
    case ConstRole::DotPi: {
      // \X:s1. \Y:(X -> s2). !x:X. Y x
      TermPtr body = mk_pi(mk_var(1), mk_app(mk_var(1), mk_var(0)), "x");
      TermPtr yann = mk_pi(mk_var(0), mk_pts_sort(info.sorts[1]), "x");
      return mk_lam(mk_pts_sort(info.sorts[0]), mk_lam(yann, body, "Y"), "X");
    }
  }
  (void)cfg;
  return mk_const(name);
}

}  // namespace

TermPtr back_translate(const GeneratedEmbedding& emb, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
      return t;
    case TermKind::Sort:
      if (t->sort.kind == SortKind::PtsSort) return t;
      return mk_pts_sort(emb.config.default_sort);
    case TermKind::Const: {
      if (const ConstInfo* info = emb.role_of(t))
        return const_image(emb.config, *info, t->name);
      return t;
    }
    case TermKind::Pi:
      return mk_pi(back_translate(emb, t->a), back_translate(emb, t->b), t->name);
    case TermKind::Lam:
      return mk_lam(back_translate(emb, t->a), back_translate(emb, t->b), t->name);
    case TermKind::App: {
      // (eps_s u)* = u*
      if (const ConstInfo* f = emb.role_of(t->a); f && f->role == ConstRole::Eps)
        return back_translate(emb, t->b);
      // (dotPi A (\x. B))* = !x:A*. B*, and otherwise
      // (dotPi A B)* = !x:A*. B* x. Contracting the abstraction case is
      // what makes the map a right inverse of the translations; the
      // application case keeps it total.
      if (t->a->kind == TermKind::App) {
        if (const ConstInfo* f = emb.role_of(t->a->a); f && f->role == ConstRole::DotPi) {
          TermPtr a = back_translate(emb, t->a->b);
          if (t->b->kind == TermKind::Lam) {
            return mk_pi(a, back_translate(emb, t->b->b), t->b->name);
          }
          TermPtr b = back_translate(emb, t->b);
          return mk_pi(a, mk_app(lift(b, 1), mk_var(0)), "x");
        }
      }
      return mk_app(back_translate(emb, t->a), back_translate(emb, t->b));
    }
  }
  return t;
}

namespace {

bool wel(const GeneratedEmbedding& emb, const TermPtr& t, int argc) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
      return true;
    case TermKind::Const: {
      const ConstInfo* info = emb.role_of(t);
      if (info && info->role == ConstRole::DotPi) return argc >= 2;
      return true;
    }
    case TermKind::Pi:
    case TermKind::Lam:
      return wel(emb, t->a, 0) && wel(emb, t->b, 0);
    case TermKind::App:
      return wel(emb, t->a, argc + 1) && wel(emb, t->b, 0);
  }
  return true;
}

}  // namespace

bool is_weak_eta_long(const GeneratedEmbedding& emb, const TermPtr& t) {
  return wel(emb, t, 0);
}

TermPtr weak_eta_expand(const GeneratedEmbedding& emb, const TermPtr& t) {
  const EmbeddingConfig& cfg = emb.config;
  TermPtr head;
  std::vector<TermPtr> args;
  spine_decompose(t, head, args);
  for (auto& a : args) a = weak_eta_expand(emb, a);

  if (const ConstInfo* info = emb.role_of(head); info && info->role == ConstRole::DotPi &&
                                                 args.size() < 2) {
    const auto& r = info->sorts;
    TermPtr u1 = mk_const(cfg.u_name(r[0]));
    TermPtr u2 = mk_const(cfg.u_name(r[1]));
    TermPtr eps1 = mk_const(cfg.eps_name(r[0]));
    if (args.empty()) {
      // \X:U_s1. \Y:((eps_s1 X) -> U_s2). dotPi X Y
      TermPtr yann = mk_pi(mk_app(eps1, mk_var(0)), u2, "x");
      TermPtr body = mk_app(mk_app(head, mk_var(1)), mk_var(0));
      return mk_lam(u1, mk_lam(yann, body, "Y"), "X");
    }
    // \Y:((eps_s1 A) -> U_s2). dotPi A Y
    TermPtr a0 = args[0];
    TermPtr yann = mk_pi(mk_app(eps1, a0), u2, "x");
    TermPtr body = mk_app(mk_app(head, lift(a0, 1)), mk_var(0));
    return mk_lam(yann, body, "Y");
  }

  if (head->kind == TermKind::Pi || head->kind == TermKind::Lam) {
    head = head->kind == TermKind::Pi
               ? mk_pi(weak_eta_expand(emb, head->a), weak_eta_expand(emb, head->b),
                       head->name)
               : mk_lam(weak_eta_expand(emb, head->a), weak_eta_expand(emb, head->b),
                        head->name);
  }
  return mk_apps(head, args);
}

ExtractReport extract_report(const GeneratedEmbedding& emb, const Context& pts_ctx,
                             const TermPtr& A, const TermPtr& t, Fuel& fuel) {
  ExtractReport rep;
  TermPtr raw = back_translate(emb, t);
  auto nf = pts_normalize(raw, fuel);
  if (!nf) {
    rep.witness = raw;
    rep.failure = nf.error();
    return rep;
  }
  rep.witness = nf.value();

  auto ck = pts_check(emb.config.spec, pts_ctx, rep.witness, A, fuel);
  rep.pts_ok = ck.ok();
  if (!rep.pts_ok) {
    rep.failure = Diag(DiagCode::ExtractionFailed,
                       "back translation " + print_term_in(rep.witness, pts_ctx) +
                           " does not inhabit the requested type: " +
                           to_string(ck.error()));
    return rep;
  }

  auto retr = translate_term(emb, pts_ctx, rep.witness, fuel);
  if (!retr) {
    rep.failure = retr.error();
    return rep;
  }
  auto conv = convertible(emb.rewrites, retr.value(), t, fuel);
  if (!conv) {
    rep.failure = conv.error();
    return rep;
  }
  rep.conv_ok = conv.value().convertible;
  if (!rep.conv_ok) {
    rep.failure =
        Diag(DiagCode::ExtractionConversionGap,
             "witness " + print_term_in(rep.witness, pts_ctx) +
                 " inhabits the requested type, but its translation is not "
                 "convertible to the input proof");
  }
  return rep;
}

Result<TermPtr> extract_inhabitant(const GeneratedEmbedding& emb, const Context& pts_ctx,
                                   const TermPtr& A, const TermPtr& t, Fuel& fuel) {
  ExtractReport rep = extract_report(emb, pts_ctx, A, t, fuel);
  if (rep.pts_ok && rep.conv_ok) return rep.witness;
  if (rep.failure) return *rep.failure;
  return Diag(DiagCode::ExtractionFailed, "extraction failed");
}

Result<TermPtr> extract_inhabitant(const GeneratedEmbedding& emb, const Context& pts_ctx,
                                   const TermPtr& A, const TermPtr& t, long long fuel) {
  Fuel f(fuel);
  return extract_inhabitant(emb, pts_ctx, A, t, f);
}

Result<InhabitationReport> check_inhabitation_theorem(const GeneratedEmbedding& emb,
                                                      const Context& pts_ctx,
                                                      const TermPtr& A,
                                                      const TermPtr& candidate,
                                                      Fuel& fuel) {
  InhabitationReport rep;
  auto lctx = translate_context(emb, pts_ctx, fuel);
  if (!lctx) return lctx.error();
  rep.translated_ctx = lctx.value();
  auto la = translate_type(emb, pts_ctx, A, fuel);
  if (!la) return la.error();
  rep.translated_type = la.value();

  auto ck = lpm_check(emb.signature, emb.rewrites, rep.translated_ctx, candidate,
                      rep.translated_type, fuel);
  if (!ck) return ck.error();

  auto nf = betaR_normalize(emb.rewrites, candidate, fuel);
  if (!nf) return nf.error();
  rep.normal_form = nf.value();
  rep.expanded = weak_eta_expand(emb, rep.normal_form);
  rep.extract = extract_report(emb, pts_ctx, A, rep.expanded, fuel);
  return rep;
}

Result<InhabitationReport> check_inhabitation_theorem(const GeneratedEmbedding& emb,
                                                      const Context& pts_ctx,
                                                      const TermPtr& A,
                                                      const TermPtr& candidate,
                                                      long long fuel) {
  Fuel f(fuel);
  return check_inhabitation_theorem(emb, pts_ctx, A, candidate, f);
}

}  // namespace lpm
