#include "lpm/kernel.h"

#include <algorithm>
#include <stdexcept>

#include "lpm/pts.h"     // is_beta_normal
#include "lpm/syntax.h"  // printing for diagnostics

namespace lpm {

bool Signature::push(const std::string& name, TermPtr type) {
  if (index_.count(name)) return false;
  index_[name] = static_cast<int>(entries.size());
  entries.push_back({name, std::move(type)});
  return true;
}

const TermPtr* Signature::lookup(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return nullptr;
  return &entries[it->second].type;
}

RewriteSystem::RewriteSystem(std::vector<RewriteRule> rs) : rules(std::move(rs)) {
  for (int i = 0; i < static_cast<int>(rules.size()); ++i) {
    TermPtr head;
    std::vector<TermPtr> args;
    spine_decompose(rules[i].lhs, head, args);
    if (head->kind == TermKind::Const)
      by_head[head->name].push_back({i, static_cast<int>(args.size())});
  }
}

namespace {

// First-order matching of a pattern against a term, binding pattern
// variables into `binds` (indexed by variable slot). Purely syntactic.
bool match_syntactic(const TermPtr& pat, const TermPtr& t, Substitution& binds) {
  switch (pat->kind) {
    case TermKind::Var: {
      auto& slot = binds[pat->index];
      if (slot) return false;  // defensive; checked rules are left-linear
      slot = t;
      return true;
    }
    case TermKind::Const:
      return t->kind == TermKind::Const && t->name == pat->name;
    case TermKind::App:
      return t->kind == TermKind::App && match_syntactic(pat->a, t->a, binds) &&
             match_syntactic(pat->b, t->b, binds);
    default:
      return false;  // checked patterns contain no sorts or binders
  }
}

std::optional<RewriteStep> rewrite_at(const RewriteSystem& rs, const TermPtr& t) {
  for (int i = 0; i < static_cast<int>(rs.rules.size()); ++i) {
    const RewriteRule& r = rs.rules[i];
    Substitution binds(r.pattern_ctx.size());
    if (match_syntactic(r.lhs, t, binds))
      return RewriteStep{subst_multi(r.rhs, binds), i};
  }
  return std::nullopt;
}

}  // namespace

std::optional<RewriteStep> rewrite_step(const RewriteSystem& rs, const TermPtr& t) {
  // Outermost position first, then left subtree before right.
  if (auto here = rewrite_at(rs, t)) return here;
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
    case TermKind::Const:
      return std::nullopt;
    case TermKind::Pi:
    case TermKind::Lam: {
      if (auto a = rewrite_step(rs, t->a)) {
        a->reduct = t->kind == TermKind::Pi ? mk_pi(a->reduct, t->b, t->name)
                                            : mk_lam(a->reduct, t->b, t->name);
        return a;
      }
      if (auto b = rewrite_step(rs, t->b)) {
        b->reduct = t->kind == TermKind::Pi ? mk_pi(t->a, b->reduct, t->name)
                                            : mk_lam(t->a, b->reduct, t->name);
        return b;
      }
      return std::nullopt;
    }
    case TermKind::App: {
      if (auto a = rewrite_step(rs, t->a)) {
        a->reduct = mk_app(a->reduct, t->b);
        return a;
      }
      if (auto b = rewrite_step(rs, t->b)) {
        b->reduct = mk_app(t->a, b->reduct);
        return b;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool is_betaR_normal(const RewriteSystem& rs, const TermPtr& t) {
  return is_beta_normal(t) && !rewrite_step(rs, t).has_value();
}

std::optional<TermPtr> betaR_step(const RewriteSystem& rs, const TermPtr& t,
                                  bool include_beta) {
  if (auto here = rewrite_at(rs, t)) return here->reduct;
  if (include_beta && t->kind == TermKind::App && t->a->kind == TermKind::Lam)
    return subst(t->a->b, t->b);
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
    case TermKind::Const:
      return std::nullopt;
    case TermKind::Pi:
    case TermKind::Lam: {
      if (auto a = betaR_step(rs, t->a, include_beta))
        return t->kind == TermKind::Pi ? mk_pi(*a, t->b, t->name)
                                       : mk_lam(*a, t->b, t->name);
      if (auto b = betaR_step(rs, t->b, include_beta))
        return t->kind == TermKind::Pi ? mk_pi(t->a, *b, t->name)
                                       : mk_lam(t->a, *b, t->name);
      return std::nullopt;
    }
    case TermKind::App: {
      if (auto a = betaR_step(rs, t->a, include_beta)) return mk_app(*a, t->b);
      if (auto b = betaR_step(rs, t->b, include_beta)) return mk_app(t->a, *b);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

struct Reducer {
  const RewriteSystem& rs;
  Fuel& fuel;
  const KernelOpts& opts;

  // Matches a pattern argument against a term slot, weak-head normalizing
  // the slot on demand so matching is decided up to conversion. Partial
  // normalization persists in the slot even when the match fails, so later
  // rule attempts do not redo the work. Nested constant-headed patterns
  // require the exact argument count.
  Result<bool> match_modulo(const TermPtr& pat, TermPtr& slot, Substitution& binds) {
    if (pat->kind == TermKind::Var) {
      binds[pat->index] = slot;
      return true;
    }
    auto w = whnf(slot);
    if (!w) return w.error();
    slot = std::move(w).take();
    TermPtr phead, shead;
    std::vector<TermPtr> pargs, sargs;
    spine_decompose(pat, phead, pargs);
    spine_decompose(slot, shead, sargs);
    if (phead->kind != TermKind::Const) return false;
    if (shead->kind != TermKind::Const || shead->name != phead->name) return false;
    if (sargs.size() != pargs.size()) return false;
    bool all = true;
    for (size_t i = 0; i < pargs.size(); ++i) {
      auto m = match_modulo(pargs[i], sargs[i], binds);
      if (!m) return m.error();
      if (!m.value()) { all = false; break; }
    }
    slot = mk_apps(shead, sargs);
    return all;
  }

  // Weak-head normalization modulo beta (unless disabled) and the rewrite
  // rules. Rule prefixes are tried longest-first, which reproduces the
  // outermost-position priority of rewrite_step; within one length, rules
  // apply in declaration order.
  Result<TermPtr> whnf(TermPtr t) {
    TermPtr head;
    std::vector<TermPtr> args;
    spine_decompose(t, head, args);
    for (;;) {
      if (!opts.lambda_pi_minus && head->kind == TermKind::Lam && !args.empty()) {
        if (!fuel.spend())
          return Diag(DiagCode::FuelExhausted, "weak-head normalization ran out of fuel");
        TermPtr contracted = subst(head->b, args.front());
        args.erase(args.begin());
        std::vector<TermPtr> more;
        spine_decompose(contracted, head, more);
        args.insert(args.begin(), more.begin(), more.end());
        continue;
      }
      if (head->kind == TermKind::Const) {
        auto it = rs.by_head.find(head->name);
        if (it != rs.by_head.end()) {
          bool fired = false;
          int max_n = static_cast<int>(args.size());
          for (int n = max_n; n >= 0 && !fired; --n) {
            for (const auto& cand : it->second) {
              if (cand.arity != n) continue;
              const RewriteRule& r = rs.rules[cand.rule];
              TermPtr phead;
              std::vector<TermPtr> pargs;
              spine_decompose(r.lhs, phead, pargs);
              Substitution binds(r.pattern_ctx.size());
              bool ok = true;
              for (int i = 0; i < n && ok; ++i) {
                auto m = match_modulo(pargs[i], args[i], binds);
                if (!m) return m.error();
                ok = m.value();
              }
              if (!ok) continue;
              if (!fuel.spend())
                return Diag(DiagCode::FuelExhausted,
                            "weak-head normalization ran out of fuel");
              TermPtr contracted = subst_multi(r.rhs, binds);
              std::vector<TermPtr> rest(args.begin() + n, args.end());
              std::vector<TermPtr> more;
              spine_decompose(contracted, head, more);
              more.insert(more.end(), rest.begin(), rest.end());
              args = std::move(more);
              fired = true;
              break;
            }
          }
          if (fired) continue;
        }
      }
      break;
    }
    return mk_apps(head, args);
  }

  Result<TermPtr> normalize(const TermPtr& t) {
    auto w = whnf(t);
    if (!w) return w;
    TermPtr h = std::move(w).take();
    switch (h->kind) {
      case TermKind::Var:
      case TermKind::Sort:
      case TermKind::Const:
        return h;
      case TermKind::Pi:
      case TermKind::Lam: {
        auto a = normalize(h->a);
        if (!a) return a;
        auto b = normalize(h->b);
        if (!b) return b;
        return h->kind == TermKind::Pi
                   ? mk_pi(a.value(), b.value(), h->name)
                   : mk_lam(a.value(), b.value(), h->name);
      }
      case TermKind::App: {
        // Weak-head normal spine: the head cannot step, so normalizing the
        // arguments cannot enable a rule here (matching already inspected
        // every constructor position it needed, modulo whnf).
        TermPtr head;
        std::vector<TermPtr> args;
        spine_decompose(h, head, args);
        if (head->kind == TermKind::Pi || head->kind == TermKind::Lam) {
          auto nh = normalize(head);
          if (!nh) return nh;
          head = std::move(nh).take();
        }
        for (auto& a : args) {
          auto na = normalize(a);
          if (!na) return na;
          a = std::move(na).take();
        }
        return mk_apps(head, args);
      }
    }
    throw std::logic_error("normalize: bad kind");
  }

  Result<bool> conv(const TermPtr& a, const TermPtr& b) {
    if (alpha_eq(a, b)) return true;
    auto wa = whnf(a);
    if (!wa) return wa.error();
    auto wb = whnf(b);
    if (!wb) return wb.error();
    const TermPtr& x = wa.value();
    const TermPtr& y = wb.value();
    if (opts.trace)
      *opts.trace << "conv: " << print_term(x) << "  ~  " << print_term(y) << "\n";
    if (x->kind != y->kind) return false;
    switch (x->kind) {
      case TermKind::Var: return x->index == y->index;
      case TermKind::Sort: return x->sort == y->sort;
      case TermKind::Const: return x->name == y->name;
      case TermKind::Pi:
      case TermKind::Lam:
      case TermKind::App: {
        auto ca = conv(x->a, y->a);
        if (!ca || !ca.value()) return ca;
        return conv(x->b, y->b);
      }
    }
    return false;
  }
};

}  // namespace

Result<TermPtr> betaR_whnf(const RewriteSystem& rs, const TermPtr& t, Fuel& fuel,
                           const KernelOpts& opts) {
  Reducer red{rs, fuel, opts};
  return red.whnf(t);
}

Result<TermPtr> betaR_normalize(const RewriteSystem& rs, const TermPtr& t, Fuel& fuel,
                                const KernelOpts& opts) {
  Reducer red{rs, fuel, opts};
  return red.normalize(t);
}

Result<ConversionOutcome> convertible(const RewriteSystem& rs, const TermPtr& a,
                                      const TermPtr& b, Fuel& fuel,
                                      const KernelOpts& opts) {
  Reducer red{rs, fuel, opts};
  long long start = fuel.remaining;
  auto r = red.conv(a, b);
  if (!r) return r.error();
  return ConversionOutcome{r.value(), start - fuel.remaining};
}

namespace {

struct LpmChecker {
  const Signature& sig;
  const RewriteSystem& rs;
  Fuel& fuel;
  const KernelOpts& opts;

  std::string pr(const Context& ctx, const TermPtr& t) const {
    return print_term_in(t, ctx);
  }

  Result<TermPtr> whnf(const TermPtr& t) {
    Reducer red{rs, fuel, opts};
    return red.whnf(t);
  }

  Result<bool> conv(const TermPtr& a, const TermPtr& b) {
    Reducer red{rs, fuel, opts};
    return red.conv(a, b);
  }

  // Infers the type of a type: must come out as the sort Type or Kind.
  Result<TermPtr> sort_of(const Context& ctx, const TermPtr& type) {
    auto s = infer(ctx, type);
    if (!s) return s;
    auto w = whnf(s.value());
    if (!w) return w;
    if (w.value()->kind == TermKind::Sort && w.value()->sort.kind != SortKind::PtsSort)
      return w;
    return Diag(DiagCode::NotAType, pr(ctx, type) + " is not a type or kind");
  }

  Result<TermPtr> infer(const Context& ctx, const TermPtr& t) {
    switch (t->kind) {
      // ------------------
      //   ctx |- Type : Kind
      case TermKind::Sort:
        if (is_lpm_type(t)) return mk_lpm_kind();
        if (is_lpm_kind(t))
          return Diag(DiagCode::KindHasNoType, "Kind cannot appear as a subject");
        return Diag(DiagCode::NotTypable,
                    "named sort '" + t->sort.name + "' inside a lambda-Pi term");

      // ---------------------------------------------- x : A among ctx
      //   ctx |- x : A
      case TermKind::Var: {
        int m = static_cast<int>(ctx.size());
        if (t->index >= m)
          return Diag(DiagCode::NotTypable,
                      "unbound variable (index " + std::to_string(t->index) + ")");
        return lift(ctx[m - 1 - t->index].type, t->index + 1);
      }

      // ---------------------------------------------- c : A in the signature
      //   ctx |- c : A
      case TermKind::Const: {
        if (const TermPtr* ty = sig.lookup(t->name)) return *ty;
        return Diag(DiagCode::NotTypable, "undeclared constant '" + t->name + "'");
      }

      //   ctx |- A : Type    ctx, x:A |- B : Type or Kind
      // --------------------------------------------------
      //   ctx |- (!x:A. B) : that same sort
      case TermKind::Pi: {
        auto sa = sort_of(ctx, t->a);
        if (!sa) return sa;
        if (!is_lpm_type(sa.value()))
          return Diag(DiagCode::NotTypable,
                      "product domain " + pr(ctx, t->a) + " must be a type");
        Context inner = ctx;
        inner.push_back({t->name, t->a});
        auto sb = sort_of(inner, t->b);
        if (!sb) return sb;
        return sb.value();
      }

      //   ctx |- A : Type    ctx, x:A |- t : B    ctx, x:A |- B : Type or Kind
      // -----------------------------------------------------------------------
      //   ctx |- (\x:A. t) : !x:A. B
      // The Kind-level form is unavailable in the restricted mode.
      case TermKind::Lam: {
        auto sa = sort_of(ctx, t->a);
        if (!sa) return sa;
        if (!is_lpm_type(sa.value()))
          return Diag(DiagCode::NotTypable,
                      "abstraction domain " + pr(ctx, t->a) + " must be a type");
        Context inner = ctx;
        inner.push_back({t->name, t->a});
        auto tb = infer(inner, t->b);
        if (!tb) return tb;
        if (is_lpm_kind(tb.value()))
          return Diag(DiagCode::NotTypable, "abstraction body is a kind");
        auto sb = sort_of(inner, tb.value());
        if (!sb) return sb;
        if (is_lpm_kind(sb.value()) && opts.lambda_pi_minus)
          return Diag(DiagCode::NotTypable,
                      "Kind-level abstraction is not available in the restricted mode");
        return mk_pi(t->a, tb.value(), t->name);
      }

      //   ctx |- t : C    whnf(C) = !x:A. B    ctx |- u : A' with A' == A
      // ------------------------------------------------------------------
      //   ctx |- t u : (u/x)B         (== is conversion modulo the rules)
      case TermKind::App: {
        auto tf = infer(ctx, t->a);
        if (!tf) return tf;
        auto pi = whnf(tf.value());
        if (!pi) return pi;
        if (pi.value()->kind != TermKind::Pi)
          return Diag(DiagCode::NotTypable,
                      "application of a non-function: " + pr(ctx, t->a) +
                          " has type " + pr(ctx, pi.value()));
        auto tu = infer(ctx, t->b);
        if (!tu) return tu;
        auto c = conv(tu.value(), pi.value()->a);
        if (!c) return c.error();
        if (!c.value())
          return Diag(DiagCode::TypeMismatch,
                      "argument " + pr(ctx, t->b) + " has type " +
                          pr(ctx, tu.value()) + " but the function expects " +
                          pr(ctx, pi.value()->a));
        return subst(pi.value()->b, t->b);
      }
    }
    throw std::logic_error("lpm infer: bad kind");
  }

  Check validate_context(const Context& ctx) {
    Context prefix;
    for (const auto& e : ctx) {
      auto s = sort_of(prefix, e.type);
      if (!s) {
        Diag d = s.error();
        d.message = "context entry " + e.name + ": " + d.message;
        return d;
      }
      prefix.push_back(e);
    }
    return Ok{};
  }
};

}  // namespace

Result<TermPtr> lpm_infer(const Signature& sig, const RewriteSystem& rs,
                          const Context& ctx, const TermPtr& t, Fuel& fuel,
                          const KernelOpts& opts) {
  LpmChecker ck{sig, rs, fuel, opts};
  auto v = ck.validate_context(ctx);
  if (!v) return v.error();
  return ck.infer(ctx, t);
}

Result<TermPtr> lpm_infer(const Signature& sig, const RewriteSystem& rs,
                          const Context& ctx, const TermPtr& t, long long fuel,
                          const KernelOpts& opts) {
  Fuel f(fuel);
  return lpm_infer(sig, rs, ctx, t, f, opts);
}

Check lpm_check(const Signature& sig, const RewriteSystem& rs, const Context& ctx,
                const TermPtr& t, const TermPtr& expected, Fuel& fuel,
                const KernelOpts& opts) {
  LpmChecker ck{sig, rs, fuel, opts};
  auto v = ck.validate_context(ctx);
  if (!v) return v.error();
  if (!is_lpm_kind(expected)) {
    auto s = ck.sort_of(ctx, expected);
    if (!s) {
      Diag d = s.error();
      d.message = "expected type is not well formed: " + d.message;
      return d;
    }
  }
  auto b = ck.infer(ctx, t);
  if (!b) return b.error();
  auto c = ck.conv(b.value(), expected);
  if (!c) return c.error();
  if (!c.value())
    return Diag(DiagCode::TypeMismatch,
                "subject has type " + print_term_in(b.value(), ctx) +
                    " which is not convertible to " + print_term_in(expected, ctx));
  return Ok{};
}

Check lpm_check(const Signature& sig, const RewriteSystem& rs, const Context& ctx,
                const TermPtr& t, const TermPtr& expected, long long fuel,
                const KernelOpts& opts) {
  Fuel f(fuel);
  return lpm_check(sig, rs, ctx, t, expected, f, opts);
}

namespace {

// Pattern shape check: first-order, constant-headed, every binder-free.
// Counts pattern-variable occurrences into `counts`.
Check check_pattern_shape(const TermPtr& t, std::vector<int>& counts, bool top) {
  TermPtr head;
  std::vector<TermPtr> args;
  spine_decompose(t, head, args);
  if (head->kind == TermKind::Var) {
    if (top || !args.empty())
      return Diag(DiagCode::NonPatternLhs,
                  top ? "left-hand side must be headed by a constant"
                      : "pattern variables may not be applied");
    counts[head->index] += 1;
    return Ok{};
  }
  if (head->kind != TermKind::Const)
    return Diag(DiagCode::NonPatternLhs,
                "patterns are built from constants and pattern variables only");
  for (const auto& a : args) {
    auto c = check_pattern_shape(a, counts, false);
    if (!c) return c;
  }
  return Ok{};
}

}  // namespace

Check check_rule(const Signature& sig, const RewriteRule& rule) {
  RewriteSystem no_rules;
  KernelOpts plain;

  {
    Fuel fuel(kDefaultJudgmentFuel);
    auto lhs = lpm_check(sig, no_rules, rule.pattern_ctx, rule.lhs, rule.type, fuel, plain);
    if (!lhs) {
      Diag d(DiagCode::IllTypedLhs, "left-hand side: " + to_string(lhs.error()));
      d.span = rule.span;
      return d;
    }
  }
  {
    Fuel fuel(kDefaultJudgmentFuel);
    auto rhs = lpm_check(sig, no_rules, rule.pattern_ctx, rule.rhs, rule.type, fuel, plain);
    if (!rhs) {
      Diag d(DiagCode::IllTypedRhs, "right-hand side: " + to_string(rhs.error()));
      d.span = rule.span;
      return d;
    }
  }
  if (!is_beta_normal(rule.lhs))
    return Diag(DiagCode::NonNormalSide, "left-hand side is not beta-normal");
  if (!is_beta_normal(rule.rhs))
    return Diag(DiagCode::NonNormalSide, "right-hand side is not beta-normal");

  std::vector<int> counts(rule.pattern_ctx.size(), 0);
  auto shape = check_pattern_shape(rule.lhs, counts, true);
  if (!shape) return shape;
  for (size_t i = 0; i < counts.size(); ++i) {
    int k = counts[i];  // occurrences of Var i, which names entry (n-1-i)
    if (k > 1) {
      return Diag(DiagCode::NonLinearLhs,
                  "pattern variable '" +
                      rule.pattern_ctx[counts.size() - 1 - i].name +
                      "' occurs " + std::to_string(k) + " times in the left-hand side");
    }
    if (k == 0) {
      return Diag(DiagCode::NonPatternLhs,
                  "pattern variable '" +
                      rule.pattern_ctx[counts.size() - 1 - i].name +
                      "' does not occur in the left-hand side");
    }
  }
  return Ok{};
}

Check check_signature(const Signature& sig) {
  Signature prefix;
  RewriteSystem no_rules;
  for (const auto& e : sig.entries) {
    Fuel fuel(kDefaultJudgmentFuel);
    LpmChecker ck{prefix, no_rules, fuel, {}};
    auto s = ck.sort_of({}, e.type);
    if (!s) {
      Diag d = s.error();
      d.message = "declaration '" + e.name + "': " + d.message;
      return d;
    }
    if (!prefix.push(e.name, e.type))
      return Diag(DiagCode::DuplicateName, "constant '" + e.name + "' declared twice");
  }
  return Ok{};
}

}  // namespace lpm
