#include "support.h"

#include <algorithm>
#include <cctype>
#include <memory>
#include <stdexcept>

#include "lpm/pts.h"

#ifndef LPM_DATA_DIR
#error "the build must define LPM_DATA_DIR"
#endif

namespace lpm::test {

std::string data_path(const std::string& rel) {
  return std::string(LPM_DATA_DIR) + "/" + rel;
}

// ---------------------------------------------------------------------------
// Named-term substitution oracle.

namespace {

struct NTerm;
using NPtr = std::shared_ptr<const NTerm>;

struct NTerm {
  TermKind kind;
  std::string var;  // Var name, or the bound name on Pi/Lam
  SortTag sort;
  std::string cname;
  NPtr a, b;
};

NPtr n_var(const std::string& x) {
  return std::make_shared<NTerm>(NTerm{TermKind::Var, x, {}, "", nullptr, nullptr});
}
NPtr n_node(TermKind k, const std::string& x, NPtr a, NPtr b) {
  return std::make_shared<NTerm>(
      NTerm{k, x, {}, "", std::move(a), std::move(b)});
}

// stack.back() names Var 0.
NPtr to_named(const TermPtr& t, std::vector<std::string>& stack, int& fresh) {
  switch (t->kind) {
    case TermKind::Var: {
      int pos = static_cast<int>(stack.size()) - 1 - t->index;
      if (pos < 0) throw std::logic_error("oracle: unbound variable");
      return n_var(stack[static_cast<size_t>(pos)]);
    }
    case TermKind::Sort: {
      auto n = std::make_shared<NTerm>();
      n->kind = TermKind::Sort;
      n->sort = t->sort;
      return n;
    }
    case TermKind::Const: {
      auto n = std::make_shared<NTerm>();
      n->kind = TermKind::Const;
      n->cname = t->name;
      return n;
    }
    case TermKind::App:
      return n_node(TermKind::App, "", to_named(t->a, stack, fresh),
                    to_named(t->b, stack, fresh));
    case TermKind::Pi:
    case TermKind::Lam: {
      NPtr a = to_named(t->a, stack, fresh);
      std::string x = "n" + std::to_string(fresh++);
      stack.push_back(x);
      NPtr b = to_named(t->b, stack, fresh);
      stack.pop_back();
      return n_node(t->kind, x, std::move(a), std::move(b));
    }
  }
  throw std::logic_error("oracle: bad kind");
}

TermPtr to_db(const NPtr& t, std::vector<std::string>& stack) {
  switch (t->kind) {
    case TermKind::Var: {
      for (int i = static_cast<int>(stack.size()) - 1; i >= 0; --i) {
        if (stack[static_cast<size_t>(i)] == t->var) {
          return mk_var(static_cast<int>(stack.size()) - 1 - i);
        }
      }
      throw std::logic_error("oracle: name fell out of scope: " + t->var);
    }
    case TermKind::Sort:
      return mk_sort(t->sort);
    case TermKind::Const:
      return mk_const(t->cname);
    case TermKind::App:
      return mk_app(to_db(t->a, stack), to_db(t->b, stack));
    case TermKind::Pi:
    case TermKind::Lam: {
      TermPtr a = to_db(t->a, stack);
      stack.push_back(t->var);
      TermPtr b = to_db(t->b, stack);
      stack.pop_back();
      return t->kind == TermKind::Pi ? mk_pi(a, b, t->var) : mk_lam(a, b, t->var);
    }
  }
  throw std::logic_error("oracle: bad kind");
}

bool n_free_in(const NPtr& t, const std::string& x) {
  switch (t->kind) {
    case TermKind::Var:
      return t->var == x;
    case TermKind::Sort:
    case TermKind::Const:
      return false;
    case TermKind::App:
      return n_free_in(t->a, x) || n_free_in(t->b, x);
    case TermKind::Pi:
    case TermKind::Lam:
      if (n_free_in(t->a, x)) return true;
      if (t->var == x) return false;  // shadowed below the binder
      return n_free_in(t->b, x);
  }
  return false;
}

NPtr nsubst(const NPtr& t, const std::string& x, const NPtr& s, int& fresh) {
  switch (t->kind) {
    case TermKind::Var:
      return t->var == x ? s : t;
    case TermKind::Sort:
    case TermKind::Const:
      return t;
    case TermKind::App:
      return n_node(TermKind::App, "", nsubst(t->a, x, s, fresh),
                    nsubst(t->b, x, s, fresh));
    case TermKind::Pi:
    case TermKind::Lam: {
      NPtr a = nsubst(t->a, x, s, fresh);
      if (t->var == x) return n_node(t->kind, t->var, a, t->b);
      if (n_free_in(s, t->var) && n_free_in(t->b, x)) {
        std::string y = "r" + std::to_string(fresh++);
        NPtr renamed = nsubst(t->b, t->var, n_var(y), fresh);
        return n_node(t->kind, y, a, nsubst(renamed, x, s, fresh));
      }
      return n_node(t->kind, t->var, a, nsubst(t->b, x, s, fresh));
    }
  }
  throw std::logic_error("oracle: bad kind");
}

// Smallest n such that every free variable of t has index < n.
int free_bound(const TermPtr& t, int depth) {
  switch (t->kind) {
    case TermKind::Var:
      return t->index >= depth ? t->index - depth + 1 : 0;
    case TermKind::Sort:
    case TermKind::Const:
      return 0;
    case TermKind::App:
      return std::max(free_bound(t->a, depth), free_bound(t->b, depth));
    case TermKind::Pi:
    case TermKind::Lam:
      return std::max(free_bound(t->a, depth), free_bound(t->b, depth + 1));
  }
  return 0;
}

}  // namespace

TermPtr oracle_subst(const TermPtr& body, const TermPtr& arg) {
  // The body's Var 0 is the substitution target; slot k+1 of the body and
  // slot k of the argument name the same ambient variable.
  int ambient = std::max(free_bound(body, 0) - 1, free_bound(arg, 0));
  std::vector<std::string> stack;
  for (int k = ambient - 1; k >= 0; --k) stack.push_back("amb" + std::to_string(k));

  int fresh = 0;
  NPtr named_arg = to_named(arg, stack, fresh);
  stack.push_back("subj");
  NPtr named_body = to_named(body, stack, fresh);
  stack.pop_back();

  NPtr named_result = nsubst(named_body, "subj", named_arg, fresh);
  return to_db(named_result, stack);
}

// ---------------------------------------------------------------------------
// Simply typed generator.

namespace {

struct Ty;
using TyP = std::shared_ptr<const Ty>;
struct Ty {
  std::string base;  // empty means arrow
  TyP l, r;
};

TyP ty_base(const std::string& n) {
  return std::make_shared<Ty>(Ty{n, nullptr, nullptr});
}
TyP ty_arrow(TyP l, TyP r) {
  return std::make_shared<Ty>(Ty{"", std::move(l), std::move(r)});
}

bool ty_eq(const TyP& a, const TyP& b) {
  if (a->base != b->base) return false;
  if (!a->base.empty()) return true;
  return ty_eq(a->l, b->l) && ty_eq(a->r, b->r);
}

std::string ty_str(const TyP& t, bool atom) {
  if (!t->base.empty()) return t->base;
  std::string s = ty_str(t->l, true) + " -> " + ty_str(t->r, false);
  return atom ? "(" + s + ")" : s;
}

bool is_ident(const std::string& s) {
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return !s.empty();
}

std::string as_atom(const std::string& s) {
  return is_ident(s) ? s : "(" + s + ")";
}

using Env = std::vector<std::pair<std::string, TyP>>;

Env base_env() {
  TyP nat = ty_base("nat");
  TyP b = ty_base("b");
  return {
      {"c", nat},
      {"d", b},
      {"f", ty_arrow(nat, nat)},
      {"g", ty_arrow(nat, b)},
      {"h", ty_arrow(ty_arrow(nat, nat), nat)},
      {"k", ty_arrow(nat, ty_arrow(nat, b))},
  };
}

TyP gen_ty(Rng& rng, int depth) {
  if (depth <= 0 || rng.coin(0.55)) {
    return ty_base(rng.coin(0.5) ? "nat" : "b");
  }
  return ty_arrow(gen_ty(rng, depth - 1), gen_ty(rng, depth - 1));
}

std::string gen_term(Rng& rng, int& fresh, const TyP& ty, Env& env, int budget) {
  std::vector<std::string> hits;
  for (const auto& [name, t] : env) {
    if (ty_eq(t, ty)) hits.push_back(name);
  }
  bool arrow = ty->base.empty();
  int roll = budget <= 0 ? -1 : rng.below(10);

  bool use_var = !hits.empty() && (budget <= 0 ? !arrow || rng.coin(0.5)
                                               : (arrow ? roll >= 4 && roll < 7
                                                        : roll < 5));
  if (use_var) return rng.pick(hits);

  if (arrow && (budget <= 0 || roll < 4 || hits.empty())) {
    std::string x = "x" + std::to_string(fresh++);
    env.emplace_back(x, ty->l);
    std::string body = gen_term(rng, fresh, ty->r, env, budget - 1);
    env.pop_back();
    return "\\" + x + ":" + ty_str(ty->l, false) + ". " + body;
  }
  if (budget <= 0) {
    // A base type with no matching variable cannot happen: the base
    // context covers nat and b.
    throw std::logic_error("generator: stuck at base type");
  }

  TyP piv = gen_ty(rng, 1);
  std::string fn = gen_term(rng, fresh, ty_arrow(piv, ty), env, budget - 1);
  std::string ar = gen_term(rng, fresh, piv, env, budget - 1);
  return as_atom(fn) + " " + as_atom(ar);
}

}  // namespace

const char* SimpleTypedGen::base_context() {
  return "nat:Type, b:Type, c:nat, d:b, f:nat -> nat, g:nat -> b, "
         "h:(nat -> nat) -> nat, k:nat -> nat -> b";
}

std::string SimpleTypedGen::judgment_line() {
  TyP ty = gen_ty(rng, 2);
  Env env = base_env();
  std::string t = gen_term(rng, fresh, ty, env, 4);
  return "[" + std::string(base_context()) + "] |- " + t + " : " +
         ty_str(ty, false) + ".";
}

// ---------------------------------------------------------------------------
// Generators over a generated signature.

namespace {

struct SigNames {
  std::vector<std::string> u, dot;
  std::vector<std::pair<std::string, std::string>> axioms;  // (eps_s2, dot_s1)
  struct RuleNames {
    std::string dotpi, eps_outer, eps_dom, eps_cod;
  };
  std::vector<RuleNames> rules;
  std::vector<std::string> eps;
};

SigNames sig_names(const GeneratedEmbedding& emb) {
  SigNames n;
  const auto& cfg = emb.config;
  for (const auto& s : cfg.spec.sorts) {
    n.u.push_back(cfg.u_name(s));
    n.eps.push_back(cfg.eps_name(s));
  }
  for (const auto& [s1, s2] : cfg.spec.axioms) {
    n.dot.push_back(cfg.dot_name(s1));
    n.axioms.emplace_back(cfg.eps_name(s2), cfg.dot_name(s1));
  }
  for (const auto& r : cfg.spec.rules) {
    n.rules.push_back({cfg.dotpi_name(r), cfg.eps_name(r[2]), cfg.eps_name(r[0]),
                       cfg.eps_name(r[1])});
  }
  return n;
}

TermPtr leaf(Rng& rng, const SigNames& n, int binders, bool allow_bare) {
  if (binders > 0 && rng.coin(0.55)) return mk_var(rng.below(binders));
  int kinds = allow_bare ? 4 : 2;
  switch (rng.below(kinds)) {
    case 0:
      return mk_const(rng.pick(n.u));
    case 1:
      if (!n.dot.empty()) return mk_const(rng.pick(n.dot));
      return mk_const(rng.pick(n.u));
    case 2:
      return mk_const(rng.pick(n.eps));
    default: {
      if (!n.rules.empty()) return mk_const(rng.pick(n.rules).dotpi);
      return rng.coin(0.5) ? mk_lpm_type() : mk_lpm_kind();
    }
  }
}

TermPtr saturated_impl(Rng& rng, const SigNames& n, int budget, int binders) {
  if (budget <= 1) return leaf(rng, n, binders, false);
  int r = rng.below(100);

  if (r < 20) {  // decoder application, often a redex
    int which = rng.below(3);
    if (which == 0 && !n.axioms.empty()) {
      const auto& ax = rng.pick(n.axioms);
      return mk_app(mk_const(ax.first), mk_const(ax.second));
    }
    if (which == 1 && !n.rules.empty() && budget >= 5) {
      const auto& ru = rng.pick(n.rules);
      int bx = 1 + rng.below(std::max(1, budget - 4));
      TermPtr x = saturated_impl(rng, n, bx, binders);
      TermPtr y = saturated_impl(rng, n, budget - 4 - term_size(x) + 1, binders);
      // The back translation recomputes an abstraction in this position,
      // so keeping literal lambdas out of it is what makes rewrite steps
      // commute with back translation on the nose.
      if (y->kind == TermKind::Lam) y = leaf(rng, n, binders, false);
      return mk_app(mk_const(ru.eps_outer), mk_apps(mk_const(ru.dotpi), {x, y}));
    }
    return mk_app(mk_const(rng.pick(n.eps)),
                  saturated_impl(rng, n, budget - 2, binders));
  }
  if (r < 38 && !n.rules.empty() && budget >= 3) {  // applied product code
    const auto& ru = rng.pick(n.rules);
    int bx = 1 + rng.below(std::max(1, (budget - 3) / 2 + 1));
    TermPtr x = saturated_impl(rng, n, bx, binders);
    TermPtr y = saturated_impl(rng, n, std::max(1, budget - 3 - term_size(x)), binders);
    if (y->kind == TermKind::Lam) y = leaf(rng, n, binders, false);
    return mk_apps(mk_const(ru.dotpi), {x, y});
  }
  if (r < 56) {  // application, beta redex half the time
    int half = std::max(1, (budget - 1) / 2);
    if (rng.coin(0.55) && budget >= 4) {
      TermPtr ann = saturated_impl(rng, n, std::max(1, half / 2), binders);
      TermPtr body = saturated_impl(rng, n, half, binders + 1);
      TermPtr arg = saturated_impl(
          rng, n, std::max(1, budget - 2 - term_size(ann) - term_size(body)),
          binders);
      return mk_app(mk_lam(ann, body, "z"), arg);
    }
    TermPtr f = saturated_impl(rng, n, half, binders);
    return mk_app(f, saturated_impl(rng, n, std::max(1, budget - 1 - term_size(f)),
                                    binders));
  }
  if (r < 74) {  // lambda
    TermPtr ann = saturated_impl(rng, n, std::max(1, (budget - 1) / 3), binders);
    return mk_lam(ann,
                  saturated_impl(rng, n, std::max(1, budget - 1 - term_size(ann)),
                                 binders + 1),
                  "z");
  }
  if (r < 88) {  // product
    TermPtr dom = saturated_impl(rng, n, std::max(1, (budget - 1) / 2), binders);
    return mk_pi(dom,
                 saturated_impl(rng, n, std::max(1, budget - 1 - term_size(dom)),
                                binders + 1),
                 "z");
  }
  return leaf(rng, n, binders, false);
}

TermPtr sized_impl(Rng& rng, const SigNames& n, int budget, int binders) {
  if (budget <= 1) return leaf(rng, n, binders, true);
  int r = rng.below(100);

  if (r < 14 && !n.axioms.empty() && budget >= 3) {  // axiom redex
    const auto& ax = rng.pick(n.axioms);
    return mk_app(mk_const(ax.first), mk_const(ax.second));
  }
  if (r < 28 && !n.rules.empty() && budget >= 7) {  // rule redex
    const auto& ru = rng.pick(n.rules);
    int slack = budget - 7;
    int bx = 1 + (slack > 0 ? rng.below(slack + 1) : 0);
    TermPtr x = sized_impl(rng, n, bx, binders);
    TermPtr y = sized_impl(rng, n, budget - 5 - term_size(x), binders);
    return mk_app(mk_const(ru.eps_outer), mk_apps(mk_const(ru.dotpi), {x, y}));
  }
  if (r < 42 && budget >= 5) {  // beta redex
    int third = std::max(1, (budget - 2) / 3);
    TermPtr ann = sized_impl(rng, n, third, binders);
    TermPtr body = sized_impl(rng, n, third, binders + 1);
    TermPtr arg = sized_impl(
        rng, n, std::max(1, budget - 2 - term_size(ann) - term_size(body)), binders);
    return mk_app(mk_lam(ann, body, "z"), arg);
  }
  if (r < 56 && budget >= 3) {  // decoder or half-applied product code
    TermPtr head = rng.coin(0.7) || n.rules.empty()
                       ? mk_const(rng.pick(n.eps))
                       : mk_const(rng.pick(n.rules).dotpi);
    return mk_app(head, sized_impl(rng, n, budget - 2, binders));
  }
  if (r < 70 && budget >= 3) {  // application
    int half = std::max(1, (budget - 1) / 2);
    TermPtr f = sized_impl(rng, n, half, binders);
    return mk_app(f,
                  sized_impl(rng, n, std::max(1, budget - 1 - term_size(f)), binders));
  }
  if (r < 84 && budget >= 3) {  // lambda
    int half = std::max(1, (budget - 1) / 2);
    TermPtr ann = sized_impl(rng, n, half, binders);
    return mk_lam(ann,
                  sized_impl(rng, n, std::max(1, budget - 1 - term_size(ann)),
                             binders + 1),
                  "z");
  }
  if (r < 94 && budget >= 3) {  // product
    int half = std::max(1, (budget - 1) / 2);
    TermPtr dom = sized_impl(rng, n, half, binders);
    return mk_pi(dom,
                 sized_impl(rng, n, std::max(1, budget - 1 - term_size(dom)),
                            binders + 1),
                 "z");
  }
  return leaf(rng, n, binders, true);
}

}  // namespace

TermPtr gen_saturated(Rng& rng, const GeneratedEmbedding& emb, int budget,
                      int binders) {
  SigNames n = sig_names(emb);
  return saturated_impl(rng, n, budget, binders);
}

TermPtr gen_sized(Rng& rng, const GeneratedEmbedding& emb, int budget, int binders) {
  SigNames n = sig_names(emb);
  return sized_impl(rng, n, budget, binders);
}

// ---------------------------------------------------------------------------
// Corpus loading.

std::vector<CorpusFile> corpus_files() {
  return {
      {"specs/stlc.pts", "corpus/stlc.judg"},
      {"specs/f.pts", "corpus/f.judg"},
      {"specs/lpi.pts", "corpus/lpi.judg"},
      {"specs/coc.pts", "corpus/coc.judg"},
  };
}

LoadedCorpus load_corpus(const CorpusFile& f) {
  SpecFile sf = must(load_spec(data_path(f.spec_path)));
  SigFile jf = must(load_signature(data_path(f.judg_path)));
  if (!jf.signature.entries.empty() || !jf.rules.empty()) {
    throw std::runtime_error(f.judg_path + ": expected judgments only");
  }
  LoadedCorpus out;
  out.spec = sf.spec;
  out.default_sort = sf.default_sort.value_or("");
  for (const auto& j : jf.judgments) {
    if (!j.type) throw std::runtime_error(f.judg_path + ": judgment without a type");
    Judgment r = must(resolve_pts_judgment(j, sf.spec));
    out.judgments.push_back({r, print_judgment(r)});
  }
  if (out.judgments.empty()) throw std::runtime_error(f.judg_path + ": empty corpus");
  return out;
}

}  // namespace lpm::test
