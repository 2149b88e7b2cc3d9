#include "lpm/parlab.h"

#include <deque>
#include <unordered_set>

namespace lpm {

namespace {

bool is_const(const TermPtr& t) { return t->kind == TermKind::Const; }

// Shape of a generated axiom rule:   [] e d --> u : Type
bool match_axiom_shape(const RewriteRule& r, std::string& e, std::string& d,
                       std::string& u) {
  if (!r.pattern_ctx.empty()) return false;
  if (r.lhs->kind != TermKind::App || !is_const(r.lhs->a) || !is_const(r.lhs->b))
    return false;
  if (!is_const(r.rhs)) return false;
  e = r.lhs->a->name;
  d = r.lhs->b->name;
  u = r.rhs->name;
  return true;
}

// Shape of a generated product rule:
//   [X:_, Y:_] e3 (dp X Y) --> !x:(e1 X). e2 (Y x) : Type
bool match_rule_shape(const RewriteRule& r, std::string& e3, std::string& dp,
                      std::string& e1, std::string& e2) {
  if (r.pattern_ctx.size() != 2) return false;
  const TermPtr& l = r.lhs;
  if (l->kind != TermKind::App || !is_const(l->a)) return false;
  const TermPtr& inner = l->b;
  if (inner->kind != TermKind::App || inner->a->kind != TermKind::App) return false;
  const TermPtr& dpc = inner->a->a;
  if (!is_const(dpc)) return false;
  auto is_var = [](const TermPtr& t, int i) {
    return t->kind == TermKind::Var && t->index == i;
  };
  if (!is_var(inner->a->b, 1) || !is_var(inner->b, 0)) return false;

  const TermPtr& rr = r.rhs;
  if (rr->kind != TermKind::Pi) return false;
  const TermPtr& dom = rr->a;
  const TermPtr& cod = rr->b;
  if (dom->kind != TermKind::App || !is_const(dom->a) || !is_var(dom->b, 1))
    return false;
  if (cod->kind != TermKind::App || !is_const(cod->a)) return false;
  const TermPtr& ap = cod->b;  // (Y x) under the fresh binder: Y is index 1
  if (ap->kind != TermKind::App || !is_var(ap->a, 1) || !is_var(ap->b, 0))
    return false;

  e3 = l->a->name;
  dp = dpc->name;
  e1 = dom->a->name;
  e2 = cod->a->name;
  return true;
}

}  // namespace

std::optional<UniverseTable> infer_universe_table(const RewriteSystem& rs) {
  UniverseTable tab;
  for (const auto& r : rs.rules) {
    std::string e, d, u;
    if (match_axiom_shape(r, e, d, u)) {
      tab.axioms[UniverseTable::key(e, d)] = {u};
      continue;
    }
    std::string e3, dp, e1, e2;
    if (match_rule_shape(r, e3, dp, e1, e2)) {
      tab.rules[UniverseTable::key(e3, dp)] = {e1, e2};
      continue;
    }
    return std::nullopt;
  }
  return tab;
}

namespace {

// Decomposes t as (e3 (dp A B)) against the rule table.
const UniverseTable::RuleEntry* rule_redex(const UniverseTable& tab, const TermPtr& t,
                                           TermPtr& A, TermPtr& B) {
  if (t->kind != TermKind::App || !is_const(t->a)) return nullptr;
  const TermPtr& inner = t->b;
  if (inner->kind != TermKind::App || inner->a->kind != TermKind::App ||
      !is_const(inner->a->a))
    return nullptr;
  auto it = tab.rules.find(UniverseTable::key(t->a->name, inner->a->a->name));
  if (it == tab.rules.end()) return nullptr;
  A = inner->a->b;
  B = inner->b;
  return &it->second;
}

const UniverseTable::AxiomEntry* axiom_redex(const UniverseTable& tab,
                                             const TermPtr& t) {
  if (t->kind != TermKind::App || !is_const(t->a) || !is_const(t->b)) return nullptr;
  auto it = tab.axioms.find(UniverseTable::key(t->a->name, t->b->name));
  if (it == tab.axioms.end()) return nullptr;
  return &it->second;
}

// The contracted product: !x:(e1 A). e2 (B x), with B lifted under the
// new binder.
TermPtr expanded_product(const UniverseTable::RuleEntry& e, const TermPtr& A,
                         const TermPtr& B) {
  return mk_pi(mk_app(mk_const(e.eps_dom), A),
               mk_app(mk_const(e.eps_cod), mk_app(lift(B, 1), mk_var(0))), "x");
}

void dedup(std::vector<TermPtr>& v) {
  std::unordered_set<std::string> seen;
  std::vector<TermPtr> out;
  out.reserve(v.size());
  for (auto& t : v)
    if (seen.insert(term_key(t)).second) out.push_back(std::move(t));
  v = std::move(out);
}

std::vector<TermPtr> par_enum(const UniverseTable& tab, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
    case TermKind::Const:
      return {t};
    case TermKind::Pi:
    case TermKind::Lam: {
      auto as = par_enum(tab, t->a);
      auto bs = par_enum(tab, t->b);
      std::vector<TermPtr> out;
      out.reserve(as.size() * bs.size());
      for (const auto& a : as)
        for (const auto& b : bs)
          out.push_back(t->kind == TermKind::Pi ? mk_pi(a, b, t->name)
                                                : mk_lam(a, b, t->name));
      return out;
    }
    case TermKind::App: {
      auto fs = par_enum(tab, t->a);
      auto ns = par_enum(tab, t->b);
      std::vector<TermPtr> out;
      for (const auto& f : fs)
        for (const auto& n : ns) out.push_back(mk_app(f, n));
      if (t->a->kind == TermKind::Lam) {
        auto ms = par_enum(tab, t->a->b);
        for (const auto& m : ms)
          for (const auto& n : ns) out.push_back(subst(m, n));
      }
      if (const auto* ax = axiom_redex(tab, t)) out.push_back(mk_const(ax->u));
      TermPtr A, B;
      if (const auto* re = rule_redex(tab, t, A, B)) {
        auto as = par_enum(tab, A);
        auto bs = par_enum(tab, B);
        for (const auto& a : as)
          for (const auto& b : bs) out.push_back(expanded_product(*re, a, b));
      }
      dedup(out);
      return out;
    }
  }
  return {t};
}

}  // namespace

Result<std::vector<TermPtr>> par_step_enumerate(const UniverseTable& tab,
                                                const TermPtr& t, int size_cap) {
  if (term_size(t) > size_cap)
    return Diag(DiagCode::Unsupported,
                "parallel-step enumeration is limited to terms of size " +
                    std::to_string(size_cap));
  return par_enum(tab, t);
}

TermPtr complete_development(const UniverseTable& tab, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
    case TermKind::Const:
      return t;
    case TermKind::Pi:
      return mk_pi(complete_development(tab, t->a), complete_development(tab, t->b),
                   t->name);
    case TermKind::Lam:
      return mk_lam(complete_development(tab, t->a), complete_development(tab, t->b),
                    t->name);
    case TermKind::App: {
      if (const auto* ax = axiom_redex(tab, t)) return mk_const(ax->u);
      TermPtr A, B;
      if (const auto* re = rule_redex(tab, t, A, B))
        return expanded_product(*re, complete_development(tab, A),
                                complete_development(tab, B));
      if (t->a->kind == TermKind::Lam)
        return subst(complete_development(tab, t->a->b),
                     complete_development(tab, t->b));
      return mk_app(complete_development(tab, t->a), complete_development(tab, t->b));
    }
  }
  return t;
}

namespace {

void one_step_into(const RewriteSystem& rs, const TermPtr& t, bool include_beta,
                   std::vector<TermPtr>& out) {
  // steps at this position
  if (include_beta && t->kind == TermKind::App && t->a->kind == TermKind::Lam)
    out.push_back(subst(t->a->b, t->b));
  for (const auto& r : rs.rules) {
    Substitution binds(r.pattern_ctx.size());
    // local syntactic match, every rule considered
    struct M {
      static bool run(const TermPtr& pat, const TermPtr& s, Substitution& b) {
        switch (pat->kind) {
          case TermKind::Var:
            b[pat->index] = s;
            return true;
          case TermKind::Const:
            return s->kind == TermKind::Const && s->name == pat->name;
          case TermKind::App:
            return s->kind == TermKind::App && run(pat->a, s->a, b) &&
                   run(pat->b, s->b, b);
          default:
            return false;
        }
      }
    };
    if (M::run(r.lhs, t, binds)) out.push_back(subst_multi(r.rhs, binds));
  }
  // steps inside
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
    case TermKind::Const:
      return;
    case TermKind::Pi:
    case TermKind::Lam: {
      std::vector<TermPtr> sub;
      one_step_into(rs, t->a, include_beta, sub);
      for (const auto& s : sub)
        out.push_back(t->kind == TermKind::Pi ? mk_pi(s, t->b, t->name)
                                              : mk_lam(s, t->b, t->name));
      sub.clear();
      one_step_into(rs, t->b, include_beta, sub);
      for (const auto& s : sub)
        out.push_back(t->kind == TermKind::Pi ? mk_pi(t->a, s, t->name)
                                              : mk_lam(t->a, s, t->name));
      return;
    }
    case TermKind::App: {
      std::vector<TermPtr> sub;
      one_step_into(rs, t->a, include_beta, sub);
      for (const auto& s : sub) out.push_back(mk_app(s, t->b));
      sub.clear();
      one_step_into(rs, t->b, include_beta, sub);
      for (const auto& s : sub) out.push_back(mk_app(t->a, s));
      return;
    }
  }
}

}  // namespace

std::vector<TermPtr> enumerate_one_step(const RewriteSystem& rs, const TermPtr& t,
                                        bool include_beta) {
  std::vector<TermPtr> out;
  one_step_into(rs, t, include_beta, out);
  dedup(out);
  return out;
}

std::vector<TermPtr> enumerate_beta_steps(const TermPtr& t) {
  static const RewriteSystem empty;
  return enumerate_one_step(empty, t, true);
}

SearchOutcome reachable_by_steps(const RewriteSystem& rs, const TermPtr& from,
                                 const TermPtr& target, int max_depth, int node_cap) {
  const std::string want = term_key(target);
  if (term_key(from) == want) return SearchOutcome::Found;
  std::unordered_set<std::string> visited{term_key(from)};
  std::deque<std::pair<TermPtr, int>> queue{{from, 0}};
  while (!queue.empty()) {
    auto [cur, depth] = queue.front();
    queue.pop_front();
    if (depth >= max_depth) continue;
    for (const auto& next : enumerate_one_step(rs, cur, true)) {
      std::string k = term_key(next);
      if (k == want) return SearchOutcome::Found;
      if (!visited.insert(std::move(k)).second) continue;
      if (static_cast<int>(visited.size()) > node_cap)
        return SearchOutcome::BudgetExhausted;
      queue.emplace_back(next, depth + 1);
    }
  }
  return SearchOutcome::Absent;
}

}  // namespace lpm
