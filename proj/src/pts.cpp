#include "lpm/pts.h"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "lpm/syntax.h"

namespace lpm {

bool PtsSpec::has_sort(const std::string& s) const {
  return std::find(sorts.begin(), sorts.end(), s) != sorts.end();
}

std::optional<std::string> PtsSpec::axiom_sort(const std::string& s1) const {
  for (const auto& [a, b] : axioms)
    if (a == s1) return b;
  return std::nullopt;
}

std::optional<std::array<std::string, 3>> PtsSpec::rule_for(
    const std::string& s1, const std::string& s2) const {
  for (const auto& r : rules)
    if (r[0] == s1 && r[1] == s2) return r;
  return std::nullopt;
}

bool PtsSpec::is_top_sort(const std::string& s) const {
  return !axiom_sort(s).has_value();
}

SpecValidation validate_spec(const PtsSpec& spec) {
  SpecValidation v;
  std::set<std::string> seen;
  for (const auto& s : spec.sorts) {
    if (!seen.insert(s).second)
      v.violations.push_back("duplicate sort '" + s + "'");
    if (s.empty()) v.violations.push_back("empty sort name");
  }
  std::set<std::string> axiom_lhs;
  for (const auto& [a, b] : spec.axioms) {
    if (!spec.has_sort(a) || !spec.has_sort(b))
      v.violations.push_back("axiom (" + a + ", " + b + ") uses an undeclared sort");
    if (!axiom_lhs.insert(a).second)
      v.violations.push_back("two axioms for sort '" + a + "': not functional");
  }
  std::set<std::pair<std::string, std::string>> rule_lhs;
  for (const auto& r : spec.rules) {
    if (!spec.has_sort(r[0]) || !spec.has_sort(r[1]) || !spec.has_sort(r[2]))
      v.violations.push_back("rule (" + r[0] + ", " + r[1] + ", " + r[2] +
                             ") uses an undeclared sort");
    if (!rule_lhs.insert({r[0], r[1]}).second)
      v.violations.push_back("two rules for (" + r[0] + ", " + r[1] +
                             ", _): not functional");
  }
  return v;
}

std::optional<TermPtr> pts_beta_step(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
    case TermKind::Const:
      return std::nullopt;
    case TermKind::Pi:
    case TermKind::Lam: {
      if (auto a = pts_beta_step(t->a))
        return t->kind == TermKind::Pi ? mk_pi(*a, t->b, t->name)
                                       : mk_lam(*a, t->b, t->name);
      if (auto b = pts_beta_step(t->b))
        return t->kind == TermKind::Pi ? mk_pi(t->a, *b, t->name)
                                       : mk_lam(t->a, *b, t->name);
      return std::nullopt;
    }
    case TermKind::App: {
      if (t->a->kind == TermKind::Lam) return subst(t->a->b, t->b);
      if (auto f = pts_beta_step(t->a)) return mk_app(*f, t->b);
      if (auto u = pts_beta_step(t->b)) return mk_app(t->a, *u);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool is_beta_normal(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
    case TermKind::Const:
      return true;
    case TermKind::Pi:
    case TermKind::Lam:
      return is_beta_normal(t->a) && is_beta_normal(t->b);
    case TermKind::App:
      return t->a->kind != TermKind::Lam && is_beta_normal(t->a) &&
             is_beta_normal(t->b);
  }
  return true;
}

Result<TermPtr> pts_normalize(const TermPtr& t, Fuel& fuel) {
  TermPtr cur = t;
  long long steps = 0;
  while (auto next = pts_beta_step(cur)) {
    if (!fuel.spend()) {
      return Diag(DiagCode::FuelExhausted,
                  "beta normalization ran out of fuel after " +
                      std::to_string(steps) + " steps; last reduct: " +
                      print_term(cur));
    }
    cur = *next;
    ++steps;
  }
  return cur;
}

Result<TermPtr> pts_normalize(const TermPtr& t, long long fuel) {
  Fuel f(fuel);
  return pts_normalize(t, f);
}

Check pts_conv(const TermPtr& a, const TermPtr& b, Fuel& fuel) {
  if (alpha_eq(a, b)) return Ok{};
  auto na = pts_normalize(a, fuel);
  if (!na) return na.error();
  auto nb = pts_normalize(b, fuel);
  if (!nb) return nb.error();
  if (alpha_eq(na.value(), nb.value())) return Ok{};
  return Diag(DiagCode::TypeMismatch, "terms are not beta-convertible: " +
                                          print_term(na.value()) + " vs " +
                                          print_term(nb.value()));
}

namespace {

// Weak head normalization by beta; enough to expose Pi in application
// positions without normalizing the whole tree.
Result<TermPtr> whnf_beta(TermPtr t, Fuel& fuel) {
  for (;;) {
    if (t->kind != TermKind::App) return t;
    auto f = whnf_beta(t->a, fuel);
    if (!f) return f;
    if (f.value()->kind == TermKind::Lam) {
      if (!fuel.spend())
        return Diag(DiagCode::FuelExhausted, "head normalization ran out of fuel");
      t = subst(f.value()->b, t->b);
    } else {
      return f.value() == t->a ? t : mk_app(f.value(), t->b);
    }
  }
}

struct PtsChecker {
  const PtsSpec& spec;
  Fuel& fuel;

  std::string pr(const Context& ctx, const TermPtr& t) const {
    return print_term_in(t, ctx);
  }

  // ------------------------------------------------------------------
  //   ctx |- type : B    nf(B) = s    s a declared sort
  // ------------------------------------------------------------------
  Result<std::string> sort_of_type(const Context& ctx, const TermPtr& type) {
    auto b = infer(ctx, type);
    if (!b) return b.error();
    auto nb = pts_normalize(b.value(), fuel);
    if (!nb) return nb.error();
    const TermPtr& s = nb.value();
    if (s->kind == TermKind::Sort && s->sort.kind == SortKind::PtsSort)
      return s->sort.name;
    return Diag(DiagCode::NotAType,
                pr(ctx, type) + " is not a type: its type " + pr(ctx, s) +
                    " is not a sort");
  }

  Result<TermPtr> infer(const Context& ctx, const TermPtr& t) {
    switch (t->kind) {
      // --------------------------------------------- (s1, s2) an axiom
      //   ctx |- s1 : s2
      case TermKind::Sort: {
        if (t->sort.kind != SortKind::PtsSort)
          return Diag(DiagCode::NotTypable,
                      "lambda-Pi sort inside a pure-type-system term");
        if (!spec.has_sort(t->sort.name))
          return Diag(DiagCode::UnknownSortName,
                      "sort '" + t->sort.name + "' is not declared");
        if (auto s2 = spec.axiom_sort(t->sort.name)) return mk_pts_sort(*s2);
        return Diag(DiagCode::UntypableSort,
                    "top sort '" + t->sort.name + "' has no type");
      }

      // ---------------------------------------------- x : A among ctx
      //   ctx |- x : A
      case TermKind::Var: {
        int m = static_cast<int>(ctx.size());
        if (t->index >= m)
          return Diag(DiagCode::NotTypable,
                      "unbound variable (index " + std::to_string(t->index) + ")");
        return lift(ctx[m - 1 - t->index].type, t->index + 1);
      }

      case TermKind::Const:
        return Diag(DiagCode::NotTypable,
                    "unknown identifier '" + t->name +
                        "' (pure-type-system terms have no constants)");

      //   ctx |- A : s1    ctx, x:A |- B : s2    (s1, s2, s3) a rule
      // ----------------------------------------------------------------
      //   ctx |- (!x:A. B) : s3
      case TermKind::Pi: {
        auto s1 = sort_of_type(ctx, t->a);
        if (!s1) return s1.error();
        Context inner = ctx;
        inner.push_back({t->name, t->a});
        auto s2 = sort_of_type(inner, t->b);
        if (!s2) return s2.error();
        auto rule = spec.rule_for(s1.value(), s2.value());
        if (!rule)
          return Diag(DiagCode::NotTypable,
                      "no product rule (" + s1.value() + ", " + s2.value() +
                          ", _) for " + pr(ctx, t));
        return mk_pts_sort((*rule)[2]);
      }

      //   ctx |- A : s1    ctx, x:A |- t : B    ctx, x:A |- B : s2
      //   (s1, s2, s3) a rule
      // ----------------------------------------------------------------
      //   ctx |- (\x:A. t) : !x:A. B
      case TermKind::Lam: {
        auto s1 = sort_of_type(ctx, t->a);
        if (!s1) return s1.error();
        Context inner = ctx;
        inner.push_back({t->name, t->a});
        auto tb = infer(inner, t->b);
        if (!tb) return tb.error();
        auto s2 = sort_of_type(inner, tb.value());
        if (!s2) return s2.error();
        if (!spec.rule_for(s1.value(), s2.value()))
          return Diag(DiagCode::NotTypable,
                      "no product rule (" + s1.value() + ", " + s2.value() +
                          ", _) for the type of " + pr(ctx, t));
        return mk_pi(t->a, tb.value(), t->name);
      }

      //   ctx |- t : !x:A. B    ctx |- u : A' with A' =beta= A
      // ----------------------------------------------------------------
      //   ctx |- t u : (u/x)B
      case TermKind::App: {
        auto tf = infer(ctx, t->a);
        if (!tf) return tf.error();
        auto pi = whnf_beta(tf.value(), fuel);
        if (!pi) return pi.error();
        if (pi.value()->kind != TermKind::Pi)
          return Diag(DiagCode::NotTypable,
                      "application of a non-function: " + pr(ctx, t->a) +
                          " has type " + pr(ctx, pi.value()));
        auto tu = infer(ctx, t->b);
        if (!tu) return tu.error();
        auto conv = pts_conv(tu.value(), pi.value()->a, fuel);
        if (!conv) {
          if (conv.error().code == DiagCode::FuelExhausted) return conv.error();
          return Diag(DiagCode::TypeMismatch,
                      "argument " + pr(ctx, t->b) + " has type " +
                          pr(ctx, tu.value()) + " but the function expects " +
                          pr(ctx, pi.value()->a));
        }
        return subst(pi.value()->b, t->b);
      }
    }
    throw std::logic_error("pts infer: bad kind");
  }

  Check validate_context(const Context& ctx) {
    Context prefix;
    for (const auto& e : ctx) {
      auto s = sort_of_type(prefix, e.type);
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

Result<TermPtr> pts_infer(const PtsSpec& spec, const Context& ctx, const TermPtr& t,
                          Fuel& fuel) {
  PtsChecker ck{spec, fuel};
  auto v = ck.validate_context(ctx);
  if (!v) return v.error();
  return ck.infer(ctx, t);
}

Result<TermPtr> pts_infer(const PtsSpec& spec, const Context& ctx, const TermPtr& t,
                          long long fuel) {
  Fuel f(fuel);
  return pts_infer(spec, ctx, t, f);
}

Check pts_check(const PtsSpec& spec, const Context& ctx, const TermPtr& t,
                const TermPtr& expected, Fuel& fuel) {
  PtsChecker ck{spec, fuel};
  auto v = ck.validate_context(ctx);
  if (!v) return v.error();
  bool expected_is_top_sort =
      expected->kind == TermKind::Sort && expected->sort.kind == SortKind::PtsSort &&
      spec.has_sort(expected->sort.name) && spec.is_top_sort(expected->sort.name);
  if (!expected_is_top_sort) {
    auto s = ck.sort_of_type(ctx, expected);
    if (!s) {
      Diag d = s.error();
      d.message = "expected type is not well formed: " + d.message;
      return d;
    }
  }
  auto b = ck.infer(ctx, t);
  if (!b) return b.error();
  auto conv = pts_conv(b.value(), expected, fuel);
  if (!conv) {
    if (conv.error().code == DiagCode::FuelExhausted) return conv.error();
    return Diag(DiagCode::TypeMismatch,
                "subject has type " + print_term_in(b.value(), ctx) +
                    " which is not convertible to " + print_term_in(expected, ctx));
  }
  return Ok{};
}

Check pts_check(const PtsSpec& spec, const Context& ctx, const TermPtr& t,
                const TermPtr& expected, long long fuel) {
  Fuel f(fuel);
  return pts_check(spec, ctx, t, expected, f);
}

Result<std::string> pts_sort_of(const PtsSpec& spec, const Context& ctx,
                                const TermPtr& type, Fuel& fuel) {
  PtsChecker ck{spec, fuel};
  return ck.sort_of_type(ctx, type);
}

}  // namespace lpm
