// Proof-checking kernel for the lambda-Pi calculus modulo a first-order
// rewrite system. Conversion is beta plus the signature's rewrite rules,
// decided by alternating weak-head normalization under a fuel budget.
// A restricted mode drops the Kind-level abstraction rule and removes
// beta from conversion, leaving rewriting only.

#ifndef LPM_KERNEL_H
#define LPM_KERNEL_H

#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lpm/diag.h"
#include "lpm/term.h"

namespace lpm {

struct SigEntry {
  std::string name;
  TermPtr type;  // closed lambda-Pi term referencing earlier constants
};

struct Signature {
  std::vector<SigEntry> entries;

  // Appends a declaration; fails on a duplicate name.
  bool push(const std::string& name, TermPtr type);
  const TermPtr* lookup(const std::string& name) const;

 private:
  std::unordered_map<std::string, int> index_;
};

// A rewrite rule [pattern_ctx] lhs --> rhs : type. The pattern variables
// are the context slots; lhs must be a left-linear first-order pattern
// headed by a constant.
struct RewriteRule {
  Context pattern_ctx;
  TermPtr lhs;
  TermPtr rhs;
  TermPtr type;
  std::optional<SourceSpan> span;
};

// Rules with a per-head index so head-position matching can try candidate
// rules in declaration order without scanning everything.
struct RewriteSystem {
  std::vector<RewriteRule> rules;

  RewriteSystem() = default;
  explicit RewriteSystem(std::vector<RewriteRule> rs);

  struct HeadEntry {
    int rule = 0;   // index into rules
    int arity = 0;  // number of arguments in the lhs spine
  };
  // head constant name -> entries in declaration order
  std::unordered_map<std::string, std::vector<HeadEntry>> by_head;
};

struct KernelOpts {
  // Restricted mode: reject Kind-level abstractions and decide conversion
  // by rewriting alone, without beta.
  bool lambda_pi_minus = false;
  // When set, conversion logs each weak-head step here.
  std::ostream* trace = nullptr;
};

// Validates one rule against the signature: both sides type-check in plain
// lambda-Pi (no rewriting in conversion) at the declared type, both sides
// are beta-normal, and the lhs is a left-linear constant-headed pattern.
Check check_rule(const Signature& sig, const RewriteRule& rule);

// Validates declaration well-formedness: unique names, each type a valid
// type or kind over the preceding prefix.
Check check_signature(const Signature& sig);

struct RewriteStep {
  TermPtr reduct;
  int rule = 0;  // index of the rule applied
};

// One purely syntactic rewrite step at the leftmost-outermost matching
// position, trying rules in declaration order; nullopt when no rule
// matches anywhere.
std::optional<RewriteStep> rewrite_step(const RewriteSystem& rs, const TermPtr& t);

// One syntactic step of beta or a rule, leftmost-outermost. Beta and rule
// redexes never overlap (their heads differ), so the priority between the
// two is immaterial.
std::optional<TermPtr> betaR_step(const RewriteSystem& rs, const TermPtr& t,
                                  bool include_beta = true);

// Weak-head normalization modulo beta and the rewrite rules. Rule
// matching normalizes candidate subterms on demand, so a match is found
// whenever one exists up to conversion (complete for confluent and
// terminating systems).
Result<TermPtr> betaR_whnf(const RewriteSystem& rs, const TermPtr& t, Fuel& fuel,
                           const KernelOpts& opts = {});

// Full normalization: weak-head first, then components.
Result<TermPtr> betaR_normalize(const RewriteSystem& rs, const TermPtr& t, Fuel& fuel,
                                const KernelOpts& opts = {});

struct ConversionOutcome {
  bool convertible = false;
  long long fuel_spent = 0;
};

// Decides conversion by alternating weak-head normalization and
// structural descent. Fuel exhaustion is reported as an error, never as
// a plain "no".
Result<ConversionOutcome> convertible(const RewriteSystem& rs, const TermPtr& a,
                                      const TermPtr& b, Fuel& fuel,
                                      const KernelOpts& opts = {});

// Type inference for lambda-Pi modulo. Sorts are Type and Kind; contexts
// hold types over the signature; conversion at applications is modulo the
// rewrite system. Kind itself has no type.
Result<TermPtr> lpm_infer(const Signature& sig, const RewriteSystem& rs,
                          const Context& ctx, const TermPtr& t, Fuel& fuel,
                          const KernelOpts& opts = {});
Result<TermPtr> lpm_infer(const Signature& sig, const RewriteSystem& rs,
                          const Context& ctx, const TermPtr& t,
                          long long fuel = kDefaultJudgmentFuel,
                          const KernelOpts& opts = {});

Check lpm_check(const Signature& sig, const RewriteSystem& rs, const Context& ctx,
                const TermPtr& t, const TermPtr& expected, Fuel& fuel,
                const KernelOpts& opts = {});
Check lpm_check(const Signature& sig, const RewriteSystem& rs, const Context& ctx,
                const TermPtr& t, const TermPtr& expected,
                long long fuel = kDefaultJudgmentFuel, const KernelOpts& opts = {});

// True when t contains no beta redex and no rule matches anywhere.
bool is_betaR_normal(const RewriteSystem& rs, const TermPtr& t);

}  // namespace lpm

#endif  // LPM_KERNEL_H
