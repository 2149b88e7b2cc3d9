// Pure type system engine: sorted specifications (sorts, axioms, product
// rules), beta reduction, and a type checker whose conversion test is
// fuel-bounded normalization plus syntactic comparison. Only functional
// specifications are accepted, so inferred types are unique up to beta.

#ifndef LPM_PTS_H
#define LPM_PTS_H

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpm/diag.h"
#include "lpm/term.h"

namespace lpm {

struct PtsSpec {
  std::string name;
  std::vector<std::string> sorts;  // declaration order, duplicates rejected
  std::vector<std::pair<std::string, std::string>> axioms;     // (s1, s2)
  std::vector<std::array<std::string, 3>> rules;               // (s1, s2, s3)

  bool has_sort(const std::string& s) const;
  // The unique s2 with (s1, s2) an axiom, if any. Meaningful on validated
  // specs; on unvalidated input it returns the first match.
  std::optional<std::string> axiom_sort(const std::string& s1) const;
  std::optional<std::array<std::string, 3>> rule_for(const std::string& s1,
                                                     const std::string& s2) const;
  // Sorts that appear on the left of no axiom have no type themselves.
  bool is_top_sort(const std::string& s) const;
};

struct SpecValidation {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks sort-name uniqueness, membership of axiom/rule components, and
// functionality: at most one axiom per s1 and one rule per (s1, s2).
SpecValidation validate_spec(const PtsSpec& spec);

// One leftmost-outermost beta step, or nullopt when t is beta-normal.
std::optional<TermPtr> pts_beta_step(const TermPtr& t);

// Full beta normalization under the fuel budget; each contraction spends
// one unit.
Result<TermPtr> pts_normalize(const TermPtr& t, Fuel& fuel);
Result<TermPtr> pts_normalize(const TermPtr& t, long long fuel = kDefaultPtsConversionFuel);

bool is_beta_normal(const TermPtr& t);

// Beta-conversion by normalize-and-compare. Complete for terms that
// normalize within fuel; exhaustion is reported as its own outcome.
Check pts_conv(const TermPtr& a, const TermPtr& b, Fuel& fuel);

// Type inference for a validated spec. Subjects that are top sorts fail
// with untypable-sort. The context is validated first: every entry type
// must itself infer to a sort.
Result<TermPtr> pts_infer(const PtsSpec& spec, const Context& ctx, const TermPtr& t,
                          Fuel& fuel);
Result<TermPtr> pts_infer(const PtsSpec& spec, const Context& ctx, const TermPtr& t,
                          long long fuel = kDefaultJudgmentFuel);

// Checks t against an expected type (a well-formed type or a top sort),
// comparing the inferred type up to beta.
Check pts_check(const PtsSpec& spec, const Context& ctx, const TermPtr& t,
                const TermPtr& expected, Fuel& fuel);
Check pts_check(const PtsSpec& spec, const Context& ctx, const TermPtr& t,
                const TermPtr& expected, long long fuel = kDefaultJudgmentFuel);

// Infers the sort of a type: infer, normalize, and insist on a sort node.
Result<std::string> pts_sort_of(const PtsSpec& spec, const Context& ctx,
                                const TermPtr& type, Fuel& fuel);

}  // namespace lpm

#endif  // LPM_PTS_H
