// Apparatus for checking the diamond property of the generated rewrite
// systems: a parallel step relation that contracts any set of redexes at
// once, its complete development (contract everything), and single-step
// enumeration with a bounded reachability search for relating the two.

#ifndef LPM_PARLAB_H
#define LPM_PARLAB_H

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lpm/diag.h"
#include "lpm/kernel.h"
#include "lpm/term.h"

namespace lpm {

// Names of the universe constants of a generated signature, keyed so the
// parallel-step rules can recognize their redexes without consulting the
// source specification.
struct UniverseTable {
  struct AxiomEntry {
    std::string u;  // decoder applied to the sort constant rewrites to this
  };
  struct RuleEntry {
    std::string eps_dom;  // decoder for the domain side
    std::string eps_cod;  // decoder for the codomain side
  };
  // key: decoder name + '\n' + sort-constant name
  std::unordered_map<std::string, AxiomEntry> axioms;
  // key: decoder name + '\n' + product-constructor name
  std::unordered_map<std::string, RuleEntry> rules;

  static std::string key(const std::string& outer, const std::string& inner) {
    return outer + "\n" + inner;
  }
};

// Recovers the table from an arbitrary signature by matching each rewrite
// rule against the two shapes a generated embedding produces. Returns
// nullopt when some rule has a different shape.
std::optional<UniverseTable> infer_universe_table(const RewriteSystem& rs);

// All terms reachable from t by one parallel step: every subset of the
// visible redexes may be contracted, including none (the step is
// reflexive). Defined only for terms up to the size cap; larger inputs
// are refused so the enumeration stays tractable.
constexpr int kParStepSizeCap = 14;
Result<std::vector<TermPtr>> par_step_enumerate(const UniverseTable& tab,
                                                const TermPtr& t,
                                                int size_cap = kParStepSizeCap);

// The complete development: contracts every visible redex, innermost
// results substituted through outer beta redexes.
TermPtr complete_development(const UniverseTable& tab, const TermPtr& t);

// All single-step reducts of t: beta steps and rewrite-rule steps at every
// position, each applied once, syntactically.
std::vector<TermPtr> enumerate_one_step(const RewriteSystem& rs, const TermPtr& t,
                                        bool include_beta = true);

// Beta-only variant usable on either side of the embedding.
std::vector<TermPtr> enumerate_beta_steps(const TermPtr& t);

enum class SearchOutcome { Found, Absent, BudgetExhausted };

// Breadth-first search over single steps: is `target` reachable from
// `from` in at most max_depth steps? Absent is only reported when the
// whole reachable set within the depth bound was explored; running into
// the node cap yields BudgetExhausted instead.
SearchOutcome reachable_by_steps(const RewriteSystem& rs, const TermPtr& from,
                                 const TermPtr& target, int max_depth,
                                 int node_cap = 200000);

}  // namespace lpm

#endif  // LPM_PARLAB_H
