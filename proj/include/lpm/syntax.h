// Surface syntax shared by every tool:
//
//   term      := '!' IDENT ':' annot '.' term         dependent product
//              | '\' IDENT ':' annot '.' term         abstraction
//              | arrow
//   arrow     := app ('->' term)?                     right associative
//   annot     := arrow                                binders need parens
//   app       := atom atom*
//   atom      := IDENT | '(' term ')'
//
// 'Type' and 'Kind' are keyword atoms. '#' starts a line comment.
// Signature files hold three statement forms, each '.'-terminated:
//
//   name : term .                                     declaration
//   [x:A, y:B] lhs --> rhs : T .                      rewrite rule
//   [x:A, y:B] |- t : A .                             judgment
//
// Specification files use labelled sections:
//
//   sorts: Type Kind
//   axioms: (Type, Kind)
//   rules: (Type, Type, Type)
//   default_sort: Type

#ifndef LPM_SYNTAX_H
#define LPM_SYNTAX_H

#include <optional>
#include <string>
#include <vector>

#include "lpm/diag.h"
#include "lpm/kernel.h"
#include "lpm/pts.h"
#include "lpm/term.h"

namespace lpm {

struct Judgment {
  Context ctx;
  TermPtr subject;
  TermPtr type;  // null when the judgment was written without a type
  SourceSpan span;
};

struct SigFile {
  Signature signature;
  std::vector<RewriteRule> rules;
  std::vector<Judgment> judgments;
};

struct SpecFile {
  PtsSpec spec;
  std::optional<std::string> default_sort;
};

// Identifiers that are neither binders in scope nor the keywords parse as
// constants; binder-bound names parse as variables.
Result<TermPtr> parse_term(const std::string& src,
                           const std::string& filename = "<string>");
Result<TermPtr> parse_term_in(const std::string& src,
                              const std::vector<std::string>& scope,
                              const std::string& filename = "<string>");

// A comma-separated context, e.g. "nat:Type, c:nat" (no brackets).
Result<Context> parse_context(const std::string& src,
                              const std::string& filename = "<string>");

Result<SigFile> parse_signature(const std::string& src, const std::string& filename);
Result<SigFile> load_signature(const std::string& path);

Result<SpecFile> parse_spec(const std::string& src, const std::string& filename);
Result<SpecFile> load_spec(const std::string& path);

// Printing. Round-trips with the parser: parse(print(t)) is t up to
// binder display hints, which the printer freshens against everything in
// scope. Non-dependent products print as arrows.
std::string print_term(const TermPtr& t);
std::string print_term(const TermPtr& t, const std::vector<std::string>& ambient);
std::string print_term_in(const TermPtr& t, const Context& ctx);
std::string print_context(const Context& ctx);
std::string print_rule(const RewriteRule& r);
std::string print_judgment(const Judgment& j);
std::string print_signature(const Signature& sig, const RewriteSystem& rs);
std::string print_spec(const SpecFile& f);

// Rewrites keyword sorts and identifiers naming declared sorts into sort
// nodes of the given specification; everything else is untouched.
Result<TermPtr> resolve_pts_sorts(const TermPtr& t, const PtsSpec& spec);
Result<Context> resolve_pts_context(const Context& ctx, const PtsSpec& spec);
Result<Judgment> resolve_pts_judgment(const Judgment& j, const PtsSpec& spec);

}  // namespace lpm

#endif  // LPM_SYNTAX_H
