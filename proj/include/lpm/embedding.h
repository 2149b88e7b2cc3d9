// Embedding of a functional pure type system into the lambda-Pi kernel:
// generates a signature with universe codes and decoders plus the rewrite
// rules that let decoded codes unfold to real products, translates terms
// and types across, and extracts inhabitants back out of normal proofs.

#ifndef LPM_EMBEDDING_H
#define LPM_EMBEDDING_H

#include <array>
#include <optional>
#include <string>
#include <unordered_map>

#include "lpm/diag.h"
#include "lpm/kernel.h"
#include "lpm/parlab.h"
#include "lpm/pts.h"
#include "lpm/term.h"

namespace lpm {

struct EmbeddingConfig {
  PtsSpec spec;
  // The sort that both lambda-Pi sorts collapse to under back translation.
  std::string default_sort;

  std::string u_name(const std::string& s) const { return "U_" + s; }
  std::string eps_name(const std::string& s) const { return "eps_" + s; }
  std::string dot_name(const std::string& s) const { return "dot_" + s; }
  std::string dotpi_name(const std::array<std::string, 3>& r) const {
    return "dotPi_" + r[0] + "_" + r[1] + "_" + r[2];
  }
};

enum class ConstRole { U, Eps, Dot, DotPi };

struct ConstInfo {
  ConstRole role;
  std::array<std::string, 3> sorts;  // [0] for U/Eps/Dot; all three for DotPi
};

struct GeneratedEmbedding {
  EmbeddingConfig config;
  Signature signature;
  RewriteSystem rewrites;
  std::unordered_map<std::string, ConstInfo> roles;

  const ConstInfo* role_of(const TermPtr& t) const;
};

// Validates the sort table and produces the signature and rules. With
// an empty default_sort, "Type" is used when declared, otherwise the first
// sort. Fails when the naming scheme collides with itself (possible only
// for adversarial sort names containing underscores).
Result<GeneratedEmbedding> generate_embedding(const PtsSpec& spec,
                                              const std::string& default_sort = "");

// The redex table the parallel-step laboratory consumes.
UniverseTable universe_table(const GeneratedEmbedding& emb);

// Term translation: sorts become their codes, products become applied
// product codes, binder annotations get decoded. Requires a well-typed
// subject; inference runs alongside the translation.
Result<TermPtr> translate_term(const GeneratedEmbedding& emb, const Context& pts_ctx,
                               const TermPtr& t, Fuel& fuel);
Result<TermPtr> translate_term(const GeneratedEmbedding& emb, const Context& pts_ctx,
                               const TermPtr& t,
                               long long fuel = kDefaultJudgmentFuel);

// Type translation: a type of sort s becomes its decoded code, a top sort
// becomes its universe.
Result<TermPtr> translate_type(const GeneratedEmbedding& emb, const Context& pts_ctx,
                               const TermPtr& type, Fuel& fuel);
Result<TermPtr> translate_type(const GeneratedEmbedding& emb, const Context& pts_ctx,
                               const TermPtr& type,
                               long long fuel = kDefaultJudgmentFuel);

Result<Context> translate_context(const GeneratedEmbedding& emb, const Context& pts_ctx,
                                  Fuel& fuel);
Result<Context> translate_context(const GeneratedEmbedding& emb, const Context& pts_ctx,
                                  long long fuel = kDefaultJudgmentFuel);

// Total syntactic back translation. Codes and universes become their
// sorts, decoders vanish, applied product codes become products. Bare
// decoders and product codes (which a translation image never contains)
// map to the evident identity and product-former lambdas so the function
// stays total.
TermPtr back_translate(const GeneratedEmbedding& emb, const TermPtr& t);

// A term is weak-eta-long when every product-code constant is applied to
// at least its two code arguments.
bool is_weak_eta_long(const GeneratedEmbedding& emb, const TermPtr& t);

// Wraps under-applied product codes in lambdas; identity on terms that
// are already weak-eta-long, and never creates a beta redex.
TermPtr weak_eta_expand(const GeneratedEmbedding& emb, const TermPtr& t);

struct ExtractReport {
  TermPtr witness;        // back translation, beta-normalized
  bool pts_ok = false;    // witness checks against the requested type
  bool conv_ok = false;   // the witness's translation converts back to the input
  std::optional<Diag> failure;
};

// For a beta-R-normal, weak-eta-long proof t of the translated type of A:
// back translate, beta-normalize, then verify the witness both inhabits A
// and translates to something convertible with t.
ExtractReport extract_report(const GeneratedEmbedding& emb, const Context& pts_ctx,
                             const TermPtr& A, const TermPtr& t, Fuel& fuel);

Result<TermPtr> extract_inhabitant(const GeneratedEmbedding& emb, const Context& pts_ctx,
                                   const TermPtr& A, const TermPtr& t, Fuel& fuel);
Result<TermPtr> extract_inhabitant(const GeneratedEmbedding& emb, const Context& pts_ctx,
                                   const TermPtr& A, const TermPtr& t,
                                   long long fuel = kDefaultJudgmentFuel);

struct InhabitationReport {
  Context translated_ctx;
  TermPtr translated_type;
  TermPtr normal_form;  // beta-R normal form of the candidate
  TermPtr expanded;     // its weak-eta-long form
  ExtractReport extract;
  bool inhabited() const { return extract.pts_ok; }
  bool ok() const { return extract.pts_ok && extract.conv_ok; }
};

// The whole pipeline for one inhabitation problem: check the candidate
// proof against the translated type, normalize, eta-expand, extract.
Result<InhabitationReport> check_inhabitation_theorem(const GeneratedEmbedding& emb,
                                                      const Context& pts_ctx,
                                                      const TermPtr& A,
                                                      const TermPtr& candidate,
                                                      Fuel& fuel);
Result<InhabitationReport> check_inhabitation_theorem(const GeneratedEmbedding& emb,
                                                      const Context& pts_ctx,
                                                      const TermPtr& A,
                                                      const TermPtr& candidate,
                                                      long long fuel = kDefaultJudgmentFuel);

}  // namespace lpm

#endif  // LPM_EMBEDDING_H
