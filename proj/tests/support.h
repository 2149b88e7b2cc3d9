// Shared test machinery: data paths, a reference substitution written
// against named terms (independent of the de Bruijn code paths), seeded
// random generators, and corpus loading.

#ifndef LPM_TESTS_SUPPORT_H
#define LPM_TESTS_SUPPORT_H

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpm/diag.h"
#include "lpm/embedding.h"
#include "lpm/syntax.h"
#include "lpm/term.h"

namespace lpm::test {

// Resolves a path under the repository data directory (injected by the
// build as LPM_DATA_DIR).
std::string data_path(const std::string& rel);

// Unwraps a Result or aborts the test with the diagnostic.
template <typename T>
T must(Result<T> r) {
  if (!r.ok()) throw std::runtime_error(to_string(r.error()));
  return std::move(r).take();
}

// Reference substitution: convert to a named tree, substitute with
// textbook capture-avoiding renaming, convert back. Slow and entirely
// separate from lift/subst, so the two can check each other.
TermPtr oracle_subst(const TermPtr& body, const TermPtr& arg);

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  int below(int n) {
    return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(eng));
  }
  bool coin(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng) < p;
  }
  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<size_t>(below(static_cast<int>(xs.size())))];
  }
};

// Random well-typed judgments for the simply typed fragment, rendered as
// surface syntax over a fixed base context and fed back through the
// parser, so the generator never touches tree construction directly.
struct SimpleTypedGen {
  Rng rng;
  int fresh = 0;
  explicit SimpleTypedGen(std::uint64_t seed) : rng(seed) {}

  static const char* base_context();
  std::string judgment_line();
};

// Random terms over a generated signature. Saturated terms apply every
// product code to exactly two arguments and every decoder to at least
// one, and contain no lambda-Pi sort nodes; on such terms back
// translation commutes with the rewrite rules node by node. The sized
// generator has no discipline beyond a strict node-count bound and may
// emit bare decoders, bare and half-applied product codes, and sorts.
TermPtr gen_saturated(Rng& rng, const GeneratedEmbedding& emb, int budget,
                      int binders);
TermPtr gen_sized(Rng& rng, const GeneratedEmbedding& emb, int budget, int binders);

struct CorpusFile {
  std::string spec_path;  // relative to the data directory
  std::string judg_path;
};
std::vector<CorpusFile> corpus_files();

struct LoadedJudgment {
  Judgment j;          // sorts resolved to named form; type always present
  std::string source;  // one-line rendering for failure messages
};

struct LoadedCorpus {
  PtsSpec spec;
  std::string default_sort;  // empty when the file declares none
  std::vector<LoadedJudgment> judgments;
};

// Loads and resolves one spec/judgment pair. The corpus ships with the
// repository, so any failure here is a build defect and throws.
LoadedCorpus load_corpus(const CorpusFile& f);

}  // namespace lpm::test

#endif  // LPM_TESTS_SUPPORT_H
