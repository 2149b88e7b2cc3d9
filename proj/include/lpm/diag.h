// Diagnostics and result plumbing shared by every component: source spans,
// error codes, a small Result<T> sum, and the fuel budget that makes all
// normalization procedures total.

#ifndef LPM_DIAG_H
#define LPM_DIAG_H

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace lpm {

// A half-open region of an input file, attached to parse nodes and
// judgment records for error reporting.
struct SourceSpan {
  std::string file;
  int start_line = 0, start_col = 0;
  int end_line = 0, end_col = 0;
};

std::string to_string(const SourceSpan& s);

enum class DiagCode {
  // input layer
  ParseError,
  IoError,
  DuplicateName,
  UnknownSortName,
  // typing
  NotTypable,
  UntypableSort,   // top sort used as a subject
  KindHasNoType,
  TypeMismatch,
  NotAType,
  // specs and rules
  SpecInvalid,
  IllTypedLhs,
  IllTypedRhs,
  NonNormalSide,
  NonPatternLhs,
  NonLinearLhs,
  // translation and extraction
  TopSortUntranslatable,
  PreconditionViolated,
  ExtractionFailed,
  // the witness typechecks but its translation is not convertible to the
  // input; see extract_inhabitant
  ExtractionConversionGap,
  // budgets and capabilities
  FuelExhausted,
  Unsupported,
};

const char* diag_code_name(DiagCode c);

struct Diag {
  DiagCode code;
  std::string message;
  std::optional<SourceSpan> span;

  Diag(DiagCode c, std::string msg) : code(c), message(std::move(msg)) {}
  Diag(DiagCode c, std::string msg, SourceSpan sp)
      : code(c), message(std::move(msg)), span(std::move(sp)) {}
};

std::string to_string(const Diag& d);

// Result<T> carries either a value or a diagnostic. Expected failures
// (ill-typed input, fuel, parse errors) travel as Diag; only internal
// invariant violations throw.
template <typename T>
class Result {
 public:
  Result(T v) : v_(std::move(v)) {}          // NOLINT(google-explicit-constructor)
  Result(Diag d) : v_(std::move(d)) {}       // NOLINT(google-explicit-constructor)

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(v_); }
  T&& take() && { return std::get<T>(std::move(v_)); }
  const Diag& error() const { return std::get<Diag>(v_); }

 private:
  std::variant<T, Diag> v_;
};

struct Ok {};
using Check = Result<Ok>;

// Explicit step budget. Every beta contraction and rewrite application
// spends one unit; exhaustion is reported, never silently truncated.
struct Fuel {
  long long remaining;

  explicit Fuel(long long n) : remaining(n) {}
  bool spend(long long n = 1) {
    if (remaining < n) { remaining = 0; return false; }
    remaining -= n;
    return true;
  }
  bool exhausted() const { return remaining <= 0; }
};

constexpr long long kDefaultJudgmentFuel = 1000000;   // per-judgment budget
constexpr long long kDefaultPtsConversionFuel = 100000;

}  // namespace lpm

#endif  // LPM_DIAG_H
