#include "lpm/term.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace lpm {

std::string to_string(const SourceSpan& s) {
  std::ostringstream os;
  os << s.file << ":" << s.start_line << ":" << s.start_col;
  return os.str();
}

const char* diag_code_name(DiagCode c) {
  switch (c) {
    case DiagCode::ParseError: return "parse-error";
    case DiagCode::IoError: return "io-error";
    case DiagCode::DuplicateName: return "duplicate-name";
    case DiagCode::UnknownSortName: return "unknown-sort-name";
    case DiagCode::NotTypable: return "not-typable";
    case DiagCode::UntypableSort: return "untypable-sort";
    case DiagCode::KindHasNoType: return "kind-has-no-type";
    case DiagCode::TypeMismatch: return "type-mismatch";
    case DiagCode::NotAType: return "not-a-type";
    case DiagCode::SpecInvalid: return "spec-invalid";
    case DiagCode::IllTypedLhs: return "ill-typed-lhs";
    case DiagCode::IllTypedRhs: return "ill-typed-rhs";
    case DiagCode::NonNormalSide: return "non-normal-side";
    case DiagCode::NonPatternLhs: return "non-pattern-lhs";
    case DiagCode::NonLinearLhs: return "non-linear-lhs";
    case DiagCode::TopSortUntranslatable: return "top-sort-untranslatable";
    case DiagCode::PreconditionViolated: return "precondition-violated";
    case DiagCode::ExtractionFailed: return "extraction-failed";
    case DiagCode::ExtractionConversionGap: return "extraction-conversion-gap";
    case DiagCode::FuelExhausted: return "fuel-exhausted";
    case DiagCode::Unsupported: return "unsupported";
  }
  return "unknown";
}

std::string to_string(const Diag& d) {
  std::string out = diag_code_name(d.code);
  out += ": ";
  out += d.message;
  if (d.span) {
    out += " (at ";
    out += to_string(*d.span);
    out += ")";
  }
  return out;
}

TermPtr mk_var(int index) {
  if (index < 0) throw std::logic_error("mk_var: negative index");
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Var;
  t->index = index;
  return t;
}

TermPtr mk_sort(SortTag s) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Sort;
  t->sort = std::move(s);
  return t;
}

TermPtr mk_lpm_type() {
  static const TermPtr t = mk_sort(SortTag{SortKind::LpmType, ""});
  return t;
}

TermPtr mk_lpm_kind() {
  static const TermPtr t = mk_sort(SortTag{SortKind::LpmKind, ""});
  return t;
}

TermPtr mk_pts_sort(const std::string& name) {
  return mk_sort(SortTag{SortKind::PtsSort, name});
}

TermPtr mk_const(const std::string& name) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Const;
  t->name = name;
  return t;
}

TermPtr mk_pi(TermPtr dom, TermPtr cod, const std::string& hint) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Pi;
  t->name = hint;
  t->a = std::move(dom);
  t->b = std::move(cod);
  return t;
}

TermPtr mk_lam(TermPtr ann, TermPtr body, const std::string& hint) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Lam;
  t->name = hint;
  t->a = std::move(ann);
  t->b = std::move(body);
  return t;
}

TermPtr mk_app(TermPtr fun, TermPtr arg) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::App;
  t->a = std::move(fun);
  t->b = std::move(arg);
  return t;
}

TermPtr mk_apps(TermPtr head, const std::vector<TermPtr>& args) {
  TermPtr out = std::move(head);
  for (const auto& a : args) out = mk_app(out, a);
  return out;
}

TermPtr lift(const TermPtr& t, int by, int cutoff) {
  if (by == 0) return t;
  switch (t->kind) {
    case TermKind::Var:
      return t->index < cutoff ? t : mk_var(t->index + by);
    case TermKind::Sort:
    case TermKind::Const:
      return t;
    case TermKind::Pi:
      return mk_pi(lift(t->a, by, cutoff), lift(t->b, by, cutoff + 1), t->name);
    case TermKind::Lam:
      return mk_lam(lift(t->a, by, cutoff), lift(t->b, by, cutoff + 1), t->name);
    case TermKind::App:
      return mk_app(lift(t->a, by, cutoff), lift(t->b, by, cutoff));
  }
  throw std::logic_error("lift: bad kind");
}

namespace {

TermPtr subst_at(const TermPtr& t, const TermPtr& arg, int depth) {
  switch (t->kind) {
    case TermKind::Var:
      if (t->index < depth) return t;
      if (t->index == depth) return lift(arg, depth);
      return mk_var(t->index - 1);
    case TermKind::Sort:
    case TermKind::Const:
      return t;
    case TermKind::Pi:
      return mk_pi(subst_at(t->a, arg, depth), subst_at(t->b, arg, depth + 1), t->name);
    case TermKind::Lam:
      return mk_lam(subst_at(t->a, arg, depth), subst_at(t->b, arg, depth + 1), t->name);
    case TermKind::App:
      return mk_app(subst_at(t->a, arg, depth), subst_at(t->b, arg, depth));
  }
  throw std::logic_error("subst: bad kind");
}

TermPtr subst_multi_at(const TermPtr& t, const Substitution& sub, int depth) {
  switch (t->kind) {
    case TermKind::Var: {
      if (t->index < depth) return t;
      int slot = t->index - depth;
      if (slot < static_cast<int>(sub.size())) return lift(sub[slot], depth);
      return mk_var(t->index - static_cast<int>(sub.size()));
    }
    case TermKind::Sort:
    case TermKind::Const:
      return t;
    case TermKind::Pi:
      return mk_pi(subst_multi_at(t->a, sub, depth),
                   subst_multi_at(t->b, sub, depth + 1), t->name);
    case TermKind::Lam:
      return mk_lam(subst_multi_at(t->a, sub, depth),
                    subst_multi_at(t->b, sub, depth + 1), t->name);
    case TermKind::App:
      return mk_app(subst_multi_at(t->a, sub, depth),
                    subst_multi_at(t->b, sub, depth));
  }
  throw std::logic_error("subst_multi: bad kind");
}

}  // namespace

TermPtr subst(const TermPtr& body, const TermPtr& arg) {
  return subst_at(body, arg, 0);
}

TermPtr subst_multi(const TermPtr& t, const Substitution& sub) {
  return subst_multi_at(t, sub, 0);
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Var: return a->index == b->index;
    case TermKind::Sort: return a->sort == b->sort;
    case TermKind::Const: return a->name == b->name;
    case TermKind::Pi:
    case TermKind::Lam:
    case TermKind::App:
      return alpha_eq(a->a, b->a) && alpha_eq(a->b, b->b);
  }
  return false;
}

int term_size(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Sort:
    case TermKind::Const:
      return 1;
    case TermKind::Pi:
    case TermKind::Lam:
    case TermKind::App:
      return 1 + term_size(t->a) + term_size(t->b);
  }
  return 1;
}

namespace {

bool uses_var_at(const TermPtr& t, int depth) {
  switch (t->kind) {
    case TermKind::Var: return t->index == depth;
    case TermKind::Sort:
    case TermKind::Const: return false;
    case TermKind::Pi:
    case TermKind::Lam:
      return uses_var_at(t->a, depth) || uses_var_at(t->b, depth + 1);
    case TermKind::App:
      return uses_var_at(t->a, depth) || uses_var_at(t->b, depth);
  }
  return false;
}

}  // namespace

bool uses_var0(const TermPtr& t) { return uses_var_at(t, 0); }

void spine_decompose(const TermPtr& t, TermPtr& head, std::vector<TermPtr>& args) {
  args.clear();
  TermPtr cur = t;
  while (cur->kind == TermKind::App) {
    args.push_back(cur->b);
    cur = cur->a;
  }
  head = cur;
  std::reverse(args.begin(), args.end());
}

namespace {

void key_into(const TermPtr& t, std::string& out) {
  switch (t->kind) {
    case TermKind::Var:
      out += 'v';
      out += std::to_string(t->index);
      out += ';';
      return;
    case TermKind::Sort:
      switch (t->sort.kind) {
        case SortKind::LpmType: out += "sT;"; return;
        case SortKind::LpmKind: out += "sK;"; return;
        case SortKind::PtsSort:
          out += "s(";
          out += t->sort.name;
          out += ");";
          return;
      }
      return;
    case TermKind::Const:
      out += 'c';
      out += t->name;
      out += ';';
      return;
    case TermKind::Pi:
      out += 'P';
      key_into(t->a, out);
      key_into(t->b, out);
      return;
    case TermKind::Lam:
      out += 'L';
      key_into(t->a, out);
      key_into(t->b, out);
      return;
    case TermKind::App:
      out += 'A';
      key_into(t->a, out);
      key_into(t->b, out);
      return;
  }
}

}  // namespace

std::string term_key(const TermPtr& t) {
  std::string out;
  out.reserve(static_cast<size_t>(term_size(t)) * 4);
  key_into(t, out);
  return out;
}

namespace {

void audit_at(const TermPtr& t, TermSide side, int bound, const std::string& path,
              std::vector<ScopeViolation>& out) {
  switch (t->kind) {
    case TermKind::Var:
      if (t->index >= bound) {
        out.push_back({path, "unbound variable with index " + std::to_string(t->index) +
                                 " where only " + std::to_string(bound) +
                                 " slots are in scope"});
      }
      return;
    case TermKind::Sort: {
      bool foreign = (side == TermSide::Lpm)
                         ? t->sort.kind == SortKind::PtsSort
                         : t->sort.kind != SortKind::PtsSort;
      if (foreign) {
        std::string which = t->sort.kind == SortKind::PtsSort
                                ? "named sort '" + t->sort.name + "'"
                                : std::string(t->sort.kind == SortKind::LpmType ? "Type" : "Kind");
        out.push_back({path, "sort tag from the other side: " + which});
      }
      return;
    }
    case TermKind::Const:
      return;
    case TermKind::Pi:
      audit_at(t->a, side, bound, path + ".pi.dom", out);
      audit_at(t->b, side, bound + 1, path + ".pi.cod", out);
      return;
    case TermKind::Lam:
      audit_at(t->a, side, bound, path + ".lam.ann", out);
      audit_at(t->b, side, bound + 1, path + ".lam.body", out);
      return;
    case TermKind::App:
      audit_at(t->a, side, bound, path + ".app.fun", out);
      audit_at(t->b, side, bound, path + ".app.arg", out);
      return;
  }
}

}  // namespace

std::vector<ScopeViolation> scope_audit(const TermPtr& t, TermSide side, int ctx_len) {
  std::vector<ScopeViolation> out;
  audit_at(t, side, ctx_len, "root", out);
  return out;
}

bool is_lpm_type(const TermPtr& t) {
  return t->kind == TermKind::Sort && t->sort.kind == SortKind::LpmType;
}

bool is_lpm_kind(const TermPtr& t) {
  return t->kind == TermKind::Sort && t->sort.kind == SortKind::LpmKind;
}

}  // namespace lpm
