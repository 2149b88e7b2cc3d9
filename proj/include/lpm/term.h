// Shared term language with de Bruijn indices. One tree type serves both
// the lambda-Pi side (sorts Type/Kind, signature constants) and the pure
// type system side (named sorts); scope_audit polices the separation.

#ifndef LPM_TERM_H
#define LPM_TERM_H

#include <memory>
#include <string>
#include <vector>

#include "lpm/diag.h"

namespace lpm {

enum class TermKind { Var, Sort, Const, Pi, Lam, App };

enum class SortKind { LpmType, LpmKind, PtsSort };

struct SortTag {
  SortKind kind = SortKind::LpmType;
  std::string name;  // populated for PtsSort only

  friend bool operator==(const SortTag& a, const SortTag& b) {
    return a.kind == b.kind && (a.kind != SortKind::PtsSort || a.name == b.name);
  }
  friend bool operator!=(const SortTag& a, const SortTag& b) { return !(a == b); }
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable nodes shared freely across trees. Var 0 is the innermost
// binder. `name` is a display hint on binders (ignored by equality) and
// the identifier on Const nodes.
struct Term {
  TermKind kind;
  int index = 0;      // Var
  SortTag sort;       // Sort
  std::string name;   // Const name, or binder display hint on Pi/Lam
  TermPtr a, b;       // Pi: domain/codomain; Lam: annotation/body; App: fun/arg
};

TermPtr mk_var(int index);
TermPtr mk_sort(SortTag s);
TermPtr mk_lpm_type();
TermPtr mk_lpm_kind();
TermPtr mk_pts_sort(const std::string& name);
TermPtr mk_const(const std::string& name);
TermPtr mk_pi(TermPtr dom, TermPtr cod, const std::string& hint = "");
TermPtr mk_lam(TermPtr ann, TermPtr body, const std::string& hint = "");
TermPtr mk_app(TermPtr fun, TermPtr arg);
TermPtr mk_apps(TermPtr head, const std::vector<TermPtr>& args);

// A typing context entry. The last entry is the innermost one, so Var 0
// in a term under context ctx refers to ctx.back().
struct ContextEntry {
  std::string name;
  TermPtr type;
};
using Context = std::vector<ContextEntry>;

// Maps the de Bruijn slot i of a source context to terms[i] over a target
// context; used for instantiating rewrite rule right-hand sides.
using Substitution = std::vector<TermPtr>;

// Shifts free variables with index >= cutoff up by `by`.
TermPtr lift(const TermPtr& t, int by, int cutoff = 0);

// Capture-avoiding substitution of `arg` for Var 0 in `body`; the
// remaining free variables move down one slot.
TermPtr subst(const TermPtr& body, const TermPtr& arg);

// Simultaneous substitution: Var i (free in t) becomes sub[i]; t must not
// reference slots beyond sub.size().
TermPtr subst_multi(const TermPtr& t, const Substitution& sub);

// Structural equality up to binder display hints.
bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Node count, where every constructor contributes one.
int term_size(const TermPtr& t);

// True when the codomain/body references Var 0; a Pi that does not prints
// as an arrow.
bool uses_var0(const TermPtr& t);

// Strips a term down to head and argument list: t = head a1 ... an.
void spine_decompose(const TermPtr& t, TermPtr& head, std::vector<TermPtr>& args);

// Stable serialization used as a hash/set key; injective on terms modulo
// display hints.
std::string term_key(const TermPtr& t);

enum class TermSide { Lpm, Pts };

struct ScopeViolation {
  std::string where;  // path from the root, e.g. "app.fun.lam.body"
  std::string what;
};

// Reports unbound variables (indices >= ctx_len at their depth) and sort
// tags that belong to the other side of the embedding.
std::vector<ScopeViolation> scope_audit(const TermPtr& t, TermSide side, int ctx_len);

bool is_lpm_type(const TermPtr& t);
bool is_lpm_kind(const TermPtr& t);

}  // namespace lpm

#endif  // LPM_TERM_H
