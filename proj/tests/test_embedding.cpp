#include "lpm/embedding.h"

#include <string>
#include <vector>

#include "doctest.h"
#include "lpm/kernel.h"
#include "lpm/parlab.h"
#include "lpm/pts.h"
#include "lpm/syntax.h"
#include "support.h"

using namespace lpm;
using namespace lpm::test;

namespace {

GeneratedEmbedding emb_of(const std::string& spec_file) {
  SpecFile sf = must(load_spec(data_path("specs/" + spec_file)));
  return must(generate_embedding(sf.spec, sf.default_sort.value_or("")));
}

TermPtr pt(const std::string& s) { return must(parse_term(s)); }

TermPtr pt_in(const std::string& s, const std::vector<std::string>& scope) {
  return must(parse_term_in(s, scope));
}

// parses with keyword sorts resolved to named sorts
TermPtr rp(const PtsSpec& spec, const std::string& s) {
  return must(resolve_pts_sorts(pt(s), spec));
}

Judgment pts_judgment(const PtsSpec& spec, const std::string& line) {
  SigFile f = must(parse_signature(line, "<test>"));
  REQUIRE(f.judgments.size() == 1);
  return must(resolve_pts_judgment(f.judgments[0], spec));
}

}  // namespace

TEST_CASE("generation emits codes, decoders, and connectives in order") {
  GeneratedEmbedding coc = emb_of("coc.pts");
  REQUIRE(coc.signature.entries.size() == 9);
  REQUIRE(coc.rewrites.rules.size() == 5);
  const char* expected[] = {
      "U_Type",
      "U_Kind",
      "eps_Type",
      "eps_Kind",
      "dot_Type",
      "dotPi_Type_Type_Type",
      "dotPi_Type_Kind_Kind",
      "dotPi_Kind_Type_Type",
      "dotPi_Kind_Kind_Kind",
  };
  for (size_t i = 0; i < 9; ++i) CHECK(coc.signature.entries[i].name == expected[i]);

  GeneratedEmbedding stlc = emb_of("stlc.pts");
  CHECK(stlc.signature.entries.size() == 6);
  CHECK(stlc.rewrites.rules.size() == 2);
}

TEST_CASE("every generated signature passes its own kernel checks") {
  for (const char* f : {"stlc.pts", "f.pts", "lpi.pts", "coc.pts"}) {
    GeneratedEmbedding emb = emb_of(f);
    Check sig_ok = check_signature(emb.signature);
    REQUIRE_MESSAGE(sig_ok.ok(), f);
    for (const RewriteRule& r : emb.rewrites.rules) {
      Check rule_ok = check_rule(emb.signature, r);
      REQUIRE_MESSAGE(rule_ok.ok(), print_rule(r));
    }
  }
}

TEST_CASE("constant roles are recorded and queryable") {
  GeneratedEmbedding emb = emb_of("coc.pts");
  const ConstInfo* u = emb.role_of(mk_const("U_Type"));
  REQUIRE(u != nullptr);
  CHECK(u->role == ConstRole::U);
  CHECK(u->sorts[0] == "Type");

  const ConstInfo* e = emb.role_of(mk_const("eps_Kind"));
  REQUIRE(e != nullptr);
  CHECK(e->role == ConstRole::Eps);
  CHECK(e->sorts[0] == "Kind");

  const ConstInfo* d = emb.role_of(mk_const("dot_Type"));
  REQUIRE(d != nullptr);
  CHECK(d->role == ConstRole::Dot);

  const ConstInfo* p = emb.role_of(mk_const("dotPi_Type_Kind_Kind"));
  REQUIRE(p != nullptr);
  CHECK(p->role == ConstRole::DotPi);
  CHECK(p->sorts == std::array<std::string, 3>{"Type", "Kind", "Kind"});

  CHECK(emb.role_of(mk_const("nat")) == nullptr);
  CHECK(emb.role_of(mk_var(0)) == nullptr);
}

TEST_CASE("generation rejects bad specifications") {
  SpecFile bad = must(load_spec(data_path("specs/nonfunctional.pts")));
  auto r1 = generate_embedding(bad.spec, bad.default_sort.value_or(""));
  REQUIRE(!r1.ok());
  CHECK(r1.error().code == DiagCode::SpecInvalid);

  SpecFile coc = must(load_spec(data_path("specs/coc.pts")));
  auto r2 = generate_embedding(coc.spec, "Set");
  REQUIRE(!r2.ok());
  CHECK(r2.error().code == DiagCode::UnknownSortName);
}

TEST_CASE("generation refuses sort names that fuse to one constant") {
  PtsSpec spec;
  spec.name = "fused";
  spec.sorts = {"s", "s_s"};
  spec.axioms = {{"s", "s_s"}};
  spec.rules = {{"s", "s", "s_s"}, {"s_s", "s", "s"}};
  REQUIRE(validate_spec(spec).ok());
  auto r = generate_embedding(spec, "s");
  REQUIRE(!r.ok());
  CHECK(r.error().code == DiagCode::SpecInvalid);
  CHECK(r.error().message.find("collide") != std::string::npos);
}

TEST_CASE("term translation decodes annotations and encodes products") {
  GeneratedEmbedding emb = emb_of("coc.pts");
  const PtsSpec& spec = emb.config.spec;

  Judgment id_nat = pts_judgment(spec, "[nat:Type] |- \\x:nat. x : nat -> nat.");
  TermPtr t1 = must(translate_term(emb, id_nat.ctx, id_nat.subject));
  CHECK(alpha_eq(t1, pt_in("\\x:eps_Type nat. x", {"nat"})));

  TermPtr arrow = must(translate_term(emb, id_nat.ctx, id_nat.type));
  CHECK(alpha_eq(arrow,
                 pt_in("dotPi_Type_Type_Type nat (\\x:eps_Type nat. nat)",
                       {"nat"})));

  Judgment poly = pts_judgment(spec, "[] |- \\X:Type. \\x:X. x : !X:Type. X -> X.");
  TermPtr t2 = must(translate_term(emb, poly.ctx, poly.subject));
  CHECK(alpha_eq(t2, pt("\\X:eps_Kind dot_Type. \\x:eps_Type X. x")));
}

TEST_CASE("type translation decodes codes and keeps top sorts as universes") {
  GeneratedEmbedding emb = emb_of("coc.pts");
  const PtsSpec& spec = emb.config.spec;

  CHECK(alpha_eq(must(translate_type(emb, {}, mk_pts_sort("Type"))),
                 pt("eps_Kind dot_Type")));
  CHECK(alpha_eq(must(translate_type(emb, {}, mk_pts_sort("Kind"))),
                 pt("U_Kind")));

  Context ctx = must(resolve_pts_context(
      must(parse_context("nat:Type")), spec));
  TermPtr arr = must(translate_type(emb, ctx, pt_in("nat -> nat", {"nat"})));
  TermPtr arr_wanted = pt_in(
      "eps_Type (dotPi_Type_Type_Type nat (\\x:eps_Type nat. nat))", {"nat"});
  CHECK(alpha_eq(arr, arr_wanted));

  Context tctx = must(translate_context(emb, ctx));
  REQUIRE(tctx.size() == 1);
  CHECK(alpha_eq(tctx[0].type, pt("eps_Kind dot_Type")));
}

TEST_CASE("translation reports subjects that block the fused inference") {
  GeneratedEmbedding stlc = emb_of("stlc.pts");
  const PtsSpec& spec = stlc.config.spec;

  // applying a base-typed variable leaves inference without a product
  Judgment j = pts_judgment(spec, "[nat:Type, c:nat] |- c : nat.");
  auto bad = translate_term(stlc, j.ctx, mk_app(j.subject, j.subject));
  REQUIRE(!bad.ok());
  CHECK(bad.error().code == DiagCode::PreconditionViolated);

  // source terms name context slots by index, never by constant
  auto con = translate_term(stlc, {}, pt("nat"));
  REQUIRE(!con.ok());
  CHECK(con.error().code == DiagCode::PreconditionViolated);

  // a product no declared rule can form
  auto pi = translate_type(stlc, {}, rp(spec, "!X:Type. X -> X"));
  REQUIRE(!pi.ok());
  CHECK(pi.error().code == DiagCode::PreconditionViolated);
}

TEST_CASE("an untypable abstraction can still translate and check") {
  // the simply typed specification cannot type the polymorphic identity,
  // but its translation only needs sorts for the annotations, and the
  // image is a perfectly fine lambda-Pi term. Conservativity is rescued
  // by extraction, not by translation refusing early.
  GeneratedEmbedding stlc = emb_of("stlc.pts");
  const PtsSpec& spec = stlc.config.spec;
  TermPtr poly_id = rp(spec, "\\X:Type. \\x:X. x");

  auto src = pts_infer(spec, {}, poly_id);
  REQUIRE(!src.ok());
  CHECK(src.error().code == DiagCode::NotTypable);

  TermPtr image = must(translate_term(stlc, {}, poly_id));
  CHECK(alpha_eq(image, pt("\\X:eps_Kind dot_Type. \\x:eps_Type X. x")));
  auto ty = lpm_infer(stlc.signature, stlc.rewrites, {}, image);
  CHECK(ty.ok());
}

TEST_CASE("back translation inverts the codes") {
  GeneratedEmbedding emb = emb_of("coc.pts");
  const PtsSpec& spec = emb.config.spec;

  CHECK(alpha_eq(back_translate(emb, pt("U_Type")), mk_pts_sort("Type")));
  CHECK(alpha_eq(back_translate(emb, pt("dot_Type")), mk_pts_sort("Type")));
  CHECK(alpha_eq(back_translate(emb, mk_lpm_type()), mk_pts_sort("Type")));
  CHECK(alpha_eq(back_translate(emb, mk_lpm_kind()), mk_pts_sort("Type")));

  // decoders vanish
  CHECK(alpha_eq(back_translate(emb, pt_in("eps_Type X", {"X"})), mk_var(0)));

  // a product code applied to a literal abstraction contracts on the spot
  TermPtr coded = pt_in("dotPi_Type_Type_Type A (\\x:eps_Type A. B x)",
                        {"A", "B"});
  CHECK(alpha_eq(back_translate(emb, coded), pt_in("!x:A. B x", {"A", "B"})));

  // any other second argument keeps the applied form
  TermPtr opaque = pt_in("dotPi_Type_Type_Type A F", {"A", "F"});
  CHECK(alpha_eq(back_translate(emb, opaque), pt_in("!x:A. F x", {"A", "F"})));

  // bare generated constants map to their evident lambda images
  CHECK(alpha_eq(back_translate(emb, pt("eps_Type")), rp(spec, "\\x:Type. x")));
  CHECK(alpha_eq(
      back_translate(emb, pt("dotPi_Type_Type_Type")),
      rp(spec, "\\X:Type. \\Y:X -> Type. !x:X. Y x")));
}

TEST_CASE("rewrite steps commute with back translation up to one beta step") {
  GeneratedEmbedding emb = emb_of("coc.pts");

  // when the product code's second argument is a literal abstraction the
  // rewrite step is invisible after back translation only up to beta: the
  // contracted side carries the residual application
  TermPtr t = pt("eps_Type (dotPi_Type_Type_Type nat (\\y:eps_Type nat. nat))");
  auto step = rewrite_step(emb.rewrites, t);
  REQUIRE(step.has_value());
  TermPtr u = step->reduct;

  TermPtr bt = back_translate(emb, t);
  TermPtr bu = back_translate(emb, u);
  CHECK(alpha_eq(bt, pt("!x:nat. nat")));
  CHECK(!alpha_eq(bt, bu));
  auto one = pts_beta_step(bu);
  REQUIRE(one.has_value());
  CHECK(alpha_eq(*one, bt));

  Fuel fuel(1000);
  Check conv = pts_conv(bt, bu, fuel);
  CHECK(conv.ok());

  // with any non-abstraction second argument the two sides agree exactly
  TermPtr t2 = pt_in("eps_Type (dotPi_Type_Type_Type nat F)", {"F"});
  auto step2 = rewrite_step(emb.rewrites, t2);
  REQUIRE(step2.has_value());
  CHECK(alpha_eq(back_translate(emb, t2), back_translate(emb, step2->reduct)));
}

TEST_CASE("weak eta expansion saturates product codes") {
  GeneratedEmbedding emb = emb_of("coc.pts");

  TermPtr bare = pt("dotPi_Type_Type_Type");
  CHECK(!is_weak_eta_long(emb, bare));
  TermPtr wrapped = weak_eta_expand(emb, bare);
  CHECK(is_weak_eta_long(emb, wrapped));
  CHECK(alpha_eq(wrapped,
                 pt("\\X:U_Type. \\Y:(eps_Type X) -> U_Type. "
                    "dotPi_Type_Type_Type X Y")));
  CHECK(is_beta_normal(wrapped));

  TermPtr half = pt_in("dotPi_Type_Type_Type A", {"A"});
  CHECK(!is_weak_eta_long(emb, half));
  TermPtr half_wrapped = weak_eta_expand(emb, half);
  CHECK(alpha_eq(half_wrapped,
                 pt_in("\\Y:(eps_Type A) -> U_Type. dotPi_Type_Type_Type A Y",
                       {"A"})));
  CHECK(is_beta_normal(half_wrapped));

  // saturated occurrences are untouched
  TermPtr full = pt("dotPi_Type_Type_Type nat (\\x:eps_Type nat. nat)");
  CHECK(is_weak_eta_long(emb, full));
  CHECK(alpha_eq(weak_eta_expand(emb, full), full));

  // every expansion checks against the connective's declared type
  for (const SigEntry& entry : emb.signature.entries) {
    const ConstInfo* info = emb.role_of(mk_const(entry.name));
    REQUIRE(info != nullptr);
    if (info->role != ConstRole::DotPi) continue;
    TermPtr lam = weak_eta_expand(emb, mk_const(entry.name));
    Check ok = lpm_check(emb.signature, emb.rewrites, {}, lam, entry.type);
    REQUIRE_MESSAGE(ok.ok(), entry.name);
  }
}

TEST_CASE("a normal proof that is not eta-long loses round-trip convertibility") {
  // the one shape a plain product-code constant can inhabit: its own
  // declared type. The back translation does produce a typable witness,
  // but the witness's translation is a saturated code, never the bare
  // constant, and the kernel has no eta. This is exactly the gap the
  // eta-long hypothesis of the extraction theorem closes.
  GeneratedEmbedding emb = emb_of("coc.pts");
  TermPtr bare = pt("dotPi_Type_Type_Type");
  const TermPtr* declared = emb.signature.lookup("dotPi_Type_Type_Type");
  REQUIRE(declared != nullptr);
  TermPtr A = back_translate(emb, *declared);

  Fuel fuel(kDefaultJudgmentFuel);
  ExtractReport rep = extract_report(emb, {}, A, bare, fuel);
  CHECK(rep.pts_ok);
  CHECK(!rep.conv_ok);
  REQUIRE(rep.failure.has_value());
  CHECK(rep.failure->code == DiagCode::ExtractionConversionGap);

  auto r = extract_inhabitant(emb, {}, A, bare);
  REQUIRE(!r.ok());
  CHECK(r.error().code == DiagCode::ExtractionConversionGap);
}

TEST_CASE("the inhabitation pipeline certifies a translated proof") {
  GeneratedEmbedding emb = emb_of("coc.pts");
  const PtsSpec& spec = emb.config.spec;
  Judgment j = pts_judgment(spec, "[nat:Type] |- \\x:nat. x : nat -> nat.");

  TermPtr candidate = must(translate_term(emb, j.ctx, j.subject));
  auto rep = check_inhabitation_theorem(emb, j.ctx, j.type, candidate);
  REQUIRE(rep.ok());
  CHECK(rep.value().ok());
  CHECK(rep.value().inhabited());
  CHECK(alpha_eq(rep.value().extract.witness, j.subject));
  CHECK(is_weak_eta_long(emb, rep.value().expanded));

  // candidates that do not check against the translated type are refused
  auto bad = check_inhabitation_theorem(emb, j.ctx, j.type, pt("junk"));
  REQUIRE(!bad.ok());
  CHECK(bad.error().code == DiagCode::NotTypable);
}

TEST_CASE("random saturated terms stay in the commuting fragment") {
  GeneratedEmbedding emb = emb_of("coc.pts");
  Rng rng(20260815);
  for (int i = 0; i < 300; ++i) {
    TermPtr t = gen_saturated(rng, emb, 16, 0);
    for (const TermPtr& u : enumerate_one_step(emb.rewrites, t, false)) {
      CHECK(alpha_eq(back_translate(emb, t), back_translate(emb, u)));
    }
  }
}
