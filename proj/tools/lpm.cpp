// Command line front end for the kernel, the pure type system engine,
// and the embedding generator. Exit codes form the machine contract:
// 0 success, 1 semantic failure, 2 input failure, 3 fuel exhaustion.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lpm/diag.h"
#include "lpm/embedding.h"
#include "lpm/kernel.h"
#include "lpm/parlab.h"
#include "lpm/pts.h"
#include "lpm/syntax.h"
#include "lpm/term.h"

using namespace lpm;

namespace {

int exit_code_for(const Diag& d) {
  switch (d.code) {
    case DiagCode::ParseError:
    case DiagCode::IoError:
    case DiagCode::DuplicateName:
    case DiagCode::UnknownSortName:
    case DiagCode::Unsupported:
      return 2;
    case DiagCode::FuelExhausted:
      return 3;
    default:
      return 1;
  }
}

// Unwraps a Result; on failure reports to stderr and stores the exit code.
template <typename T>
std::optional<T> get_or_report(Result<T> r, int& rc) {
  if (r.ok()) return std::move(r).take();
  std::cerr << "error: " << to_string(r.error()) << "\n";
  rc = exit_code_for(r.error());
  return std::nullopt;
}

// Per-judgment report lines, plain or NDJSON, with exit aggregation:
// any FAIL wins over any FUEL wins over success.
struct Reporter {
  bool json = false;
  bool any_fail = false;
  bool any_fuel = false;
  int index = 0;

  void emit(const std::optional<SourceSpan>& span, const char* status,
            const std::string& subject, const std::string& detail) {
    if (json) {
      nlohmann::json rec;
      rec["index"] = index;
      rec["line"] = span ? span->start_line : 0;
      rec["status"] = status;
      rec["subject"] = subject;
      if (!detail.empty()) rec["detail"] = detail;
      std::cout << rec.dump() << "\n";
    } else {
      std::string prefix = std::string(status) == "ok"     ? "OK"
                           : std::string(status) == "fuel" ? "FUEL"
                                                           : "FAIL";
      std::cout << prefix << " " << subject;
      if (!detail.empty()) std::cout << ": " << detail;
      std::cout << "\n";
    }
    if (std::string(status) == "fail") any_fail = true;
    if (std::string(status) == "fuel") any_fuel = true;
    ++index;
  }

  void ok(const std::optional<SourceSpan>& span, const std::string& subject) {
    emit(span, "ok", subject, "");
  }
  void diag(const std::optional<SourceSpan>& span, const std::string& subject,
            const Diag& d) {
    emit(span, d.code == DiagCode::FuelExhausted ? "fuel" : "fail", subject,
         to_string(d));
  }
  void fail(const std::optional<SourceSpan>& span, const std::string& subject,
            const std::string& detail) {
    emit(span, "fail", subject, detail);
  }

  int exit_code() const { return any_fail ? 1 : any_fuel ? 3 : 0; }
};

// Judgment files must not smuggle in declarations or rules.
bool judgments_only(const SigFile& f, const std::string& path, int& rc) {
  if (f.signature.entries.empty() && f.rules.empty()) return true;
  std::cerr << "error: " << path << " must contain judgments only\n";
  rc = 2;
  return false;
}

struct CommonArgs {
  std::string spec_path;
  long long fuel = kDefaultJudgmentFuel;
  bool json = false;
};

int cmd_pts_check(const CommonArgs& common, const std::string& judg_path) {
  int rc = 0;
  auto sf = get_or_report(load_spec(common.spec_path), rc);
  if (!sf) return rc;
  SpecValidation v = validate_spec(sf->spec);
  if (!v.ok()) {
    for (const std::string& s : v.violations) std::cerr << "error: " << s << "\n";
    return 1;
  }
  auto file = get_or_report(load_signature(judg_path), rc);
  if (!file) return rc;
  if (!judgments_only(*file, judg_path, rc)) return rc;

  Reporter rep;
  rep.json = common.json;
  for (const Judgment& raw : file->judgments) {
    auto rj = resolve_pts_judgment(raw, sf->spec);
    if (!rj.ok()) {
      rep.diag(raw.span, print_judgment(raw), rj.error());
      continue;
    }
    Judgment j = std::move(rj).take();
    if (j.type) {
      Check c = pts_check(sf->spec, j.ctx, j.subject, j.type, common.fuel);
      if (c.ok()) rep.ok(j.span, print_judgment(j));
      else rep.diag(j.span, print_judgment(j), c.error());
    } else {
      auto inferred = pts_infer(sf->spec, j.ctx, j.subject, common.fuel);
      if (inferred.ok()) {
        Judgment shown = j;
        shown.type = inferred.value();
        rep.ok(j.span, print_judgment(shown));
      } else {
        rep.diag(j.span, print_judgment(j), inferred.error());
      }
    }
  }
  return rep.exit_code();
}

int cmd_embed(const CommonArgs& common, const std::string& out_path) {
  int rc = 0;
  auto sf = get_or_report(load_spec(common.spec_path), rc);
  if (!sf) return rc;
  auto emb = get_or_report(
      generate_embedding(sf->spec, sf->default_sort.value_or("")), rc);
  if (!emb) return rc;
  std::string printed = print_signature(emb->signature, emb->rewrites);
  if (out_path.empty()) {
    std::cout << printed;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << printed;
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return 2;
  }
  return 0;
}

int cmd_translate(const CommonArgs& common, const std::string& mode,
                  const std::string& judg_path) {
  int rc = 0;
  auto sf = get_or_report(load_spec(common.spec_path), rc);
  if (!sf) return rc;
  auto emb = get_or_report(
      generate_embedding(sf->spec, sf->default_sort.value_or("")), rc);
  if (!emb) return rc;
  auto file = get_or_report(load_signature(judg_path), rc);
  if (!file) return rc;
  if (!judgments_only(*file, judg_path, rc)) return rc;

  Reporter rep;
  rep.json = common.json;
  for (const Judgment& raw : file->judgments) {
    auto rj = resolve_pts_judgment(raw, sf->spec);
    if (!rj.ok()) {
      rep.diag(raw.span, print_judgment(raw), rj.error());
      continue;
    }
    Judgment j = std::move(rj).take();
    auto tctx = translate_context(*emb, j.ctx, common.fuel);
    if (!tctx.ok()) {
      rep.diag(j.span, print_judgment(j), tctx.error());
      continue;
    }
    Result<TermPtr> out = [&]() -> Result<TermPtr> {
      if (mode == "term") return translate_term(*emb, j.ctx, j.subject, common.fuel);
      if (!j.type)
        return Diag(DiagCode::ParseError, "judgment carries no type to translate");
      return translate_type(*emb, j.ctx, j.type, common.fuel);
    }();
    if (mode == "context") {
      std::cout << print_context(tctx.value()) << "\n";
      ++rep.index;
      continue;
    }
    if (!out.ok()) {
      rep.diag(j.span, print_judgment(j), out.error());
      continue;
    }
    std::cout << print_term_in(out.value(), tctx.value()) << "\n";
    ++rep.index;
  }
  return rep.exit_code();
}

int cmd_lpm_check(const std::string& sig_path, const std::string& judg_path,
                  long long fuel, bool json, bool minus, bool trace) {
  int rc = 0;
  auto file = get_or_report(load_signature(sig_path), rc);
  if (!file) return rc;

  KernelOpts opts;
  opts.lambda_pi_minus = minus;
  if (trace) opts.trace = &std::cerr;

  Reporter rep;
  rep.json = json;
  Check sig_ok = check_signature(file->signature);
  if (!sig_ok.ok()) {
    rep.diag(std::nullopt, "signature", sig_ok.error());
    return rep.exit_code();
  }
  for (const RewriteRule& r : file->rules) {
    Check c = check_rule(file->signature, r);
    if (c.ok()) rep.ok(r.span, print_rule(r));
    else rep.diag(r.span, print_rule(r), c.error());
  }
  if (rep.any_fail) return rep.exit_code();

  RewriteSystem rs(file->rules);
  std::vector<Judgment> judgments = file->judgments;
  if (!judg_path.empty()) {
    auto extra = get_or_report(load_signature(judg_path), rc);
    if (!extra) return rc;
    if (!judgments_only(*extra, judg_path, rc)) return rc;
    judgments.insert(judgments.end(), extra->judgments.begin(),
                     extra->judgments.end());
  }
  for (const Judgment& j : judgments) {
    if (j.type) {
      Check c = lpm_check(file->signature, rs, j.ctx, j.subject, j.type, fuel, opts);
      if (c.ok()) rep.ok(j.span, print_judgment(j));
      else rep.diag(j.span, print_judgment(j), c.error());
    } else {
      auto inferred = lpm_infer(file->signature, rs, j.ctx, j.subject, fuel, opts);
      if (inferred.ok()) {
        Judgment shown = j;
        shown.type = inferred.value();
        rep.ok(j.span, print_judgment(shown));
      } else {
        rep.diag(j.span, print_judgment(j), inferred.error());
      }
    }
  }
  return rep.exit_code();
}

int cmd_normalize(const std::string& sig_path, const std::string& term_src,
                  long long fuel, bool minus) {
  int rc = 0;
  auto file = get_or_report(load_signature(sig_path), rc);
  if (!file) return rc;
  auto t = get_or_report(parse_term(term_src, "<term>"), rc);
  if (!t) return rc;

  RewriteSystem rs(file->rules);
  TermPtr cur = *t;
  long long budget = fuel;
  while (budget-- > 0) {
    auto next = betaR_step(rs, cur, !minus);
    if (!next.has_value()) {
      std::cout << print_term(cur) << "\n";
      return 0;
    }
    cur = *next;
  }
  std::cout << print_term(cur) << "\n";
  std::cerr << "error: fuel exhausted; printed the last reduct\n";
  return 3;
}

int cmd_back(const CommonArgs& common, const std::string& term_src) {
  int rc = 0;
  auto sf = get_or_report(load_spec(common.spec_path), rc);
  if (!sf) return rc;
  auto emb = get_or_report(
      generate_embedding(sf->spec, sf->default_sort.value_or("")), rc);
  if (!emb) return rc;
  auto t = get_or_report(parse_term(term_src, "<term>"), rc);
  if (!t) return rc;
  std::cout << print_term(back_translate(*emb, *t)) << "\n";
  return 0;
}

int cmd_extract(const CommonArgs& common, const std::string& ctx_src,
                const std::string& type_src, const std::string& term_src) {
  int rc = 0;
  auto sf = get_or_report(load_spec(common.spec_path), rc);
  if (!sf) return rc;
  auto emb = get_or_report(
      generate_embedding(sf->spec, sf->default_sort.value_or("")), rc);
  if (!emb) return rc;

  auto raw_ctx = get_or_report(parse_context(ctx_src, "<ctx>"), rc);
  if (!raw_ctx) return rc;
  auto pctx = get_or_report(resolve_pts_context(*raw_ctx, sf->spec), rc);
  if (!pctx) return rc;
  std::vector<std::string> scope;
  for (const ContextEntry& e : *pctx) scope.push_back(e.name);

  auto raw_type = get_or_report(parse_term_in(type_src, scope, "<type>"), rc);
  if (!raw_type) return rc;
  auto A = get_or_report(resolve_pts_sorts(*raw_type, sf->spec), rc);
  if (!A) return rc;
  auto cand = get_or_report(parse_term_in(term_src, scope, "<term>"), rc);
  if (!cand) return rc;

  auto rep = check_inhabitation_theorem(*emb, *pctx, *A, *cand, common.fuel);
  if (!rep.ok()) {
    std::cerr << "error: " << to_string(rep.error()) << "\n";
    return exit_code_for(rep.error());
  }
  const InhabitationReport& r = rep.value();
  if (!r.ok()) {
    if (r.extract.failure)
      std::cerr << "error: " << to_string(*r.extract.failure) << "\n";
    else
      std::cerr << "error: extraction failed\n";
    return 1;
  }
  std::cout << print_term_in(r.extract.witness, *pctx) << "\n";
  return 0;
}

int cmd_roundtrip(const CommonArgs& common, const std::string& judg_path) {
  int rc = 0;
  auto sf = get_or_report(load_spec(common.spec_path), rc);
  if (!sf) return rc;
  auto emb = get_or_report(
      generate_embedding(sf->spec, sf->default_sort.value_or("")), rc);
  if (!emb) return rc;
  auto file = get_or_report(load_signature(judg_path), rc);
  if (!file) return rc;
  if (!judgments_only(*file, judg_path, rc)) return rc;

  Reporter rep;
  rep.json = common.json;
  for (const Judgment& raw : file->judgments) {
    auto rj = resolve_pts_judgment(raw, sf->spec);
    if (!rj.ok()) {
      rep.diag(raw.span, print_judgment(raw), rj.error());
      continue;
    }
    Judgment j = std::move(rj).take();
    auto tt = translate_term(*emb, j.ctx, j.subject, common.fuel);
    if (!tt.ok()) {
      rep.diag(j.span, print_judgment(j), tt.error());
      continue;
    }
    if (!alpha_eq(back_translate(*emb, tt.value()), j.subject)) {
      rep.fail(j.span, print_judgment(j), "subject does not round-trip");
      continue;
    }
    if (j.type) {
      auto ta = translate_type(*emb, j.ctx, j.type, common.fuel);
      if (!ta.ok()) {
        rep.diag(j.span, print_judgment(j), ta.error());
        continue;
      }
      if (!alpha_eq(back_translate(*emb, ta.value()), j.type)) {
        rep.fail(j.span, print_judgment(j), "type does not round-trip");
        continue;
      }
    }
    rep.ok(j.span, print_judgment(j));
  }
  return rep.exit_code();
}

// Random terms over the signature's constants with a strict node bound,
// biased toward decoder redexes so the diamond check sees real overlaps.
struct LabGen {
  std::mt19937_64 eng;
  std::vector<std::pair<std::string, std::string>> axioms;  // (decoder, code)
  std::vector<std::pair<std::string, std::string>> rules;
  std::vector<std::string> consts;

  explicit LabGen(std::uint64_t seed) : eng(seed) {}
  int below(int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(eng);
  }

  TermPtr leaf(int binders) {
    if (binders > 0 && below(100) < 45) return mk_var(below(binders));
    if (!consts.empty() && below(100) < 85)
      return mk_const(consts[static_cast<size_t>(below(static_cast<int>(consts.size())))]);
    return mk_lpm_type();
  }

  TermPtr gen(int budget, int binders) {
    if (budget <= 2) return leaf(binders);
    int r = below(100);
    if (r < 16 && !axioms.empty() && budget >= 3) {
      const auto& [eps, code] = axioms[static_cast<size_t>(below(static_cast<int>(axioms.size())))];
      return mk_app(mk_const(eps), mk_const(code));
    }
    if (r < 32 && !rules.empty() && budget >= 7) {
      const auto& [eps, prod] = rules[static_cast<size_t>(below(static_cast<int>(rules.size())))];
      int slack = budget - 7;
      int bx = 1 + (slack > 0 ? below(slack + 1) : 0);
      TermPtr x = gen(bx, binders);
      TermPtr y = gen(budget - 5 - term_size(x), binders);
      return mk_app(mk_const(eps), mk_app(mk_app(mk_const(prod), x), y));
    }
    if (r < 52 && budget >= 5) {
      int third = (budget - 2) / 3;
      TermPtr ann = gen(third, binders);
      TermPtr body = gen(third, binders + 1);
      TermPtr arg = gen(budget - 2 - term_size(ann) - term_size(body), binders);
      return mk_app(mk_lam(ann, body, "x"), arg);
    }
    if (r < 68) {
      int half = (budget - 1) / 2;
      TermPtr f = gen(half, binders);
      return mk_app(f, gen(budget - 1 - term_size(f), binders));
    }
    if (r < 84) {
      int half = (budget - 1) / 2;
      TermPtr ann = gen(half, binders);
      return mk_lam(ann, gen(budget - 1 - term_size(ann), binders + 1), "x");
    }
    int half = (budget - 1) / 2;
    TermPtr dom = gen(half, binders);
    return mk_pi(dom, gen(budget - 1 - term_size(dom), binders + 1), "x");
  }
};

int cmd_lab_diamond(const std::string& sig_path, std::uint64_t seed,
                    int max_size, int count) {
  int rc = 0;
  auto file = get_or_report(load_signature(sig_path), rc);
  if (!file) return rc;
  RewriteSystem rs(file->rules);
  auto tab = infer_universe_table(rs);
  if (!tab) {
    std::cerr << "error: unsupported: the rules are not a universe decoding system\n";
    return 2;
  }

  LabGen gen(seed);
  for (const auto& [key, entry] : tab->axioms) {
    auto cut = key.find('\n');
    gen.axioms.emplace_back(key.substr(0, cut), key.substr(cut + 1));
  }
  for (const auto& [key, entry] : tab->rules) {
    auto cut = key.find('\n');
    gen.rules.emplace_back(key.substr(0, cut), key.substr(cut + 1));
  }
  for (const SigEntry& e : file->signature.entries) gen.consts.push_back(e.name);

  for (int i = 0; i < count; ++i) {
    TermPtr t = gen.gen(max_size, 0);
    auto par = par_step_enumerate(*tab, t, max_size);
    if (!par.ok()) {
      std::cerr << "error: " << to_string(par.error()) << "\n";
      return exit_code_for(par.error());
    }
    std::set<std::string> par_keys;
    for (const TermPtr& u : par.value()) par_keys.insert(term_key(u));
    TermPtr dev = complete_development(*tab, t);
    if (par_keys.count(term_key(dev)) == 0) {
      std::cout << "FAIL development escapes the parallel step: " << print_term(t)
                << "\n";
      return 1;
    }
    for (const TermPtr& u : enumerate_one_step(rs, t)) {
      if (par_keys.count(term_key(u)) == 0) {
        std::cout << "FAIL single step escapes the parallel step: "
                  << print_term(t) << " -> " << print_term(u) << "\n";
        return 1;
      }
    }
    for (const TermPtr& u : par.value()) {
      auto closing = par_step_enumerate(*tab, u, max_size * 40);
      if (!closing.ok()) {
        std::cerr << "error: " << to_string(closing.error()) << "\n";
        return exit_code_for(closing.error());
      }
      bool closed = false;
      for (const TermPtr& w : closing.value())
        if (alpha_eq(w, dev)) { closed = true; break; }
      if (!closed) {
        std::cout << "FAIL diamond: " << print_term(t) << " via " << print_term(u)
                  << " cannot reach " << print_term(dev) << "\n";
        return 1;
      }
    }
  }
  std::cout << "OK checked " << count << " terms\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lambda-Pi modulo kernel with pure type system embeddings"};
  app.require_subcommand(1);

  CommonArgs common;
  int rc = 0;

  std::string judg_path, sig_path, out_path, mode = "term";
  std::string ctx_src, type_src, term_src;
  bool minus = false, trace = false;
  std::uint64_t seed = 0;
  int max_size = kParStepSizeCap;
  int count = 10000;

  auto* pts = app.add_subcommand("pts-check", "check judgments against a specification");
  pts->add_option("--spec", common.spec_path, "specification file")->required();
  pts->add_option("file", judg_path, "judgment file")->required();
  pts->add_option("--fuel", common.fuel, "step budget per judgment");
  pts->add_flag("--json", common.json, "one JSON record per judgment");
  pts->callback([&] { rc = cmd_pts_check(common, judg_path); });

  auto* embed = app.add_subcommand("embed", "print the generated signature");
  embed->add_option("--spec", common.spec_path)->required();
  embed->add_option("-o,--output", out_path, "write to a file instead of stdout");
  embed->callback([&] { rc = cmd_embed(common, out_path); });

  auto* trans = app.add_subcommand("translate", "translate judgments across the embedding");
  trans->add_option("--spec", common.spec_path)->required();
  trans->add_option("--mode", mode, "term, type, or context")
      ->check(CLI::IsMember({"term", "type", "context"}));
  trans->add_option("file", judg_path)->required();
  trans->add_option("--fuel", common.fuel);
  trans->add_flag("--json", common.json);
  trans->callback([&] { rc = cmd_translate(common, mode, judg_path); });

  auto* lc = app.add_subcommand("lpm-check", "check a signature file and its judgments");
  lc->add_option("sigfile", sig_path)->required();
  lc->add_option("file", judg_path, "extra judgment file");
  lc->add_option("--fuel", common.fuel);
  lc->add_flag("--json", common.json);
  lc->add_flag("--lambda-pi-minus", minus, "no Kind abstractions, conversion by rewriting only");
  lc->add_flag("--trace", trace, "log conversion steps to stderr");
  lc->callback([&] {
    rc = cmd_lpm_check(sig_path, judg_path, common.fuel, common.json, minus, trace);
  });

  auto* norm = app.add_subcommand("normalize", "print the beta-rewrite normal form");
  norm->add_option("sigfile", sig_path)->required();
  norm->add_option("term", term_src)->required();
  norm->add_option("--fuel", common.fuel);
  norm->add_flag("--lambda-pi-minus", minus, "rewrite steps only");
  norm->callback([&] { rc = cmd_normalize(sig_path, term_src, common.fuel, minus); });

  auto* back = app.add_subcommand("back", "back-translate a signature term");
  back->add_option("--spec", common.spec_path)->required();
  back->add_option("term", term_src)->required();
  back->callback([&] { rc = cmd_back(common, term_src); });

  auto* extract = app.add_subcommand("extract", "run the inhabitation pipeline");
  extract->add_option("--spec", common.spec_path)->required();
  extract->add_option("--ctx", ctx_src, "source-side context, e.g. \"nat:Type\"");
  extract->add_option("--type", type_src, "source-side type")->required();
  extract->add_option("--term", term_src, "candidate proof term")->required();
  extract->add_option("--fuel", common.fuel);
  extract->callback([&] { rc = cmd_extract(common, ctx_src, type_src, term_src); });

  auto* rt = app.add_subcommand("roundtrip", "translate and back-translate judgments");
  rt->add_option("--spec", common.spec_path)->required();
  rt->add_option("file", judg_path)->required();
  rt->add_option("--fuel", common.fuel);
  rt->add_flag("--json", common.json);
  rt->callback([&] { rc = cmd_roundtrip(common, judg_path); });

  auto* lab = app.add_subcommand("lab-diamond", "sample terms and check the diamond property");
  lab->add_option("sigfile", sig_path)->required();
  lab->add_option("--seed", seed);
  lab->add_option("--max-size", max_size, "node budget per sampled term");
  lab->add_option("--count", count, "number of sampled terms");
  lab->callback([&] { rc = cmd_lab_diamond(sig_path, seed, max_size, count); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return rc;
}
