#include "virtblow/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "virtblow/blowup.hpp"
#include "virtblow/config.hpp"
#include "virtblow/errors.hpp"
#include "virtblow/invariants.hpp"
#include "virtblow/serialize.hpp"
#include "virtblow/solver.hpp"
#include "virtblow/universal.hpp"

namespace vb::cli {

namespace {

enum class Format { json, table };

// Raised for flag combinations CLI11 cannot express.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  int rho = 0;
  int order = -1;
  std::string format = "table";
  std::string out_path;
};

struct Output {
  Json doc;
  std::string table;
  int exit_code = 0;
};

Json envelope(const std::string& command, Json inputs, Json results, Json provenance) {
  provenance["tool"] = kToolName;
  provenance["version"] = kToolVersion;
  return Json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"inputs", std::move(inputs)},
              {"results", std::move(results)},
              {"provenance", std::move(provenance)}};
}

Family closed_form(FamilyKind kind, int rho, int param, int order) {
  return kind == FamilyKind::verlinde ? family_verlinde(rho, param, order) : family_segre(rho, param, order);
}

Json relation_names(const std::vector<RelationId>& relations) {
  Json arr = Json::array();
  for (const auto& id : relations) arr.push_back(to_string(id));
  return arr;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

// Scan at a low order first; the full-order scan only runs if that choice is not clean.
struct ConventionChoice {
  Convention convention;
  ResidualReport report;
  std::vector<Convention> clean_conventions;
  int scan_order = 0;
  bool warning = false;
};

ConventionChoice choose_and_verify(const Family& family, const std::vector<RelationId>& relations,
                                   const std::string& flag) {
  ConventionChoice c;
  if (flag != "auto") {
    c.convention = parse_convention(flag);
    c.report = verify_family(family, relations, c.convention);
    c.scan_order = -1;
    return c;
  }
  const int quick = std::min(family.order(), 8);
  ScanResult scan = convention_scan(truncated(family, quick), relations);
  if (!scan.warning) {
    ResidualReport full = verify_family(family, relations, scan.chosen);
    if (full.clean()) {
      c.convention = scan.chosen;
      c.report = std::move(full);
      c.clean_conventions = scan.clean_conventions;
      c.scan_order = quick;
      return c;
    }
  }
  scan = convention_scan(family, relations);
  c.convention = scan.chosen;
  c.report = scan.report;
  c.clean_conventions = scan.clean_conventions;
  c.scan_order = family.order();
  c.warning = scan.warning;
  return c;
}

std::vector<RelationId> parse_relations(const std::vector<std::string>& texts) {
  std::vector<RelationId> out;
  for (const auto& t : texts) out.push_back(parse_relation(t));
  return out;
}

// ---- verify --------------------------------------------------------------

struct VerifyArgs {
  std::string family;
  std::optional<int> param;
  std::string input;
  std::string convention = "auto";
  std::vector<std::string> relations;
};

Output do_verify(const Common& common, const VerifyArgs& a) {
  Family family;
  std::string source;
  if (!a.input.empty()) {
    std::ifstream in(a.input);
    if (!in) throw ConfigError("cannot read input '" + a.input + "'");
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError("input '" + a.input + "' is not valid JSON: " + e.what());
    }
    const Json& fj = doc.contains("results") && doc["results"].contains("family") ? doc["results"]["family"] : doc;
    family = family_from_json(fj);
    if (common.order >= 0) {
      if (common.order > family.order()) throw UsageError("--order exceeds the order stored in the input");
      family = truncated(family, common.order);
    }
    if (common.rho != 0 && common.rho != family.rho) throw UsageError("--rho differs from the input family");
    if (!a.family.empty() && parse_family_kind(a.family) != family.kind) {
      throw UsageError("--family differs from the input family");
    }
    if (a.param && *a.param != family.parameter) throw UsageError("--param differs from the input family");
    source = "input file";
  } else {
    if (a.family.empty() || !a.param || common.rho == 0) {
      throw UsageError("verify needs --family, --param and --rho (or --input)");
    }
    family = closed_form(parse_family_kind(a.family), common.rho, *a.param, common.order < 0 ? 20 : common.order);
    source = "closed form";
  }
  std::vector<RelationId> relations = a.relations.empty() ? default_relations(family.kind, family.rho, family.parameter)
                                                          : parse_relations(a.relations);
  for (const auto& id : relations) validate_relation(id, family.kind, family.rho, family.parameter);

  const ConventionChoice c = choose_and_verify(family, relations, a.convention);

  Json inputs{{"family", to_string(family.kind)},
              {"rho", family.rho},
              {"param", family.parameter},
              {"order", family.order()},
              {"convention", a.convention},
              {"relations", a.relations.empty() ? Json("default") : relation_names(relations)}};
  if (!a.input.empty()) inputs["input"] = a.input;
  Json results = to_json(c.report);
  Json clean = Json::array();
  for (const auto& k : c.clean_conventions) clean.push_back(to_string(k));
  results["scan"] = Json{{"scan_order", c.scan_order}, {"clean_conventions", clean}, {"warning", c.warning}};

  Output out;
  out.exit_code = c.report.clean() ? 0 : 1;
  out.doc = envelope("verify", std::move(inputs), std::move(results), Json{{"family_source", source}});

  std::ostringstream t;
  t << to_string(family.kind) << " family, rho=" << family.rho << ", "
    << (family.kind == FamilyKind::verlinde ? "r=" : "s=") << family.parameter << ", order " << family.order()
    << ", convention " << to_string(c.convention) << "\n";
  std::size_t failing = 0;
  for (const auto& e : c.report.entries) {
    t << "  " << pad(to_string(e.id), 40);
    if (e.clean()) {
      t << "clean";
    } else {
      ++failing;
      t << "nonzero at order " << *e.first_nonzero;
    }
    if (e.id.kind == RelationKind::segre_exp_upper) t << "  (prefactor " << to_string(e.prefactor) << ")";
    t << "\n";
  }
  if (failing == 0) {
    t << "all clean (" << c.report.entries.size() << " relations)\n";
  } else {
    t << failing << " of " << c.report.entries.size() << " relations fail\n";
  }
  out.table = t.str();
  return out;
}

// ---- series --------------------------------------------------------------

struct SeriesArgs {
  std::string family;
  int param = 0;
};

Output do_series(const Common& common, const SeriesArgs& a) {
  const int order = common.order < 0 ? 10 : common.order;
  const Family family = closed_form(parse_family_kind(a.family), common.rho, a.param, order);
  Output out;
  out.doc = envelope("series",
                     Json{{"family", a.family}, {"rho", common.rho}, {"param", a.param}, {"order", order}},
                     Json{{"family", to_json(family)}}, Json{{"family_source", "closed form"}});
  std::ostringstream t;
  const bool segre = family.kind == FamilyKind::segre;
  for (SubsetMask J = 0; J < subset_count(family.rho); ++J) {
    auto line = [&](const char* name, const Series& s) {
      t << name << "_" << subset_label(J) << " =";
      for (int n = 0; n <= s.order(); ++n) t << (n ? ", " : " ") << to_string(s[n]);
      t << "\n";
    };
    line(segre ? "Y" : "A", family.base[J]);
    line(segre ? "Z" : "B", family.weight[J]);
    if (segre) line("S", family.linear[J]);
  }
  out.table = t.str();
  return out;
}

// ---- solve ---------------------------------------------------------------

struct SolveArgs {
  std::string target;
  std::string family;
  std::optional<int> param;
  int known_through = 2;
  std::optional<int> lookahead;
  std::string convention = "auto";
};

Json slot_values(const Ansatz& ansatz, const SolveResult& res) {
  Json arr = Json::array();
  for (std::size_t k = 0; k < ansatz.slots.size(); ++k) {
    Json row{{"slot", ansatz.slot_name(k)}};
    row["value"] = res.values[k] ? to_json(*res.values[k]) : Json(nullptr);
    row["determined_at"] = res.determined_at[k];
    arr.push_back(std::move(row));
  }
  return arr;
}

bool same_family(const Family& a, const Family& b) {
  return a.base == b.base && a.weight == b.weight && a.linear == b.linear;
}

// Conventions in index order; the first one the solver accepts wins.
SolveResult solve_with(const Ansatz& ansatz, const std::vector<RelationId>& relations, int order, int lookahead,
                       const std::string& flag) {
  if (flag != "auto") {
    return solve_incremental(ansatz, relations, order, {.convention = parse_convention(flag), .lookahead = lookahead});
  }
  std::string last;
  for (int k = 0; k < 8; ++k) {
    try {
      return solve_incremental(ansatz, relations, order,
                               {.convention = Convention::from_index(k), .lookahead = lookahead});
    } catch (const SolveError& e) {
      last = e.what();
    }
  }
  throw SolveError("no convention solves the ansatz; last error: " + last);
}

Output do_solve(const Common& common, const SolveArgs& a) {
  const int rho = common.rho;
  if (rho < 1) throw UsageError("solve needs --rho");
  Output out;
  Json inputs{{"target", a.target}, {"rho", rho}};
  std::ostringstream t;

  if (a.target == "constants") {
    const int order = common.order < 0 ? 2 * rho : common.order;
    const Family family = family_verlinde(rho, -rho, order);
    std::optional<Convention> conv;
    if (a.convention != "auto") conv = parse_convention(a.convention);
    const auto relations = verlinde_relations(rho, -rho);
    const ConstantsResult res = solve_constants_subset(family, relations, conv);
    const ConstantTable& table = beta_table(rho);
    Json values = Json::array();
    t << "B_J for rho=" << rho << " (convention " << to_string(res.convention) << ")\n";
    for (SubsetMask J = 0; J < subset_count(rho); ++J) {
      values.push_back(Json{{"J", subset_label(J)}, {"value", to_json(res.B_J[J])}});
      t << "  B_" << pad(subset_label(J), 12) << to_string(res.B_J[J]) << "\n";
    }
    const bool match = res.B_J == table.B_J;
    t << (match ? "matches" : "differs from") << " the closed-form table\n";
    inputs["order"] = order;
    inputs["convention"] = a.convention;
    out.doc = envelope("solve", std::move(inputs),
                       Json{{"constants", std::move(values)},
                            {"convention", to_json(res.convention)},
                            {"matches_closed_form", match}},
                       Json{{"relations", relation_names(relations)}, {"order", res.order},
                            {"seed_source", "closed form A_J"}});
    out.table = t.str();
    return out;
  }

  const int order = common.order < 0 ? 10 : common.order;
  Ansatz ansatz;
  std::vector<RelationId> relations;
  Family reference;
  int lookahead = a.lookahead.value_or(0);
  if (a.target == "gamma") {
    lookahead = a.lookahead.value_or(2);
    ansatz = gamma_ansatz(rho, order + lookahead);
    relations = verlinde_relations(rho, 0);
    reference = family_verlinde(rho, 0, order);
  } else if (a.target == "segre-linear") {
    ansatz = segre_linear_ansatz(rho, order + lookahead);
    for (const auto& id : segre_relations(rho, 0)) {
      if (id.kind == RelationKind::segre_exp_lower && id.layer == 1) relations.push_back(id);
    }
    reference = family_segre(rho, 0, order);
  } else if (a.target == "family") {
    if (a.family.empty() || !a.param) throw UsageError("solve --target family needs --family and --param");
    lookahead = a.lookahead.value_or(2);
    const FamilyKind kind = parse_family_kind(a.family);
    const Family full = closed_form(kind, rho, *a.param, order + lookahead);
    ansatz = decomposed_ansatz(full, a.known_through);
    relations = default_relations(kind, rho, *a.param);
    reference = truncated(full, order);
    inputs["family"] = a.family;
    inputs["param"] = *a.param;
    inputs["known_through"] = a.known_through;
  } else {
    throw UsageError("unknown solve target '" + a.target + "' (expected constants, gamma, segre-linear or family)");
  }
  inputs["order"] = order;
  inputs["lookahead"] = lookahead;
  inputs["convention"] = a.convention;

  const SolveResult res = solve_with(ansatz, relations, order, lookahead, a.convention);
  const bool match = same_family(res.family, reference);
  std::size_t fixed = 0;
  for (const auto& v : res.values) fixed += v.has_value() ? 1 : 0;
  t << "solved " << fixed << " of " << ansatz.slots.size() << " unknown coefficients through order " << order
    << " (convention " << to_string(res.convention) << ", lookahead " << lookahead << ")\n";
  t << "solved family " << (match ? "matches" : "differs from") << " the closed form\n";

  out.doc = envelope("solve", std::move(inputs),
                     Json{{"slots", slot_values(ansatz, res)},
                          {"family", to_json(res.family)},
                          {"convention", to_json(res.convention)},
                          {"matches_closed_form", match}},
                     Json{{"relations", relation_names(res.relations)},
                          {"max_order", res.max_order},
                          {"lookahead", lookahead},
                          {"seed_source", res.seed_source}});
  out.table = t.str();
  return out;
}

// ---- donaldson / fourmanifold --------------------------------------------

struct InvariantArgs {
  std::string surface;
  std::optional<long long> c2;
  std::optional<std::string> L2, LK, point_weight;
  std::vector<std::string> L_a;
  std::vector<long long> c1_pair;
  std::optional<long long> c1_sq, c1_K;
  bool with_series = false;
  // fourmanifold
  std::optional<long long> sigma, euler;
  bool twist = false;
};

Setup setup_from(const Common& common, const InvariantArgs& a, const std::optional<Setup>& base) {
  Setup st = base.value_or(Setup{});
  if (common.rho != 0) st.rho = common.rho;
  if (!base && common.rho == 0) throw UsageError("--rho is required (the config has no setup table)");
  if (a.L2) st.line.L2 = parse_rational(*a.L2);
  if (a.LK) st.line.LK = parse_rational(*a.LK);
  if (a.point_weight) st.point_weight = parse_rational(*a.point_weight);
  if (!a.L_a.empty()) {
    st.line.L_a.clear();
    for (const auto& q : a.L_a) st.line.L_a.push_back(parse_rational(q));
  }
  if (!a.c1_pair.empty()) st.c1_pair = a.c1_pair;
  if (a.c1_sq) st.c1_sq = *a.c1_sq;
  if (a.c1_K) st.c1_K = *a.c1_K;
  if (a.L2 || a.LK) st.line.chi_L.reset();
  return st;
}

Json setup_json(const Setup& st) {
  Json L_a = Json::array();
  for (const auto& q : st.line.L_a) L_a.push_back(to_string(q));
  return Json{{"rho", st.rho},
              {"c1_pair", st.c1_pair},
              {"c1_sq", st.c1_sq},
              {"c1_K", st.c1_K},
              {"L2", to_string(st.line.L2)},
              {"LK", to_string(st.line.LK)},
              {"L_a", L_a},
              {"u", to_string(st.point_weight)}};
}

Output invariant_output(const std::string& command, Json inputs, const InvariantResult& r, bool with_series) {
  Json results{{"value", to_json(r.value)}, {"vd", r.vd}, {"pipelines", r.pipelines}};
  if (with_series && r.series) results["series"] = to_json(*r.series);
  Output out;
  out.doc = envelope(command, std::move(inputs), std::move(results), Json{{"pipelines", r.pipelines}});
  out.table = to_string(r.value) + "\n";
  return out;
}

int order_for(const Common& common, long long dim) {
  if (common.order >= 0) return common.order;
  return static_cast<int>(std::max<long long>(dim, 0));
}

Output do_donaldson(const Common& common, const InvariantArgs& a) {
  if (!a.c2) throw UsageError("donaldson needs --c2");
  const SurfaceConfig cfg = load_surface_config(a.surface);
  const Setup st = resolve_pairings(setup_from(common, a, cfg.setup), cfg.surface);
  const long long dim = vd(st.rho, st.c1_sq, *a.c2, cfg.surface.chi_O);
  const InvariantResult r = donaldson(cfg.surface, st, *a.c2, order_for(common, dim));
  Json inputs{{"surface", a.surface}, {"chi_O", cfg.surface.chi_O}, {"K2", cfg.surface.K2},
              {"c2", *a.c2}, {"setup", setup_json(st)}};
  return invariant_output("donaldson", std::move(inputs), r, a.with_series);
}

Output do_fourmanifold(const Common& common, const InvariantArgs& a) {
  if (!a.c2 || !a.sigma || !a.euler) throw UsageError("fourmanifold needs --sigma, --euler and --c2");
  SurfaceData classes;
  std::optional<Setup> base;
  if (!a.surface.empty()) {
    const SurfaceConfig cfg = load_surface_config(a.surface);
    classes = cfg.surface;
    base = cfg.setup;
  } else {
    classes.classes = {BasicClass{1, 0, 0, ClassRole::zero}};
    classes.gram = {{0}};
  }
  if ((*a.sigma + *a.euler) % 4 != 0) throw DomainError("sigma + e must be divisible by 4");
  SurfaceData shaped = classes;
  shaped.chi_O = (*a.sigma + *a.euler) / 4;
  shaped.K2 = 3 * *a.sigma + 2 * *a.euler;
  const Setup st = resolve_pairings(setup_from(common, a, base), shaped);
  const long long dim = vd(st.rho, st.c1_sq, *a.c2, shaped.chi_O);
  const InvariantResult r = fourmanifold_donaldson(*a.sigma, *a.euler, classes.classes, classes.gram, st, *a.c2,
                                                   order_for(common, dim), a.twist);
  Json inputs{{"sigma", *a.sigma}, {"euler", *a.euler}, {"twist", a.twist}, {"c2", *a.c2},
              {"classes", a.surface.empty() ? Json("zero class only") : Json(a.surface)},
              {"setup", setup_json(st)}};
  return invariant_output("fourmanifold", std::move(inputs), r, a.with_series);
}

void add_common(CLI::App* sub, Common& c, bool rho_required) {
  auto* rho = sub->add_option("--rho", c.rho, "rank rho")->check(CLI::Range(1, 12));
  if (rho_required) rho->required();
  sub->add_option("--order", c.order, "truncation order")->check(CLI::Range(0, 400));
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "table"}));
  sub->add_option("--out", c.out_path, "write output to this file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact blowup-formula engine for Verlinde and Segre generating series", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common common;
  VerifyArgs va;
  SeriesArgs sa;
  SolveArgs so;
  InvariantArgs ia;

  auto* verify = app.add_subcommand("verify", "check the blowup relations of a family");
  add_common(verify, common, false);
  verify->add_option("--family", va.family, "verlinde or segre")->check(CLI::IsMember({"verlinde", "segre"}));
  verify->add_option("--param", va.param, "r (Verlinde) or s (Segre)");
  verify->add_option("--input", va.input, "family JSON written by `series` or `solve`");
  verify->add_option("--convention", va.convention, "auto, identity, or flags joined by '+'");
  verify->add_option("--relation", va.relations, "restrict to these relations (repeatable)");

  auto* series = app.add_subcommand("series", "print a closed-form family");
  add_common(series, common, true);
  series->add_option("--family", sa.family, "verlinde or segre")
      ->required()
      ->check(CLI::IsMember({"verlinde", "segre"}));
  series->add_option("--param", sa.param, "r (Verlinde) or s (Segre)")->required();

  auto* solve = app.add_subcommand("solve", "re-derive coefficients from the blowup relations");
  add_common(solve, common, true);
  solve->add_option("--target", so.target, "constants, gamma, segre-linear or family")->required();
  solve->add_option("--family", so.family, "family kind for --target family")
      ->check(CLI::IsMember({"verlinde", "segre"}));
  solve->add_option("--param", so.param, "r or s for --target family");
  solve->add_option("--known-through", so.known_through, "coefficients kept from the closed form")
      ->check(CLI::Range(0, 400));
  solve->add_option("--lookahead", so.lookahead, "extra residual orders")->check(CLI::Range(0, 20));
  solve->add_option("--convention", so.convention, "auto, identity, or flags joined by '+'");

  auto add_invariant = [&](CLI::App* sub) {
    add_common(sub, common, false);
    sub->add_option("--c2", ia.c2, "second Chern class");
    sub->add_option("--L2", ia.L2, "L^2 (rational)");
    sub->add_option("--LK", ia.LK, "L.K (rational)");
    sub->add_option("--u", ia.point_weight, "point class weight u (rational)");
    sub->add_option("--La", ia.L_a, "a.line per basic class")->delimiter(',');
    sub->add_option("--c1-pair", ia.c1_pair, "a.c1 per basic class")->delimiter(',');
    sub->add_option("--c1-sq", ia.c1_sq, "c1^2");
    sub->add_option("--c1-K", ia.c1_K, "c1.K");
    sub->add_flag("--series", ia.with_series, "include the generating series in JSON output");
  };
  auto* don = app.add_subcommand("donaldson", "rank rho Donaldson invariant of a surface");
  add_invariant(don);
  don->add_option("--surface", ia.surface, "surface config (YAML)")->required();

  auto* four = app.add_subcommand("fourmanifold", "Donaldson invariant of a 4-manifold from sigma and e");
  add_invariant(four);
  four->add_option("--sigma", ia.sigma, "signature")->required();
  four->add_option("--euler", ia.euler, "Euler number")->required();
  four->add_option("--surface", ia.surface, "basic classes (same YAML layout; chi_O and K2 are replaced)");
  four->add_flag("--twist", ia.twist, "apply the sign (-1)^{(rho-1)(c1^2 - c1.K)/2}");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Output result;
  try {
    if (*verify) {
      result = do_verify(common, va);
    } else if (*series) {
      result = do_series(common, sa);
    } else if (*solve) {
      result = do_solve(common, so);
    } else if (*don) {
      result = do_donaldson(common, ia);
    } else {
      result = do_fourmanifold(common, ia);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const SolveError& e) {
    err << "solve failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const std::string text = common.format == "json" ? result.doc.dump(2) + "\n" : result.table;
  if (common.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(common.out_path);
    if (!file) {
      err << "input error: cannot write '" << common.out_path << "'\n";
      return 2;
    }
    file << text;
  }
  return result.exit_code;
}

}  // namespace vb::cli
