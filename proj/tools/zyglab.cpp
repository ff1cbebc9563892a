// zyglab: batch front end for the Zygmund-graph experiments.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "zyg/cli/config.hpp"
#include "zyg/report.hpp"
#include "zyg/serialize.hpp"
#include "zyg/zyg.hpp"

namespace fs = std::filesystem;
using namespace zyg;
using zyg::cli::CommandSchema;
using zyg::cli::Settings;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

const std::vector<CommandSchema>& schemas() {
  static const std::vector<CommandSchema> all = {
      {"seminorm",
       "sampled second- and first-difference profiles with a regularity verdict",
       {{"field", "", "catalog field spec", true},
        {"x_samples", "4096", "base points"},
        {"k_min", "4", "coarsest step 2^-k_min"},
        {"k_max", "20", "finest step 2^-k_max"},
        {"seed", "1", "sampling seed"}}},
      {"fit",
       "minimax affine fit on one ball plus the empirical constant M",
       {{"field", "", "catalog field spec", true},
        {"center", "auto", "ball centre, ';'-separated (auto: 1/2 in every coordinate)"},
        {"radius", "0.25", "ball radius"},
        {"grid", "0", "grid points per axis (0: default)"},
        {"balls", "256", "random balls for the M estimate"},
        {"k_min", "4", "largest radius 2^-k_min"},
        {"k_max", "14", "smallest radius 2^-k_max"},
        {"seed", "1", "ball family seed"}}},
      {"balls",
       "offset-ball pairs over a lattice covering the graph on [0,1]^d",
       {{"field", "", "catalog field spec", true},
        {"delta", "0.5", "neighbourhood width"},
        {"M", "auto", "affine-approximation constant (auto: estimated)"},
        {"r", "0.00390625", "base radius"},
        {"grid", "0", "fit grid points per axis"},
        {"samples", "1000", "disjointness samples per offset ball"},
        {"balls", "256", "random balls for the M estimate"},
        {"k_min", "4", "largest estimation radius 2^-k_min"},
        {"k_max", "14", "smallest estimation radius 2^-k_max"},
        {"seed", "1", "ball family seed"}}},
      {"measure",
       "dyadic measure tree: doubling check and weight log",
       {{"measure", "", "tree spec", true},
        {"samples", "200", "doubling sample balls"},
        {"r_min", "0.015625", "smallest sample radius"},
        {"r_max", "0.25", "largest sample radius"},
        {"claimed_C", "auto", "doubling constant to test against (auto: none)"},
        {"log_levels", "3", "levels written to weights.txt"},
        {"seed", "1", "sampling seed"}}},
      {"certify",
       "thinness certificate for the graph under a dyadic measure",
       {{"field", "", "catalog field spec", true},
        {"measure", "", "tree spec on [0,1]^(d+1)", true},
        {"epsilon", "0.05", "mass target"},
        {"M", "auto", "affine-approximation constant (auto: estimated on the embedded field)"},
        {"margin", "0.25", "vertical margin of the embedding"},
        {"balls", "256", "random balls for the M estimate"},
        {"k_min", "4", "largest estimation radius 2^-k_min"},
        {"k_max", "14", "smallest estimation radius 2^-k_max"},
        {"coverage_samples", "20000", "graph samples for the coverage check"},
        {"doubling_samples", "200", "doubling sample balls"},
        {"seed", "1", "sampling seed"}}},
      {"profile",
       "mass brackets of the graph neighbourhoods E_delta, delta = 2^-k",
       {{"field", "", "catalog field spec", true},
        {"measure", "", "tree spec on [0,1]^(d+1)", true},
        {"k_min", "3", "widest neighbourhood 2^-k_min"},
        {"k_max", "10", "narrowest neighbourhood 2^-k_max"},
        {"margin", "0.25", "vertical margin of the embedding"}}},
      {"porosity",
       "largest hole ratio in graph balls of radius 2^-k",
       {{"field", "", "catalog field spec", true},
        {"k_min", "4", "largest radius 2^-k_min"},
        {"k_max", "12", "smallest radius 2^-k_max"},
        {"centers", "0.1;0.37;0.8", "base abscissae, ';'-separated"},
        {"attempts", "200", "random candidates per ratio"},
        {"seed", "1", "candidate seed"}}},
  };
  return all;
}

const CommandSchema& schema_for(const std::string& name) {
  for (const auto& s : schemas()) {
    if (s.name == name) return s;
  }
  throw ConfigurationError("unknown command '" + name + "'");
}

struct Context {
  std::string command;
  Settings settings;
  fs::path output;
};

std::string csv_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_json(const fs::path& path, const Json& j) { write_atomic(path, j.dump(2) + "\n"); }

Json header(const Context& ctx) { return report_header(ctx.command, ctx.settings.values()); }

std::vector<Ball> estimation_family(const Settings& s, std::size_t d) {
  return random_ball_family(d, s.count("balls"), s.real("k_min"), s.real("k_max"),
                            static_cast<std::uint64_t>(s.count("seed")));
}

int cmd_seminorm(const Context& ctx) {
  const auto& s = ctx.settings;
  const auto f = ScalarField::parse(s.text("field"));
  SamplingPlan plan{s.count("x_samples"),
                    dyadic_scales(static_cast<int>(s.integer("k_min")), static_cast<int>(s.integer("k_max"))),
                    static_cast<std::uint64_t>(s.count("seed"))};
  const auto rep = classify(f, plan);
  std::ostringstream csv;
  write_profile_csv(csv, rep.rows);
  write_atomic(ctx.output / "seminorm.csv", csv.str());
  double seminorm = 0.0;
  for (const auto& r : rep.rows) seminorm = std::max(seminorm, r.max_second_ratio);
  Json j{{"header", header(ctx)},
         {"field", f.spec()},
         {"seminorm_lower_bound", seminorm},
         {"classification", to_json(rep)},
         {"verdict", rep.consistent ? "pass" : "fail"}};
  write_json(ctx.output / "seminorm.json", j);
  std::cout << "seminorm >= " << format_real(seminorm) << ", verdict " << to_string(rep.verdict) << " ("
            << (rep.consistent ? "consistent" : "inconsistent") << " with " << rep.declared.describe() << ")\n";
  return rep.consistent ? kExitPass : kExitFail;
}

int cmd_fit(const Context& ctx) {
  const auto& s = ctx.settings;
  const auto f = ScalarField::parse(s.text("field"));
  const std::size_t d = f.dimension();
  Point center = s.has("center") ? s.reals("center") : Point(d, 0.5);
  if (center.size() != d) throw ConfigurationError("center needs " + std::to_string(d) + " coordinates");
  const int grid = static_cast<int>(s.integer("grid"));
  const auto fit = fit_affine(f, Ball(center, s.real("radius")), grid);
  const auto family = estimation_family(s, d);
  const auto M = estimate_M(f, std::span<const Ball>(family), grid);
  Json j{{"header", header(ctx)},
         {"field", f.spec()},
         {"fit", to_json(fit)},
         {"M_estimate", Json{{"raw", M.raw}, {"clamped", M.clamped}, {"balls", family.size()}}}};
  write_json(ctx.output / "fit.json", j);
  std::cout << "sup_error " << format_real(fit.sup_error) << ", intercept " << format_real(fit.map.intercept)
            << ", M " << format_real(M.clamped) << "\n";
  return kExitPass;
}

int cmd_balls(const Context& ctx) {
  const auto& s = ctx.settings;
  const auto f = ScalarField::parse(s.text("field"));
  const std::size_t d = f.dimension();
  double M = 0.0;
  if (const auto given = s.optional_real("M")) {
    M = *given;
  } else {
    const auto family = estimation_family(s, d);
    M = estimate_M(f, std::span<const Ball>(family), static_cast<int>(s.integer("grid"))).clamped;
  }
  LemmaParams params;
  params.delta = s.real("delta");
  params.M = M;
  params.r = s.real("r");
  params.fit_grid = static_cast<int>(s.integer("grid"));
  params.disjointness_samples = s.count("samples");
  const auto cover = cover_graph(f, Box::unit(d), params);

  std::string lines;
  std::size_t vertical = 0, bound_failures = 0, disjoint_failures = 0;
  double worst_ratio = 0.0;
  for (const auto& p : cover.pairs) {
    lines += to_json(p).dump() + "\n";
    if (p.case_tag == CaseTag::vertical) ++vertical;
    const double centre_bound = (5.0 * p.M + 1.0) * p.base.radius;
    if (p.center_distance > centre_bound + 1e-12 || p.ball_distance > p.distance_bound + 1e-12) ++bound_failures;
    if (!p.disjointness.passed()) ++disjoint_failures;
    worst_ratio = std::max(worst_ratio, p.center_distance / centre_bound);
  }
  write_atomic(ctx.output / "pairs.jsonl", lines);
  const bool pass = bound_failures == 0 && disjoint_failures == 0 && cover.coverage_verified;
  Json j{{"header", header(ctx)},
         {"field", f.spec()},
         {"M", M},
         {"pairs", cover.pairs.size()},
         {"vertical_pairs", vertical},
         {"gradient_pairs", cover.pairs.size() - vertical},
         {"distance_bound_failures", bound_failures},
         {"disjointness_failures", disjoint_failures},
         {"max_center_distance_over_5M_plus_1_r", worst_ratio},
         {"lattice_spacing", cover.spacing},
         {"refinements", cover.refinements},
         {"coverage_verified", cover.coverage_verified},
         {"verdict", pass ? "pass" : "fail"}};
  write_json(ctx.output / "balls.json", j);
  std::cout << cover.pairs.size() << " pairs (" << vertical << " vertical), " << bound_failures
            << " bound failures, " << disjoint_failures << " disjointness failures, coverage "
            << (cover.coverage_verified ? "verified" : "NOT verified") << "\n";
  return pass ? kExitPass : kExitFail;
}

int cmd_measure(const Context& ctx) {
  const auto& s = ctx.settings;
  const auto tree = DyadicMeasureTree::parse(s.text("measure"));
  DoublingPlan plan;
  plan.samples = s.count("samples");
  plan.r_min = s.real("r_min");
  plan.r_max = s.real("r_max");
  plan.seed = static_cast<std::uint64_t>(s.count("seed"));
  if (const auto c = s.optional_real("claimed_C")) plan.claimed_C = *c;
  const auto rep = verify_doubling(tree, plan);

  const int log_levels = std::min(static_cast<int>(s.integer("log_levels")), tree.depth());
  std::ostringstream weights;
  tree.write_weight_log(weights, log_levels);
  write_atomic(ctx.output / "weights.txt", weights.str());

  std::ostringstream csv;
  csv << "sample";
  for (int k = 0; k < tree.dimension(); ++k) csv << ",c" << k;
  csv << ",radius,outer_lower,outer_upper,inner_lower,inner_upper,ratio_lower,ratio_upper\n";
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& x = rep.samples[i];
    csv << i;
    for (double c : x.center) csv << ',' << csv_real(c);
    csv << ',' << csv_real(x.radius) << ',' << csv_real(x.outer.lower) << ',' << csv_real(x.outer.upper) << ','
        << csv_real(x.inner.lower) << ',' << csv_real(x.inner.upper) << ',' << csv_real(x.ratio_lower) << ','
        << csv_real(x.ratio_upper) << '\n';
  }
  write_atomic(ctx.output / "doubling.csv", csv.str());

  const bool pass = rep.violations.empty();
  Json j{{"header", header(ctx)},
         {"measure", tree.spec()},
         {"C", rep.C},
         {"slack", rep.slack},
         {"resolution", rep.resolution},
         {"violations", rep.violations},
         {"verdict", pass ? "pass" : "fail"}};
  write_json(ctx.output / "measure.json", j);
  std::cout << "doubling C <= " << format_real(rep.C) << " (slack " << format_real(rep.slack) << "), "
            << rep.violations.size() << " violations\n";
  return pass ? kExitPass : kExitFail;
}

int cmd_certify(const Context& ctx) {
  const auto& s = ctx.settings;
  const auto raw = ScalarField::parse(s.text("field"));
  const auto tree = DyadicMeasureTree::parse(s.text("measure"));
  const auto emb = embed_in_unit_cube(raw, s.real("margin"));
  double M = 0.0;
  if (const auto given = s.optional_real("M")) {
    M = *given;
  } else {
    const auto family = estimation_family(s, emb.field.dimension());
    M = estimate_M(emb.field, std::span<const Ball>(family)).clamped;
  }
  CertifyOptions opt;
  opt.coverage_samples = s.count("coverage_samples");
  opt.doubling.samples = s.count("doubling_samples");
  opt.doubling.seed = static_cast<std::uint64_t>(s.count("seed"));
  const double eps = s.real("epsilon");

  Json j{{"header", header(ctx)},
         {"embedding", Json{{"scale", emb.scale}, {"offset", emb.offset}, {"field", emb.field.spec()}}}};
  try {
    const auto cert = certify_thinness(emb.field, tree, eps, M, opt);
    j["certificate"] = to_json(cert);
    j["verdict"] = cert.pass ? "pass" : "fail";
    write_json(ctx.output / "certificate.json", j);
    std::cout << "certificate " << (cert.pass ? "pass" : "fail") << ": delta " << format_real(cert.delta)
              << ", " << cert.cover_size << " balls, " << cert.disjoint_size << " disjoint, K " << cert.K
              << ", p " << cert.p << "\n";
    return cert.pass ? kExitPass : kExitFail;
  } catch (const ScheduleExhaustedError& e) {
    Json tried = Json::array();
    for (const auto& [delta, upper] : e.achieved()) tried.push_back(Json{{"delta", delta}, {"slab_upper", upper}});
    const long K = zygmund_K(M);
    j["certificate"] = Json{{"M", M},
                            {"K", K},
                            {"p", doubling_power(K)},
                            {"epsilon", eps},
                            {"threshold", e.threshold()},
                            {"delta_search", tried},
                            {"reason", e.what()}};
    j["verdict"] = "fail";
    write_json(ctx.output / "certificate.json", j);
    std::cerr << "certificate fail: " << e.what() << "\n";
    return kExitFail;
  }
}

int cmd_profile(const Context& ctx) {
  const auto& s = ctx.settings;
  const auto raw = ScalarField::parse(s.text("field"));
  const auto tree = DyadicMeasureTree::parse(s.text("measure"));
  const auto emb = embed_in_unit_cube(raw, s.real("margin"));
  std::vector<double> deltas;
  for (long k = s.integer("k_min"); k <= s.integer("k_max"); ++k) deltas.push_back(std::exp2(-static_cast<double>(k)));
  const auto rows = neighborhood_mass_profile(emb.field, tree, deltas);

  std::ostringstream csv;
  csv << "delta,lower,upper\n";
  Json arr = Json::array();
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv << csv_real(rows[i].delta) << ',' << csv_real(rows[i].mass.lower) << ',' << csv_real(rows[i].mass.upper)
        << '\n';
    arr.push_back(Json{{"delta", rows[i].delta}, {"mass", to_json(rows[i].mass)}});
    if (i > 0 && !(rows[i].mass.upper < rows[i - 1].mass.upper)) decreasing = false;
  }
  write_atomic(ctx.output / "profile.csv", csv.str());
  Json j{{"header", header(ctx)},
         {"embedding", Json{{"scale", emb.scale}, {"offset", emb.offset}, {"field", emb.field.spec()}}},
         {"measure", tree.spec()},
         {"rows", arr},
         {"strictly_decreasing", decreasing},
         {"verdict", decreasing ? "pass" : "fail"}};
  write_json(ctx.output / "profile.json", j);
  std::cout << rows.size() << " neighbourhood masses, upper bounds "
            << (decreasing ? "strictly decreasing" : "NOT strictly decreasing") << "\n";
  return decreasing ? kExitPass : kExitFail;
}

int cmd_porosity(const Context& ctx) {
  const auto& s = ctx.settings;
  const auto f = ScalarField::parse(s.text("field"));
  std::vector<Point> bases;
  for (double c : s.reals("centers")) bases.emplace_back(f.dimension(), c);
  const auto rows = porosity_scale_table(f, bases, static_cast<int>(s.integer("k_min")),
                                         static_cast<int>(s.integer("k_max")), s.count("attempts"),
                                         static_cast<std::uint64_t>(s.count("seed")));
  std::ostringstream csv;
  csv << "k,radius";
  for (std::size_t k = 0; k <= f.dimension(); ++k) csv << ",z" << k;
  csv << ",best_a\n";
  double worst = 1.0;
  Json arr = Json::array();
  for (const auto& r : rows) {
    csv << r.k << ',' << csv_real(r.radius);
    for (double z : r.center) csv << ',' << csv_real(z);
    csv << ',' << csv_real(r.best_a) << '\n';
    arr.push_back(Json{{"k", r.k}, {"radius", r.radius}, {"center", r.center}, {"best_a", r.best_a}});
    worst = std::min(worst, r.best_a);
  }
  write_atomic(ctx.output / "porosity.csv", csv.str());
  const bool pass = !rows.empty() && worst > 0.0;
  Json j{{"header", header(ctx)},
         {"field", f.spec()},
         {"rows", arr},
         {"min_best_a", worst},
         {"verdict", pass ? "pass" : "fail"}};
  write_json(ctx.output / "porosity.json", j);
  std::cout << rows.size() << " probes, smallest hole ratio " << format_real(worst) << "\n";
  return pass ? kExitPass : kExitFail;
}

int dispatch(const std::string& command, const std::map<std::string, std::string>& file,
             const std::map<std::string, std::string>& flags, const fs::path& output) {
  static const std::map<std::string, std::function<int(const Context&)>> table = {
      {"seminorm", cmd_seminorm}, {"fit", cmd_fit},         {"balls", cmd_balls},      {"measure", cmd_measure},
      {"certify", cmd_certify},   {"profile", cmd_profile}, {"porosity", cmd_porosity}};
  const auto& schema = schema_for(command);
  if (const auto it = file.find("command"); it != file.end() && it->second != command) {
    throw ConfigurationError("config file is for command '" + it->second + "', not '" + command + "'");
  }
  Context ctx{command, Settings(cli::resolve(schema, file, flags)), output};
  return table.at(command)(ctx);
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ZYGLAB_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zyglab: Zygmund graphs, doubling measures and thinness certificates"};
  app.require_subcommand(1);

  std::string config_path, output_flag;
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, CLI::App*> subs;

  for (const auto& schema : schemas()) {
    auto* sub = app.add_subcommand(schema.name, schema.help);
    sub->add_option("--config", config_path, "key = value file; flags override it");
    sub->add_option("--output", output_flag, "report directory (default: $ZYGLAB_OUTPUT_DIR or .)");
    auto& values = flag_values[schema.name];
    for (const auto& key : schema.keys) {
      std::string help = key.help;
      if (!key.fallback.empty()) help += " [" + key.fallback + "]";
      if (key.required) help += " (required)";
      sub->add_option("--" + key.name, values[key.name], help);
    }
    subs[schema.name] = sub;
  }
  auto* run = app.add_subcommand("run", "run the command named by the config file's 'command' key");
  run->add_option("--config", config_path, "key = value file")->required();
  run->add_option("--output", output_flag, "report directory (default: $ZYGLAB_OUTPUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    std::map<std::string, std::string> file;
    if (!config_path.empty()) file = cli::load_config(config_path);
    const fs::path output = output_dir(output_flag);
    if (run->parsed()) {
      const auto it = file.find("command");
      if (it == file.end()) throw ConfigurationError("config file has no 'command' key");
      return dispatch(it->second, file, {}, output);
    }
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      std::map<std::string, std::string> flags;
      for (const auto& [key, value] : flag_values[name]) {
        if (sub->get_option("--" + key)->count() > 0) flags[key] = value;
      }
      return dispatch(name, file, flags, output);
    }
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
