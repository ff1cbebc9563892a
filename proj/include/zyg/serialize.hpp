#pragma once

#include <nlohmann/json.hpp>

#include "zyg/affine_fit.hpp"
#include "zyg/ball_builder.hpp"
#include "zyg/cover_certifier.hpp"
#include "zyg/dyadic_measure.hpp"
#include "zyg/regularity.hpp"

namespace zyg {

using Json = nlohmann::ordered_json;

inline Json to_json(const Ball& b) {
  return Json{{"center", b.center}, {"radius", b.radius}, {"space", to_string(b.space)}};
}

inline Json to_json(const FitResult& fit) {
  return Json{{"center", fit.ball.center},
              {"radius", fit.ball.radius},
              {"intercept", fit.map.intercept},
              {"gradient", fit.map.gradient},
              {"sup_error", fit.sup_error}};
}

inline Json to_json(const OffsetBallPair& p) {
  Json j{{"case_tag", to_string(p.case_tag)},
         {"base_center", p.base.center},
         {"base_radius", p.base.radius},
         {"offset_center", p.offset.center},
         {"offset_radius", p.offset.radius},
         {"gradient_used", p.gradient_used},
         {"r_prime", nullptr},
         {"M", p.M},
         {"distance_bound", p.distance_bound},
         {"center_distance", p.center_distance},
         {"ball_distance", p.ball_distance},
         {"fit_sup_error", p.fit_sup_error},
         {"disjointness_margin", p.disjointness.margin},
         {"disjointness_samples", p.disjointness.samples},
         {"disjointness_witness", p.disjointness.witness}};
  if (p.r_prime) j["r_prime"] = *p.r_prime;
  return j;
}

inline Json to_json(const MassInterval& m) {
  return Json{{"lower", m.lower}, {"upper", m.upper}, {"straddling_cells", m.straddling_cells}};
}

inline Json to_json(const DoublingReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples) {
    samples.push_back(Json{{"center", s.center},
                           {"radius", s.radius},
                           {"outer", to_json(s.outer)},
                           {"inner", to_json(s.inner)},
                           {"ratio_upper", s.ratio_upper},
                           {"ratio_lower", s.ratio_lower}});
  }
  return Json{{"C", r.C},
              {"slack", r.slack},
              {"resolution", r.resolution},
              {"violations", r.violations},
              {"samples", samples}};
}

inline Json to_json(const ChainRecord& c) {
  return Json{{"label", c.label},
              {"lhs", c.lhs},
              {"relation", to_string(c.relation)},
              {"rhs", c.rhs},
              {"satisfied", c.satisfied}};
}

inline ChainRecord chain_record_from_json(const Json& j) {
  ChainRecord c;
  c.label = j.at("label").get<std::string>();
  c.lhs = j.at("lhs").get<double>();
  c.rhs = j.at("rhs").get<double>();
  const auto rel = j.at("relation").get<std::string>();
  if (rel == "<=") {
    c.relation = Relation::le;
  } else if (rel == "<") {
    c.relation = Relation::lt;
  } else if (rel == "=") {
    c.relation = Relation::eq;
  } else {
    throw ConfigurationError("unknown chain relation '" + rel + "'");
  }
  c.satisfied = j.at("satisfied").get<bool>();
  return c;
}

inline Json to_json(const ThinnessCertificate& c) {
  Json search = Json::array();
  for (const auto& [delta, mass] : c.delta_search) search.push_back(Json{{"delta", delta}, {"slab_upper", mass}});
  Json chain = Json::array();
  for (const auto& r : c.chain) chain.push_back(to_json(r));
  Json j{{"field", c.field_spec},
         {"measure", c.measure_spec},
         {"M", c.M},
         {"C", c.C},
         {"doubling_slack", c.doubling_slack},
         {"K", c.K},
         {"p", c.p},
         {"epsilon", c.epsilon},
         {"threshold", c.threshold},
         {"delta", c.delta},
         {"r", c.r},
         {"delta_search", search},
         {"cover_size", c.cover_size},
         {"disjoint_size", c.disjoint_size},
         {"vertical_pairs", c.vertical_pairs},
         {"gradient_pairs", c.gradient_pairs},
         {"lattice_coverage_verified", c.lattice_coverage_verified},
         {"offset_failures", c.offset_failures},
         {"uncovered_samples", c.uncovered_samples},
         {"uncovered_witness", nullptr},
         {"mu_E_upper", c.mu_E_upper},
         {"chain", chain},
         {"verdict", c.pass ? "pass" : "fail"}};
  if (c.uncovered_witness) j["uncovered_witness"] = *c.uncovered_witness;
  return j;
}

/// Recomputes every chain relation from a serialized certificate.
inline bool chain_holds(const Json& certificate) {
  for (const auto& rec : certificate.at("chain")) {
    if (!chain_record_from_json(rec).holds()) return false;
  }
  return true;
}

inline Json to_json(const ClassReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"scale", row.scale},
                        {"max_second_ratio", row.max_second_ratio},
                        {"max_first_ratio", row.max_first_ratio}});
  }
  return Json{{"declared", r.declared.describe()},
              {"verdict", to_string(r.verdict)},
              {"consistent", r.consistent},
              {"second_slope", r.second_slope},
              {"first_slope", r.first_slope},
              {"second_growth", r.second_growth},
              {"first_growth", r.first_growth},
              {"rows", rows}};
}

}  // namespace zyg
