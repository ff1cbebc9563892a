#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zyg/ball_builder.hpp"
#include "zyg/dyadic_measure.hpp"
#include "zyg/function_catalog.hpp"
#include "zyg/geometry.hpp"
#include "zyg/graph_index.hpp"
#include "zyg/random.hpp"

namespace zyg {

/// Greedy Vitali selection: balls by decreasing radius, each kept iff its centre
/// distance to every kept ball exceeds the sum of radii. Returns input indices.
/// For expansion >= 5 every input ball lies in the expansion-enlargement of a kept ball.
inline std::vector<std::size_t> vitali_subcover(std::span<const Ball> balls, double expansion = 5.0) {
  if (balls.empty()) throw DomainError("Vitali selection needs a nonempty ball family");
  if (!(expansion >= 1.0)) throw DomainError("expansion must be at least 1");
  std::vector<std::size_t> order(balls.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return balls[a].radius > balls[b].radius; });
  std::vector<std::size_t> kept;
  for (auto i : order) {
    bool disjoint = true;
    for (auto j : kept) {
      if (distance(balls[i].center, balls[j].center) <= balls[i].radius + balls[j].radius + 1e-12) {
        disjoint = false;
        break;
      }
    }
    if (disjoint) kept.push_back(i);
  }
  return kept;
}

/// K = ceil(5M + 1) + 1.
inline long zygmund_K(double M) {
  if (!std::isfinite(M) || !(M > 1.0)) throw DomainError("M must be finite and exceed 1");
  return static_cast<long>(std::ceil(5.0 * M + 1.0)) + 1;
}

/// p = ceil(ln(5K) / ln 2).
inline long doubling_power(long K) {
  if (K < 1) throw DomainError("K must be positive");
  return static_cast<long>(std::ceil(std::log(5.0 * static_cast<double>(K)) / std::log(2.0)));
}

struct NeighborhoodMass {
  double delta = 0.0;
  MassInterval mass;
};

inline void check_tree_matches(const ScalarField& f, const DyadicMeasureTree& tree) {
  if (static_cast<int>(f.dimension()) + 1 != tree.dimension()) {
    throw ConfigurationError("measure dimension " + std::to_string(tree.dimension()) + " does not match graph dimension " +
                             std::to_string(f.dimension() + 1));
  }
}

/// Bracketing masses of E_delta along a decreasing schedule, at the tree's full depth.
inline std::vector<NeighborhoodMass> neighborhood_mass_profile(const ScalarField& f, const DyadicMeasureTree& tree,
                                                               std::span<const double> deltas) {
  check_tree_matches(f, tree);
  const double floor = std::exp2(-tree.depth());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw DomainError("deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw DomainError("delta schedule must be strictly decreasing");
    if (deltas[i] < floor) {
      throw ResolutionError("delta " + format_real(deltas[i]) + " is below the tree resolution 2^-" +
                            std::to_string(tree.depth()));
    }
  }
  std::vector<NeighborhoodMass> out;
  const GraphIndex index(f, tree.depth());
  for (double delta : deltas) {
    out.push_back({delta, tree.mass_of_set(NeighborhoodIndicator{&index, delta}, tree.depth())});
  }
  return out;
}

/// 2^-k for k = 3 .. depth - 2.
inline std::vector<double> default_delta_schedule(int depth) {
  std::vector<double> out;
  for (int k = 3; k <= depth - 2; ++k) out.push_back(std::exp2(-k));
  return out;
}

struct Embedding {
  ScalarField field;
  double scale = 1.0;
  double offset = 0.0;
};

/// Affine rescale of the values, g = scale * f + offset, putting the range
/// enclosure over [0,1]^d inside [margin, 1 - margin]. x is left unchanged.
inline Embedding embed_in_unit_cube(const ScalarField& f, double margin = 0.25) {
  if (!(margin >= 0.0 && margin < 0.5)) throw DomainError("embedding margin must lie in [0, 1/2)");
  const std::size_t d = f.dimension();
  const Interval r = f.range_over(Point(d, 0.0), Point(d, 1.0));
  const double room = 1.0 - 2.0 * margin;
  const double scale = r.width() <= room ? 1.0 : room / r.width();
  const double offset = 0.5 - scale * 0.5 * (r.lo + r.hi);
  if (scale == 1.0 && offset == 0.0) return {f, 1.0, 0.0};
  return {f.rescaled(scale, offset), scale, offset};
}

class ScheduleExhaustedError : public Error {
 public:
  ScheduleExhaustedError(std::vector<std::pair<double, double>> achieved, double threshold)
      : Error(describe(achieved, threshold)), achieved_(std::move(achieved)), threshold_(threshold) {}

  /// (delta, upper bound on mu(E_delta \ E)) for every delta tried.
  const std::vector<std::pair<double, double>>& achieved() const { return achieved_; }
  double threshold() const { return threshold_; }

 private:
  static std::string describe(const std::vector<std::pair<double, double>>& achieved, double threshold) {
    std::string s = "no delta in the schedule gives mu(E_delta \\ E) below eps / C^p = " + format_real(threshold) + ";";
    for (const auto& [delta, mass] : achieved) s += " delta=" + format_real(delta) + ":" + format_real(mass);
    return s;
  }

  std::vector<std::pair<double, double>> achieved_;
  double threshold_;
};

enum class Relation { le, lt, eq };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::le:
      return "<=";
    case Relation::lt:
      return "<";
    case Relation::eq:
      return "=";
  }
  return "?";
}

inline constexpr double kChainTolerance = 1e-9;

struct ChainRecord {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::le;
  bool satisfied = false;

  bool holds() const {
    switch (relation) {
      case Relation::le:
        return lhs <= rhs + kChainTolerance;
      case Relation::lt:
        return lhs < rhs;
      case Relation::eq:
        return std::abs(lhs - rhs) <= kChainTolerance * std::max(1.0, std::abs(rhs));
    }
    return false;
  }
};

struct CertifyOptions {
  std::vector<double> delta_schedule;  // empty selects 2^-3 .. 2^-(depth-2)
  std::vector<double> r_schedule;      // empty selects 0.9 delta / (5M + 2)
  DoublingPlan doubling;
  std::size_t coverage_samples = 20000;
  int fit_grid = 0;
  std::size_t disjointness_samples = 1000;
};

struct ThinnessCertificate {
  std::string field_spec;
  std::string measure_spec;
  double M = 0.0;
  double C = 0.0;
  double doubling_slack = 0.0;
  long K = 0;
  long p = 0;
  double delta = 0.0;
  double r = 0.0;
  double epsilon = 0.0;
  double threshold = 0.0;  // eps / C^p
  std::vector<std::pair<double, double>> delta_search;  // (delta, upper mu(E_delta \ E)) tried
  std::size_t cover_size = 0;
  std::size_t disjoint_size = 0;
  std::size_t vertical_pairs = 0;
  std::size_t gradient_pairs = 0;
  bool lattice_coverage_verified = false;
  std::size_t offset_failures = 0;     // offset balls failing disjointness or containment
  std::size_t uncovered_samples = 0;   // sampled graph points outside every K B-hat
  std::optional<Point> uncovered_witness;
  double mu_E_upper = 0.0;
  std::vector<ChainRecord> chain;
  bool pass = false;
};

/// Replays the thinness argument for one field and one measure: picks delta,
/// builds the lemma cover, extracts the Vitali family and evaluates every step
/// of the inequality chain with bracketed masses.
inline ThinnessCertificate certify_thinness(const ScalarField& f, const DyadicMeasureTree& tree, double epsilon,
                                            double M, const CertifyOptions& options = {}) {
  check_tree_matches(f, tree);
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (!(M > 1.0)) throw DomainError("M must exceed 1");
  const std::size_t d = f.dimension();
  const int depth = tree.depth();

  ThinnessCertificate cert;
  cert.field_spec = f.spec();
  cert.measure_spec = tree.spec();
  cert.M = M;
  cert.epsilon = epsilon;
  const DoublingReport doubling = verify_doubling(tree, options.doubling);
  cert.C = doubling.C;
  cert.doubling_slack = doubling.slack;
  cert.K = zygmund_K(M);
  cert.p = doubling_power(cert.K);
  const double Cp = std::pow(cert.C, static_cast<double>(cert.p));
  cert.threshold = epsilon / Cp;

  const GraphIndex index(f, depth);
  const GraphIndicator graph{&index};
  const auto deltas = options.delta_schedule.empty() ? default_delta_schedule(depth) : options.delta_schedule;
  std::optional<double> chosen;
  double slab_upper = 0.0;
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw DomainError("deltas must be positive");
    const Difference<NeighborhoodIndicator, GraphIndicator> slab{{&index, delta}, graph};
    const double upper = tree.mass_of_set(slab, depth).upper;
    cert.delta_search.emplace_back(delta, upper);
    if (upper < cert.threshold) {
      chosen = delta;
      slab_upper = upper;
      break;
    }
  }
  if (!chosen) throw ScheduleExhaustedError(cert.delta_search, cert.threshold);
  cert.delta = *chosen;

  const double r_cap = cert.delta / (5.0 * M + 2.0);
  cert.r = 0.9 * r_cap;
  if (!options.r_schedule.empty()) {
    const auto it = std::find_if(options.r_schedule.begin(), options.r_schedule.end(),
                                 [&](double r) { return r > 0.0 && r < r_cap; });
    if (it == options.r_schedule.end()) {
      throw RadiusTooLargeError("no radius in the schedule satisfies (5M+2) r < delta = " + format_real(cert.delta));
    }
    cert.r = *it;
  }

  const Cover cover = cover_graph(f, Box::unit(d), {cert.delta, M, cert.r, options.fit_grid, options.disjointness_samples});
  cert.cover_size = cover.pairs.size();
  cert.lattice_coverage_verified = cover.coverage_verified;
  std::vector<Ball> hats, k_hats;
  for (const auto& pair : cover.pairs) {
    (pair.case_tag == CaseTag::vertical ? cert.vertical_pairs : cert.gradient_pairs)++;
    const bool contained = pair.center_distance + pair.offset.radius <= (5.0 * M + 2.0) * cert.r + 1e-12;
    if (!pair.disjointness.passed() || !contained) ++cert.offset_failures;
    hats.push_back(pair.offset);
    k_hats.push_back(pair.offset.enlarged(static_cast<double>(cert.K)));
  }

  // E inside the union of the K-enlargements, on sampled graph points.
  const BallUnionIndicator k_union(k_hats);
  for (std::size_t i = 0; i < options.coverage_samples; ++i) {
    Point z = halton(i, d);
    z.push_back(f(std::span<const double>(z.data(), d)));
    if (!k_union.contains(z)) {
      if (!cert.uncovered_witness) cert.uncovered_witness = z;
      ++cert.uncovered_samples;
    }
  }

  const auto kept = vitali_subcover(k_hats, 5.0);
  cert.disjoint_size = kept.size();
  std::vector<Ball> c_hats, c_5k;
  for (auto i : kept) {
    c_hats.push_back(hats[i]);
    c_5k.push_back(hats[i].enlarged(5.0 * static_cast<double>(cert.K)));
  }

  cert.mu_E_upper = tree.mass_of_set(graph, depth).upper;
  const double union_5k = tree.mass_of_set(BallUnionIndicator(c_5k), depth).upper;
  std::vector<double> upper_5k(c_5k.size()), lower_hat(c_hats.size());
  parallel_for(c_hats.size(), [&](std::size_t i) {
    upper_5k[i] = tree.mass_of_set(BallIndicator{c_5k[i].center, c_5k[i].radius}, depth, false).upper;
    lower_hat[i] = tree.mass_of_set(BallIndicator{c_hats[i].center, c_hats[i].radius}, depth, false).lower;
  });
  const double sum_5k = std::accumulate(upper_5k.begin(), upper_5k.end(), 0.0);
  const double sum_hat = std::accumulate(lower_hat.begin(), lower_hat.end(), 0.0);
  const double union_hat = tree.mass_of_set(BallUnionIndicator(c_hats), depth).upper;

  auto add = [&](std::string label, double lhs, double rhs, Relation rel) {
    ChainRecord rec{std::move(label), lhs, rhs, rel, false};
    rec.satisfied = rec.holds();
    cert.chain.push_back(std::move(rec));
  };
  add("mu(E) <= mu(U_{C-hat} 5K B-hat)", cert.mu_E_upper, union_5k, Relation::le);
  add("mu(U_{C-hat} 5K B-hat) <= sum_{C-hat} mu(5K B-hat)", union_5k, sum_5k, Relation::le);
  add("sum_{C-hat} mu(5K B-hat) <= sum_{C-hat} C^p mu(B-hat)", sum_5k, Cp * sum_hat, Relation::le);
  add("sum_{C-hat} C^p mu(B-hat) = C^p mu(U_{C-hat} B-hat)", Cp * sum_hat, Cp * union_hat, Relation::le);
  add("C^p mu(U_{C-hat} B-hat) <= C^p mu(E_delta \\ E)", Cp * union_hat, Cp * slab_upper, Relation::le);
  add("C^p mu(E_delta \\ E) < C^p (eps / C^p)", Cp * slab_upper, Cp * cert.threshold, Relation::lt);
  add("C^p (eps / C^p) = eps", Cp * cert.threshold, epsilon, Relation::eq);

  cert.pass = cert.offset_failures == 0 && cert.uncovered_samples == 0 &&
              std::all_of(cert.chain.begin(), cert.chain.end(), [](const ChainRecord& r) { return r.satisfied; });
  return cert;
}

}  // namespace zyg
