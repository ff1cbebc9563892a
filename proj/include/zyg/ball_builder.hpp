#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zyg/affine_fit.hpp"
#include "zyg/function_catalog.hpp"
#include "zyg/geometry.hpp"
#include "zyg/parallel.hpp"
#include "zyg/random.hpp"

namespace zyg {

enum class CaseTag { vertical, gradient };

inline const char* to_string(CaseTag t) { return t == CaseTag::vertical ? "vertical" : "gradient"; }

/// sign(t) = 1 for t >= 0, -1 otherwise.
inline double sign_of(double t) { return t >= 0.0 ? 1.0 : -1.0; }

/// Fitted gradients within this of 1 count as |grad P| <= 1.
inline constexpr double kDispatchTolerance = 1e-9;

/// Sampled certificate that a ball in R^{d+1} misses the graph.
struct DisjointnessCheck {
  double margin = -std::numeric_limits<double>::infinity();  // min over footprint samples of |f(x) - c_last| - radius
  std::size_t samples = 0;
  Point witness;  // footprint point attaining the margin

  bool passed() const { return margin > 0.0; }
};

struct OffsetBallPair {
  Ball base;    // B(z0, r) in R^{d+1}
  Ball offset;  // the ball off the graph
  CaseTag case_tag = CaseTag::vertical;
  std::vector<double> gradient_used;  // gradient of the fitted P_B
  std::optional<double> r_prime;      // gradient case only
  double distance_bound = 0.0;        // (2M+1) r for the vertical case, (5M+1) r otherwise
  double center_distance = 0.0;       // |offset.center - base.center|
  double ball_distance = 0.0;         // dist(z0, offset ball) = center_distance - offset radius
  double M = 0.0;
  double fit_sup_error = 0.0;
  DisjointnessCheck disjointness;
};

struct LemmaParams {
  double delta = 1.0;
  double M = 1.1;
  double r = 0.05;
  int fit_grid = 0;  // 0 selects default_grid_size(d)
  std::size_t disjointness_samples = 1000;
};

inline void check_lemma_params(const LemmaParams& p) {
  if (!(p.M > 1.0)) throw DomainError("the lemma needs M > 1, got " + format_real(p.M));
  if (!(p.r > 0.0) || !(p.delta > 0.0)) throw DomainError("r and delta must be positive");
  if (!((5.0 * p.M + 2.0) * p.r < p.delta)) {
    throw RadiusTooLargeError("(5M+2) r = " + format_real((5.0 * p.M + 2.0) * p.r) + " is not below delta = " +
                              format_real(p.delta));
  }
}

/// Quasi-random points of the closed footprint ball B(center, radius) in R^d,
/// followed by the centre and the 2d axis extremes.
inline std::vector<Point> footprint_samples(std::span<const double> center, double radius, std::size_t count) {
  const std::size_t d = center.size();
  std::vector<Point> out;
  out.reserve(count + 1 + 2 * d);
  for (std::size_t i = 0; i < count; ++i) {
    const Point h = halton(i, d);
    Point p(center.begin(), center.end());
    if (d == 1) {
      p[0] += radius * (2.0 * h[0] - 1.0);
    } else if (d == 2) {
      const double s = radius * std::sqrt(h[0]);
      const double phi = 2.0 * std::numbers::pi * h[1];
      p[0] += s * std::cos(phi);
      p[1] += s * std::sin(phi);
    } else {
      const double s = radius * std::cbrt(h[0]);
      const double z = 2.0 * h[1] - 1.0;
      const double phi = 2.0 * std::numbers::pi * h[2];
      const double q = std::sqrt(std::max(0.0, 1.0 - z * z));
      p[0] += s * q * std::cos(phi);
      p[1] += s * q * std::sin(phi);
      p[2] += s * z;
    }
    out.push_back(std::move(p));
  }
  out.emplace_back(center.begin(), center.end());
  for (std::size_t k = 0; k < d; ++k) {
    for (double sgn : {-1.0, 1.0}) {
      Point p(center.begin(), center.end());
      p[k] += sgn * radius;
      out.push_back(std::move(p));
    }
  }
  return out;
}

/// Samples the graph over the ball's footprint; the ball misses the graph when
/// every sample has |f(x) - c_last| > radius.
template <ScalarFunction F>
DisjointnessCheck check_disjoint(const F& f, const Ball& ball, std::size_t samples = 1000) {
  const std::size_t d = f.dimension();
  if (ball.dimension() != d + 1) throw DomainError("disjointness check needs a ball in R^{d+1}");
  const std::span<const double> foot(ball.center.data(), d);
  const double height = ball.center[d];
  DisjointnessCheck out;
  out.margin = std::numeric_limits<double>::infinity();
  for (const auto& x : footprint_samples(foot, ball.radius, samples)) {
    const double m = std::abs(f(std::span<const double>(x)) - height) - ball.radius;
    ++out.samples;
    if (m < out.margin) {
      out.margin = m;
      out.witness = x;
    }
  }
  return out;
}

/// The two-case ball construction around the graph point z0 = (x0, f(x0)).
template <ScalarFunction F>
OffsetBallPair construct_offset_ball(const F& f, std::span<const double> x0, const LemmaParams& params) {
  check_lemma_params(params);
  const std::size_t d = f.dimension();
  if (x0.size() != d) throw DomainError("x0 dimension does not match the field");
  const double M = params.M;
  const double r = params.r;
  const FitResult fit = fit_affine(f, Ball(Point(x0.begin(), x0.end()), r), params.fit_grid);
  const double gnorm = fit.map.gradient_norm();
  const double fx0 = f(x0);

  Point z0(x0.begin(), x0.end());
  z0.push_back(fx0);

  OffsetBallPair pair;
  pair.base = Ball(z0, r, Space::graph);
  pair.gradient_used = fit.map.gradient;
  pair.M = M;
  pair.fit_sup_error = fit.sup_error;

  if (gnorm <= 1.0 + kDispatchTolerance) {
    pair.case_tag = CaseTag::vertical;
    Point c = z0;
    c[d] += (2.0 * M + 2.0) * r;
    pair.offset = Ball(std::move(c), r, Space::graph);
    pair.distance_bound = (2.0 * M + 1.0) * r;
  } else {
    pair.case_tag = CaseTag::gradient;
    const double rp = std::min(r / 2.0, M * r / gnorm);
    Point x0p(x0.begin(), x0.end());
    for (std::size_t k = 0; k < d; ++k) x0p[k] += 2.0 * rp * fit.map.gradient[k] / gnorm;
    const double s = sign_of(fx0 - f(std::span<const double>(x0p)));
    Point c = x0p;
    c.push_back(fx0 + s * (3.0 * M + 1.0) * r);
    pair.offset = Ball(std::move(c), rp, Space::graph);
    pair.r_prime = rp;
    pair.distance_bound = (5.0 * M + 1.0) * r;
  }
  pair.center_distance = distance(pair.offset.center, pair.base.center);
  pair.ball_distance = pair.center_distance - pair.offset.radius;
  pair.disjointness = check_disjoint(f, pair.offset, params.disjointness_samples);
  return pair;
}

struct Cover {
  std::vector<OffsetBallPair> pairs;  // lattice order
  std::vector<double> spacing;        // per axis
  int refinements = 0;                // halvings beyond the r/2 lattice
  bool coverage_verified = false;     // sampled graph points within r of a base centre
  Point coverage_witness;             // first uncovered sample when not verified
};

namespace detail {

inline std::vector<std::size_t> lattice_counts(const Box& box, double step) {
  std::vector<std::size_t> n(box.dimension());
  for (std::size_t k = 0; k < n.size(); ++k) {
    n[k] = static_cast<std::size_t>(std::ceil((box.upper[k] - box.lower[k]) / step - 1e-12));
    n[k] = std::max<std::size_t>(n[k], 1);
  }
  return n;
}

inline Point lattice_point(const Box& box, const std::vector<std::size_t>& n, std::size_t idx) {
  Point p(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) {
    const std::size_t j = idx % (n[k] + 1);
    idx /= n[k] + 1;
    p[k] = box.lower[k] + (box.upper[k] - box.lower[k]) * static_cast<double>(j) / static_cast<double>(n[k]);
  }
  return p;
}

// Checks that sampled graph points of every lattice cell lie within r of the
// graph point above one of the cell's corners. Returns the first failure.
template <ScalarFunction F>
std::optional<Point> lattice_coverage_gap(const F& f, const Box& box, const std::vector<std::size_t>& n, double r,
                                          std::size_t samples_per_cell) {
  const std::size_t d = n.size();
  std::size_t nodes = 1, cells = 1;
  for (auto c : n) {
    nodes *= c + 1;
    cells *= c;
  }
  std::vector<double> node_value(nodes);
  parallel_for(nodes, [&](std::size_t i) {
    const Point p = lattice_point(box, n, i);
    node_value[i] = f(std::span<const double>(p));
  });
  std::vector<std::optional<Point>> gap(cells);
  parallel_for(cells, [&](std::size_t cell) {
    std::vector<std::size_t> j(d);
    std::size_t rest = cell;
    for (std::size_t k = 0; k < d; ++k) {
      j[k] = rest % n[k];
      rest /= n[k];
    }
    for (std::size_t s = 0; s < samples_per_cell && !gap[cell]; ++s) {
      const Point h = halton(s, d);
      Point x(d);
      for (std::size_t k = 0; k < d; ++k) {
        const double w = (box.upper[k] - box.lower[k]) / static_cast<double>(n[k]);
        x[k] = box.lower[k] + w * (static_cast<double>(j[k]) + h[k]);
      }
      const double fx = f(std::span<const double>(x));
      bool covered = false;
      for (std::size_t corner = 0; corner < (std::size_t{1} << d) && !covered; ++corner) {
        std::size_t idx = 0, stride = 1;
        for (std::size_t k = 0; k < d; ++k) {
          idx += (j[k] + ((corner >> k) & 1)) * stride;
          stride *= n[k] + 1;
        }
        const Point c = lattice_point(box, n, idx);
        double s2 = (fx - node_value[idx]) * (fx - node_value[idx]);
        for (std::size_t k = 0; k < d; ++k) s2 += (x[k] - c[k]) * (x[k] - c[k]);
        covered = std::sqrt(s2) < r;
      }
      if (!covered) {
        Point z = x;
        z.push_back(fx);
        gap[cell] = std::move(z);
      }
    }
  });
  for (auto& g : gap) {
    if (g) return g;
  }
  return std::nullopt;
}

}  // namespace detail

inline constexpr int kMaxCoverRefinements = 6;
inline constexpr std::size_t kCoverageSamplesPerCell = 8;

/// Offset-ball pairs over a lattice of the domain with spacing <= r/2, halved
/// until sampled graph points lie within r of some base centre.
template <ScalarFunction F>
Cover cover_graph(const F& f, const Box& domain, const LemmaParams& params) {
  check_lemma_params(params);
  if (domain.dimension() != f.dimension()) throw DomainError("domain dimension does not match the field");
  Cover cover;
  double step = params.r / 2.0;
  std::vector<std::size_t> n;
  for (int level = 0;; ++level) {
    n = detail::lattice_counts(domain, step);
    const auto gap = detail::lattice_coverage_gap(f, domain, n, params.r, kCoverageSamplesPerCell);
    cover.refinements = level;
    if (!gap) {
      cover.coverage_verified = true;
      break;
    }
    if (level == kMaxCoverRefinements) {
      cover.coverage_witness = *gap;
      break;
    }
    step /= 2.0;
  }
  std::size_t nodes = 1;
  for (std::size_t k = 0; k < n.size(); ++k) {
    nodes *= n[k] + 1;
    cover.spacing.push_back((domain.upper[k] - domain.lower[k]) / static_cast<double>(n[k]));
  }
  cover.pairs.resize(nodes);
  parallel_for(nodes, [&](std::size_t i) {
    const Point x = detail::lattice_point(domain, n, i);
    cover.pairs[i] = construct_offset_ball(f, x, params);
  });
  return cover;
}

struct HoleRecord {
  double a = 0.0;
  bool found = false;
  std::optional<Ball> hole;  // B(y, a R) inside the probed ball, missing the graph
  double margin = 0.0;
  std::size_t candidates_tried = 0;
};

struct PorosityReport {
  Ball ball;
  double best_a = 0.0;  // largest swept a with a hole; 0 when none was found
  std::vector<HoleRecord> sweep;
};

inline constexpr std::size_t kHoleCheckSamples = 256;

/// The swept hole ratios: 2^-k - 0.01 while that exceeds half of 2^-k, then 0.99 * 2^-k.
inline std::vector<double> porosity_sweep_values(int depth = 12) {
  std::vector<double> out;
  for (int k = 0; k <= depth; ++k) {
    const double q = std::exp2(-k);
    out.push_back(q - 0.01 > 0.5 * q ? q - 0.01 : 0.99 * q);
  }
  return out;
}

/// Searches for y with B(y, a R) inside B(z, R) and empirically off the graph.
/// Candidates: the concentric ball, the two vertical placements, then seeded random centres.
template <ScalarFunction F>
HoleRecord find_hole(const F& f, const Ball& ball, double a, std::size_t attempts, std::uint64_t seed) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("hole ratio a must lie in (0, 1)");
  const std::size_t n = ball.dimension();
  if (n != f.dimension() + 1) throw DomainError("porosity probe needs a ball in R^{d+1}");
  const double room = (1.0 - a) * ball.radius;
  const double hole_radius = a * ball.radius;
  HoleRecord rec;
  rec.a = a;
  rec.margin = -std::numeric_limits<double>::infinity();
  StreamRng rng(mix64(seed, 0x401eULL, static_cast<std::uint64_t>(a * 1e9)));
  for (std::size_t i = 0; i < attempts + 3; ++i) {
    Point y = ball.center;
    if (i == 1) {
      y[n - 1] += room;
    } else if (i == 2) {
      y[n - 1] -= room;
    } else if (i > 2) {
      const Point v = random_in_ball(rng, n, room);
      for (std::size_t k = 0; k < n; ++k) y[k] += v[k];
    }
    const Ball candidate(std::move(y), hole_radius, Space::graph);
    const auto check = check_disjoint(f, candidate, kHoleCheckSamples);
    ++rec.candidates_tried;
    if (check.margin > rec.margin) rec.margin = check.margin;
    if (check.passed()) {
      rec.found = true;
      rec.hole = candidate;
      rec.margin = check.margin;
      return rec;
    }
  }
  return rec;
}

/// Hole search across the dyadic sweep of ratios a.
template <ScalarFunction F>
PorosityReport porosity_probe(const F& f, const Ball& ball, std::size_t attempts = 200, std::uint64_t seed = 1,
                              int sweep_depth = 12) {
  PorosityReport rep;
  rep.ball = ball;
  for (double a : porosity_sweep_values(sweep_depth)) {
    rep.sweep.push_back(find_hole(f, ball, a, attempts, seed));
    if (rep.sweep.back().found) {
      rep.best_a = a;
      break;
    }
  }
  return rep;
}

struct PorosityRow {
  int k = 0;
  double radius = 0.0;
  Point center;  // on the graph
  double best_a = 0.0;
};

/// Best hole ratio for graph balls of radius 2^-k at several base points.
template <ScalarFunction F>
std::vector<PorosityRow> porosity_scale_table(const F& f, const std::vector<Point>& base_points, int k_min, int k_max,
                                              std::size_t attempts = 200, std::uint64_t seed = 1) {
  std::vector<PorosityRow> rows;
  for (int k = k_min; k <= k_max; ++k) {
    for (const auto& x : base_points) {
      Point z = x;
      z.push_back(f(std::span<const double>(x)));
      const double radius = std::exp2(-k);
      const auto rep = porosity_probe(f, Ball(z, radius, Space::graph), attempts, seed);
      rows.push_back({k, radius, z, rep.best_a});
    }
  }
  return rows;
}

}  // namespace zyg
