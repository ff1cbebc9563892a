#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zyg/function_catalog.hpp"
#include "zyg/geometry.hpp"
#include "zyg/linear_program.hpp"
#include "zyg/parallel.hpp"
#include "zyg/random.hpp"

namespace zyg {

/// P(x) = intercept + gradient . x
struct AffineMap {
  double intercept = 0.0;
  std::vector<double> gradient;

  double operator()(std::span<const double> x) const { return intercept + dot(gradient, x); }
  double gradient_norm() const { return norm(gradient); }
  std::size_t dimension() const { return gradient.size(); }
};

struct FitResult {
  AffineMap map;
  double sup_error = 0.0;  // max |f - P| over the sample grid
  Ball ball;
};

/// Points per axis used by default: 257 on the diameter for d = 1, a 33 x 33 lattice for d = 2.
inline int default_grid_size(std::size_t d) { return d == 1 ? 257 : (d == 2 ? 33 : 17); }

/// Deterministic sample grid in the closed ball: uniform points on the diameter
/// for d = 1, otherwise a grid_size^d lattice on the bounding cube cut to the ball.
inline std::vector<Point> ball_grid(const Ball& ball, int grid_size) {
  const std::size_t d = ball.dimension();
  if (grid_size < 2) throw ConfigurationError("grid_size must be at least 2");
  std::vector<Point> out;
  const auto n = static_cast<std::size_t>(grid_size);
  auto coord = [&](std::size_t i) { return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1); };
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= n;
  std::vector<double> u(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      u[k] = coord(rest % n);
      rest /= n;
      r2 += u[k] * u[k];
    }
    if (r2 > 1.0 + 1e-12) continue;
    Point p(d);
    for (std::size_t k = 0; k < d; ++k) p[k] = ball.center[k] + ball.radius * u[k];
    out.push_back(std::move(p));
  }
  if (out.size() < d + 2) {
    throw ConfigurationError("affine fit grid has " + std::to_string(out.size()) + " points, needs at least " +
                             std::to_string(d + 2));
  }
  return out;
}

namespace detail {

// Smallest eigenvalue proxy of the centred scatter: det / (trace/d)^d.
inline bool grid_is_degenerate(const std::vector<Point>& pts, const Point& origin, double scale) {
  const std::size_t d = origin.size();
  std::vector<double> g(d * d, 0.0);
  Point mean(d, 0.0);
  for (const auto& p : pts) {
    for (std::size_t k = 0; k < d; ++k) mean[k] += (p[k] - origin[k]) / scale;
  }
  for (auto& v : mean) v /= static_cast<double>(pts.size());
  for (const auto& p : pts) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        g[i * d + j] += ((p[i] - origin[i]) / scale - mean[i]) * ((p[j] - origin[j]) / scale - mean[j]);
      }
    }
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += g[i * d + i];
  if (trace <= 0.0) return true;
  double det = 0.0;
  if (d == 1) {
    det = g[0];
  } else if (d == 2) {
    det = g[0] * g[3] - g[1] * g[2];
  } else {
    det = g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6]) + g[2] * (g[3] * g[7] - g[4] * g[6]);
  }
  return det <= 1e-12 * std::pow(trace / static_cast<double>(d), static_cast<double>(d));
}

}  // namespace detail

/// Discrete minimax affine fit of the sampled values on the given points.
///
/// Solved through the dual of  min t  s.t.  -t <= f_j - P(x_j) <= t, whose
/// equality-row multipliers are exactly (intercept, gradient, t). Coordinates and
/// values are centred and normalised before the solve.
inline AffineMap minimax_affine(const std::vector<Point>& pts, std::span<const double> values, const Point& origin,
                                double length_scale) {
  const std::size_t d = origin.size();
  const std::size_t m = pts.size();
  if (detail::grid_is_degenerate(pts, origin, length_scale)) {
    throw ConfigurationError("affine fit grid is degenerate (points lie in a lower-dimensional set)");
  }
  const double base = values[0];
  double spread = 0.0;
  for (double v : values) spread = std::max(spread, std::abs(v - base));
  if (spread == 0.0) return AffineMap{base, std::vector<double>(d, 0.0)};

  DenseMatrix a(d + 2, 2 * m);
  std::vector<double> cost(2 * m);
  for (std::size_t j = 0; j < m; ++j) {
    const double g = (values[j] - base) / spread;
    a(0, j) = 1.0;
    a(0, m + j) = -1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double u = (pts[j][k] - origin[k]) / length_scale;
      a(1 + k, j) = u;
      a(1 + k, m + j) = -u;
    }
    a(d + 1, j) = 1.0;
    a(d + 1, m + j) = 1.0;
    cost[j] = g;
    cost[m + j] = -g;
  }
  std::vector<double> rhs(d + 2, 0.0);
  rhs[d + 1] = 1.0;
  const LpResult lp = maximize(a, rhs, cost);
  if (lp.status != LpStatus::optimal) throw Error("minimax LP did not reach optimality");

  AffineMap map;
  map.gradient.resize(d);
  double shift = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    map.gradient[k] = lp.y[1 + k] * spread / length_scale;
    shift += map.gradient[k] * origin[k];
  }
  map.intercept = base + lp.y[0] * spread - shift;
  return map;
}

template <ScalarFunction F>
double grid_sup_error(const F& f, const AffineMap& map, const std::vector<Point>& pts) {
  double e = 0.0;
  for (const auto& p : pts) e = std::max(e, std::abs(f(std::span<const double>(p)) - map(p)));
  return e;
}

/// Best affine approximation of f on the ball in the discrete minimax sense.
template <ScalarFunction F>
FitResult fit_affine(const F& f, const Ball& ball, int grid_size = 0) {
  const std::size_t d = f.dimension();
  if (ball.dimension() != d) throw DomainError("ball dimension does not match the field");
  const auto pts = ball_grid(ball, grid_size > 0 ? grid_size : default_grid_size(d));
  std::vector<double> values(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) values[j] = f(std::span<const double>(pts[j]));
  FitResult out;
  out.map = minimax_affine(pts, values, ball.center, ball.radius);
  out.ball = ball;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    out.sup_error = std::max(out.sup_error, std::abs(values[j] - out.map(pts[j])));
  }
  return out;
}

inline constexpr double kMinimumM = 1.0 + 1e-6;

/// Downstream constructions need M > 1.
inline double enforce_M_floor(double raw) { return std::max(raw, kMinimumM); }

struct MEstimate {
  double raw = 0.0;      // max over the family of sup_error / r
  double clamped = 0.0;  // max(raw, 1 + 1e-6)
  std::vector<double> per_ball;
};

/// Empirical constant M with sup_B |f - P_B| <= M r over a family of balls.
template <ScalarFunction F>
MEstimate estimate_M(const F& f, std::span<const Ball> family, int grid_size = 0) {
  if (family.empty()) throw ConfigurationError("estimate_M needs a nonempty ball family");
  MEstimate out;
  out.per_ball.resize(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    out.per_ball[i] = fit_affine(f, family[i], grid_size).sup_error / family[i].radius;
  });
  for (double v : out.per_ball) out.raw = std::max(out.raw, v);
  out.clamped = enforce_M_floor(out.raw);
  return out;
}

/// Balls with centres uniform in [0,1]^d and radii log-uniform in [2^-k_max, 2^-k_min].
inline std::vector<Ball> random_ball_family(std::size_t d, std::size_t count, double k_min, double k_max,
                                            std::uint64_t seed) {
  std::vector<Ball> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    StreamRng rng(mix64(seed, 0xba11ULL, i));
    Point c(d);
    for (auto& v : c) v = rng.uniform();
    const double k = rng.uniform(k_min, k_max);
    out.emplace_back(std::move(c), std::exp2(-k));
  }
  return out;
}

}  // namespace zyg
