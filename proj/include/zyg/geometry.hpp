#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "zyg/errors.hpp"

namespace zyg {

using Point = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

inline Point add(std::span<const double> a, std::span<const double> b) {
  Point out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

inline Point subtract(std::span<const double> a, std::span<const double> b) {
  Point out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

inline Point scaled(std::span<const double> a, double s) {
  Point out(a.begin(), a.end());
  for (auto& v : out) v *= s;
  return out;
}

/// Which space a ball lives in: the domain R^d or the graph space R^{d+1}.
enum class Space { domain, graph };

inline const char* to_string(Space s) { return s == Space::domain ? "domain" : "graph"; }

/// Open ball B(center, radius). Closedness is a property of the query, not the ball.
struct Ball {
  Point center;
  double radius = 0.0;
  Space space = Space::domain;

  Ball() = default;
  Ball(Point c, double r, Space s = Space::domain) : center(std::move(c)), radius(r), space(s) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw DomainError("ball radius must be positive and finite, got " + std::to_string(radius));
    }
  }

  std::size_t dimension() const { return center.size(); }

  /// The ball sB = B(center, s * radius).
  Ball enlarged(double s) const { return Ball(center, s * radius, space); }

  bool contains(std::span<const double> p) const { return distance(center, p) < radius; }
};

/// Axis-aligned box [lower, upper].
struct Box {
  Point lower;
  Point upper;

  static Box unit(std::size_t d) { return Box{Point(d, 0.0), Point(d, 1.0)}; }
  std::size_t dimension() const { return lower.size(); }
};

/// Distance from p to the nearest point of the box (0 inside).
inline double distance_to_box(std::span<const double> p, std::span<const double> lower, double side) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double t = 0.0;
    if (p[i] < lower[i]) {
      t = lower[i] - p[i];
    } else if (p[i] > lower[i] + side) {
      t = p[i] - lower[i] - side;
    }
    s += t * t;
  }
  return std::sqrt(s);
}

/// Distance from p to the farthest corner of the cube.
inline double farthest_in_box(std::span<const double> p, std::span<const double> lower, double side) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = std::max(std::abs(p[i] - lower[i]), std::abs(lower[i] + side - p[i]));
    s += t * t;
  }
  return std::sqrt(s);
}

}  // namespace zyg
