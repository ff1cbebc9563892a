#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "zyg/dyadic_measure.hpp"
#include "zyg/function_catalog.hpp"
#include "zyg/geometry.hpp"
#include "zyg/random.hpp"

namespace zyg {

/// Memoised range enclosures. Dyadic walks query the same footprint once per
/// cube in a column, so repeated boxes are served from the table.
template <EnclosableFunction F>
class CachedEnclosure {
 public:
  explicit CachedEnclosure(const F& f) : f_(&f) {
    if (f.dimension() > kMaxDimension) throw ConfigurationError("enclosure cache supports d <= 3");
  }

  std::size_t dimension() const { return f_->dimension(); }
  double operator()(std::span<const double> x) const { return (*f_)(x); }

  Interval range_over(std::span<const double> lower, std::span<const double> upper) const {
    Key key{};
    const std::size_t d = f_->dimension();
    std::copy(lower.begin(), lower.end(), key.begin());
    std::copy(upper.begin(), upper.end(), key.begin() + static_cast<std::ptrdiff_t>(d));
    {
      std::lock_guard lock(mutex_);
      const auto it = table_.find(key);
      if (it != table_.end()) return it->second;
    }
    const Interval r = f_->range_over(lower, upper);
    std::lock_guard lock(mutex_);
    table_.emplace(key, r);
    return r;
  }

 private:
  using Key = std::array<double, 2 * kMaxDimension>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = 0;
      for (double v : k) h = mix64(h, std::bit_cast<std::uint64_t>(v));
      return static_cast<std::size_t>(h);
    }
  };

  const F* f_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Key, Interval, KeyHash> table_;
};

/// Open delta-neighbourhood of the graph from footprint enclosures alone:
/// inside by vertical distance, outside by the enclosure over the footprint grown by delta.
template <EnclosableFunction F>
struct GraphNeighborhood {
  const F* field = nullptr;
  double delta = 0.0;

  Cell operator()(std::span<const double> lower, double side) const {
    const std::size_t d = field->dimension();
    Point lo(lower.begin(), lower.begin() + static_cast<std::ptrdiff_t>(d));
    Point hi(lo);
    for (auto& v : hi) v += side;
    const double ylo = lower[d];
    const double yhi = lower[d] + side;
    const Interval f = field->range_over(lo, hi);
    if (std::max(yhi - f.lo, f.hi - ylo) < delta) return Cell::inside;
    for (auto& v : lo) v -= delta;
    for (auto& v : hi) v += delta;
    const Interval g = field->range_over(lo, hi);
    if (ylo >= g.hi + delta || yhi <= g.lo - delta) return Cell::outside;
    return Cell::straddles;
  }
};

/// The graph itself from footprint enclosures; never inside.
template <EnclosableFunction F>
struct GraphSet {
  const F* field = nullptr;

  Cell operator()(std::span<const double> lower, double side) const {
    const std::size_t d = field->dimension();
    Point lo(lower.begin(), lower.begin() + static_cast<std::ptrdiff_t>(d));
    Point hi(lo);
    for (auto& v : hi) v += side;
    const Interval f = field->range_over(lo, hi);
    if (lower[d] > f.hi || lower[d] + side < f.lo) return Cell::outside;
    return Cell::straddles;
  }
};

/// Cube classification against the graph E and its neighbourhoods E_delta.
///
/// For d = 1 the graph over [-1, 3] is held in a binary hierarchy of columns.
/// Each column stores an enclosure of f (a box containing that piece of the
/// graph) and the min and max of f on its grid nodes, which f attains inside the
/// column by continuity. Boxes give lower bounds on the distance to the graph,
/// attained values give upper bounds. Other dimensions use footprint enclosures.
class GraphIndex {
 public:
  static constexpr double kLeft = -1.0;
  static constexpr double kWidth = 4.0;

  /// `resolution` is the finest cube level that will be queried.
  GraphIndex(const ScalarField& f, int resolution) : f_(&f), cached_(f) {
    if (f.dimension() != 1) return;
    levels_ = std::clamp(resolution + 4, 4, 24);
    const std::size_t leaves = std::size_t{1} << levels_;
    nodes_.resize(2 * leaves);
    std::vector<double> grid(leaves + 1);
    for (std::size_t i = 0; i <= leaves; ++i) grid[i] = f(kLeft + kWidth * static_cast<double>(i) / leaves);
    const double w = kWidth / static_cast<double>(leaves);
    for (std::size_t i = 0; i < leaves; ++i) {
      const double lo = kLeft + w * static_cast<double>(i);
      const double hi = lo + w;
      const Interval e = f.range_over(std::span<const double>(&lo, 1), std::span<const double>(&hi, 1));
      auto& n = nodes_[leaves + i];
      n.sample_lo = std::min(grid[i], grid[i + 1]);
      n.sample_hi = std::max(grid[i], grid[i + 1]);
      n.enc_lo = std::min(e.lo, n.sample_lo);
      n.enc_hi = std::max(e.hi, n.sample_hi);
    }
    for (std::size_t id = leaves - 1; id >= 1; --id) {
      const auto& a = nodes_[2 * id];
      const auto& b = nodes_[2 * id + 1];
      auto& n = nodes_[id];
      n.sample_lo = std::min(a.sample_lo, b.sample_lo);
      n.sample_hi = std::max(a.sample_hi, b.sample_hi);
      n.enc_lo = std::min(a.enc_lo, b.enc_lo);
      n.enc_hi = std::max(a.enc_hi, b.enc_hi);
    }
  }

  GraphIndex(const GraphIndex&) = delete;
  GraphIndex& operator=(const GraphIndex&) = delete;

  const ScalarField& field() const { return *f_; }

  /// Cube against the open neighbourhood E_delta.
  Cell neighborhood(std::span<const double> lower, double side, double delta) const {
    if (levels_ == 0) return GraphNeighborhood<CachedEnclosure<ScalarField>>{&cached_, delta}(lower, side);
    const double cx = lower[0] + side / 2.0;
    const double cy = lower[1] + side / 2.0;
    const double h = side * std::numbers::sqrt2 / 2.0;
    // Graph points beyond the indexed span are at least this far horizontally.
    const double outside_span = std::min(cx - kLeft, kLeft + kWidth - cx);
    bool undecided = outside_span < delta + h;
    const double stop_width = std::max(h / 2.0, leaf_width());
    std::array<std::uint32_t, 128> stack{};
    std::size_t top = 0;
    stack[top++] = 1;
    while (top > 0) {
      const std::uint32_t id = stack[--top];
      const auto [x0, x1] = span_of(id);
      const auto& n = nodes_[id];
      if (box_distance(cx, cy, x0, x1, n.enc_lo, n.enc_hi) >= delta + h) continue;
      const double far_x = std::max(std::abs(cx - x0), std::abs(cx - x1));
      const double dy = cy < n.sample_lo ? n.sample_lo - cy : (cy > n.sample_hi ? cy - n.sample_hi : 0.0);
      if (std::hypot(far_x, dy) * (1.0 + 1e-12) + h < delta) return Cell::inside;
      if (x1 - x0 <= stop_width || 2 * id >= nodes_.size()) {
        undecided = true;
        continue;
      }
      const std::uint32_t a = 2 * id, b = 2 * id + 1;
      const auto [ax0, ax1] = span_of(a);
      const auto [bx0, bx1] = span_of(b);
      const double da = box_distance(cx, cy, ax0, ax1, nodes_[a].enc_lo, nodes_[a].enc_hi);
      const double db = box_distance(cx, cy, bx0, bx1, nodes_[b].enc_lo, nodes_[b].enc_hi);
      // Nearer child on top of the stack.
      if (da <= db) {
        stack[top++] = b;
        stack[top++] = a;
      } else {
        stack[top++] = a;
        stack[top++] = b;
      }
    }
    return undecided ? Cell::straddles : Cell::outside;
  }

  /// Cube against the graph E; never inside.
  Cell graph(std::span<const double> lower, double side) const {
    if (levels_ == 0) return GraphSet<CachedEnclosure<ScalarField>>{&cached_}(lower, side);
    const double xlo = lower[0], xhi = lower[0] + side;
    const double ylo = lower[1], yhi = lower[1] + side;
    const double stop_width = std::max(side / 4.0, leaf_width());
    std::array<std::uint32_t, 128> stack{};
    std::size_t top = 0;
    stack[top++] = 1;
    while (top > 0) {
      const std::uint32_t id = stack[--top];
      const auto [x0, x1] = span_of(id);
      if (x1 < xlo || x0 > xhi) continue;
      const auto& n = nodes_[id];
      if (n.enc_lo > yhi || n.enc_hi < ylo) continue;
      const bool within = x0 >= xlo && x1 <= xhi;
      if (within && n.sample_lo <= yhi && n.sample_hi >= ylo) return Cell::straddles;
      if (x1 - x0 <= stop_width || 2 * id >= nodes_.size()) return Cell::straddles;
      stack[top++] = 2 * id;
      stack[top++] = 2 * id + 1;
    }
    return Cell::outside;
  }

 private:
  struct Node {
    double enc_lo = 0.0, enc_hi = 0.0;        // encloses f on the column
    double sample_lo = 0.0, sample_hi = 0.0;  // attained on the column
  };

  double leaf_width() const { return kWidth / static_cast<double>(std::size_t{1} << levels_); }

  std::pair<double, double> span_of(std::uint32_t id) const {
    const int level = std::bit_width(id) - 1;
    const double w = kWidth / static_cast<double>(std::uint32_t{1} << level);
    const double x0 = kLeft + w * static_cast<double>(id - (std::uint32_t{1} << level));
    return {x0, x0 + w};
  }

  static double box_distance(double cx, double cy, double x0, double x1, double y0, double y1) {
    const double dx = cx < x0 ? x0 - cx : (cx > x1 ? cx - x1 : 0.0);
    const double dy = cy < y0 ? y0 - cy : (cy > y1 ? cy - y1 : 0.0);
    return std::hypot(dx, dy);
  }

  const ScalarField* f_;
  CachedEnclosure<ScalarField> cached_;
  int levels_ = 0;
  std::vector<Node> nodes_;
};

struct NeighborhoodIndicator {
  const GraphIndex* index = nullptr;
  double delta = 0.0;
  Cell operator()(std::span<const double> lower, double side) const { return index->neighborhood(lower, side, delta); }
};

struct GraphIndicator {
  const GraphIndex* index = nullptr;
  Cell operator()(std::span<const double> lower, double side) const { return index->graph(lower, side); }
};

}  // namespace zyg
