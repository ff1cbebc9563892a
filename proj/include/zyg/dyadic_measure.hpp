#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zyg/errors.hpp"
#include "zyg/geometry.hpp"
#include "zyg/parallel.hpp"
#include "zyg/random.hpp"
#include "zyg/spec_string.hpp"

namespace zyg {

/// Classification of a closed dyadic cube against a set.
enum class Cell { inside, outside, straddles };

/// Indicators classify the closed cube lower + [0, side]^n.
template <class I>
concept CubeIndicator = requires(const I& ind, std::span<const double> lower, double side) {
  { ind(lower, side) } -> std::convertible_to<Cell>;
};

/// lower <= true mass <= upper.
struct MassInterval {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t straddling_cells = 0;

  double width() const { return upper - lower; }
  bool contains(double v) const { return lower <= v && v <= upper; }
};

inline constexpr int kMaxDyadicDimension = 4;
inline constexpr std::size_t kEagerWeightNodes = std::size_t{1} << 20;

inline double default_beta(int n) {
  switch (n) {
    case 1:
      return 0.2;
    case 2:
      return 0.1;
    case 3:
      return 0.05;
    default:
      return 0.8 * std::exp2(-n);
  }
}

/// Measure on [0,1]^n built by splitting each dyadic cube's mass among its 2^n
/// children with fractions in [beta, 1 - (2^n - 1) beta]. Child digit bit k is
/// the upper half along axis k. Immutable after construction.
class DyadicMeasureTree {
 public:
  static DyadicMeasureTree build(int n, int depth, double beta, std::uint64_t seed) {
    return DyadicMeasureTree(n, depth, beta, seed);
  }

  /// `dyadic:n=2,depth=14,beta=0.1,seed=7`
  static DyadicMeasureTree parse(std::string_view text) {
    const auto s = SpecString::parse(text);
    if (s.family != "dyadic") throw ConfigurationError("unknown measure family '" + s.family + "'");
    s.require_only({"n", "depth", "beta", "seed"});
    const int n = static_cast<int>(s.integer("n", 2));
    const long seed = s.integer("seed", 1);
    if (seed < 0) throw ConfigurationError("seed must be nonnegative");
    return build(n, static_cast<int>(s.integer("depth", 14)), s.real("beta", default_beta(n)),
                 static_cast<std::uint64_t>(seed));
  }

  std::string spec() const {
    return "dyadic:n=" + std::to_string(n_) + ",depth=" + std::to_string(depth_) + ",beta=" + format_real(beta_) +
           ",seed=" + std::to_string(seed_);
  }

  int dimension() const { return n_; }
  int depth() const { return depth_; }
  double beta() const { return beta_; }
  std::uint64_t seed() const { return seed_; }
  bool is_uniform() const { return uniform_; }
  unsigned children() const { return 1u << n_; }

  /// Child fractions of the node with the given Morton index at `level`.
  std::vector<double> node_weights(int level, std::uint64_t morton) const {
    std::vector<double> w(children());
    fill_weights(level, morton, w);
    return w;
  }

  double child_weight(int level, std::uint64_t morton, unsigned digit) const {
    if (uniform_) return uniform_weight_;
    if (level < cached_levels_) return cache_[level][morton * children() + digit];
    std::vector<double> w(children());
    fill_weights(level, morton, w);
    return w[digit];
  }

  /// Product of the weights along the digit path from the root.
  double mass_of_cube(std::span<const unsigned> digits) const {
    if (digits.size() > static_cast<std::size_t>(depth_)) {
      throw DomainError("cube address is deeper than the tree (" + std::to_string(digits.size()) + " > " +
                        std::to_string(depth_) + ")");
    }
    double m = 1.0;
    std::uint64_t morton = 0;
    for (std::size_t level = 0; level < digits.size(); ++level) {
      if (digits[level] >= children()) throw DomainError("cube address digit out of range");
      m *= child_weight(static_cast<int>(level), morton, digits[level]);
      morton = (morton << n_) | digits[level];
    }
    return m;
  }

  double mass_of_cube(std::string_view address) const {
    const auto digits = parse_address(address);
    return mass_of_cube(std::span<const unsigned>(digits));
  }

  /// Address text: "-" (or empty) for the root, otherwise one hex digit per level.
  std::vector<unsigned> parse_address(std::string_view address) const {
    std::vector<unsigned> out;
    if (address == "-") return out;
    for (char ch : address) {
      unsigned v = 0;
      if (ch >= '0' && ch <= '9') {
        v = static_cast<unsigned>(ch - '0');
      } else if (ch >= 'a' && ch <= 'f') {
        v = static_cast<unsigned>(ch - 'a' + 10);
      } else {
        throw DomainError("invalid character in cube address '" + std::string(address) + "'");
      }
      if (v >= children()) throw DomainError("cube address digit out of range in '" + std::string(address) + "'");
      out.push_back(v);
    }
    return out;
  }

  static std::string format_address(std::span<const unsigned> digits) {
    if (digits.empty()) return "-";
    static constexpr char hex[] = "0123456789abcdef";
    std::string s;
    for (unsigned d : digits) s.push_back(hex[d]);
    return s;
  }

  /// Lower-left corner and side of the cube with the given address.
  std::pair<Point, double> cube_of(std::span<const unsigned> digits) const {
    Point lower(static_cast<std::size_t>(n_), 0.0);
    double side = 1.0;
    for (unsigned d : digits) {
      side /= 2.0;
      for (int k = 0; k < n_; ++k) {
        if ((d >> k) & 1u) lower[static_cast<std::size_t>(k)] += side;
      }
    }
    return {lower, side};
  }

  /// One line per node of level < max_level in breadth-first Morton order:
  /// address followed by the child fractions at 17 significant digits.
  void write_weight_log(std::ostream& os, int max_level) const {
    max_level = std::min(max_level, depth_);
    const auto old = os.precision(17);
    std::vector<unsigned> digits;
    for (int level = 0; level < max_level; ++level) {
      const std::uint64_t count = std::uint64_t{1} << (n_ * level);
      digits.assign(static_cast<std::size_t>(level), 0);
      for (std::uint64_t morton = 0; morton < count; ++morton) {
        for (int j = 0; j < level; ++j) {
          digits[static_cast<std::size_t>(j)] =
              static_cast<unsigned>((morton >> (n_ * (level - 1 - j))) & (children() - 1));
        }
        os << format_address(digits);
        for (double w : node_weights(level, morton)) os << ' ' << w;
        os << '\n';
      }
    }
    os.precision(old);
  }

  /// Bracketing mass of a set from its cube classification, resolved down to `level`.
  /// With check_consistency, every decided cube above `level` has its children
  /// reclassified, and an inside/outside contradiction raises IndicatorLogicError.
  /// The check multiplies the indicator calls by up to 2^n.
  template <CubeIndicator I>
  MassInterval mass_of_set(const I& indicator, int level, bool check_consistency = false) const {
    if (level < 0 || level > depth_) {
      throw DomainError("resolution " + std::to_string(level) + " outside [0, " + std::to_string(depth_) + "]");
    }
    Accumulator root;
    Walk walk{*this, level, check_consistency};
    const Point origin(static_cast<std::size_t>(n_), 0.0);
    const Cell top = indicator(std::span<const double>(origin), 1.0);
    if (top != Cell::straddles || level == 0) {
      walk.visit(indicator, 0, 0, origin, 1.0, 1.0, top, root);
    } else {
      // Subtrees below level 1 run independently and are summed in digit order.
      std::vector<Accumulator> parts(children());
      parallel_for(children(), [&](std::size_t d) {
        Point lower = origin;
        for (int k = 0; k < n_; ++k) {
          if ((d >> k) & 1u) lower[static_cast<std::size_t>(k)] = 0.5;
        }
        const double m = child_weight(0, 0, static_cast<unsigned>(d));
        const Cell c = indicator(std::span<const double>(lower), 0.5);
        walk.visit(indicator, 1, d, lower, 0.5, m, c, parts[d]);
      });
      for (const auto& p : parts) root.merge(p);
    }
    MassInterval out;
    out.lower = std::min(root.inside, 1.0);
    out.upper = std::min(root.inside + root.straddle, 1.0);
    out.straddling_cells = root.straddle_count;
    return out;
  }

 private:
  DyadicMeasureTree(int n, int depth, double beta, std::uint64_t seed) : n_(n), depth_(depth), beta_(beta), seed_(seed) {
    if (n < 1 || n > kMaxDyadicDimension) {
      throw DomainError("dyadic dimension must lie in [1, " + std::to_string(kMaxDyadicDimension) + "]");
    }
    if (depth < 1 || n * depth > 60) throw DomainError("depth must satisfy 1 <= depth and n * depth <= 60");
    const double cap = std::exp2(-n);
    if (!(beta > 0.0 && beta <= cap)) {
      throw DomainError("beta must lie in (0, 2^-n] = (0, " + format_real(cap) + "], got " + format_real(beta));
    }
    uniform_ = beta == cap;
    uniform_weight_ = cap;
    if (uniform_) return;
    std::size_t total = 0;
    for (int level = 0; level < depth_; ++level) {
      const std::size_t count = std::size_t{1} << (n_ * level);
      if (total + count > kEagerWeightNodes) break;
      total += count;
      cache_.emplace_back(count * children());
      parallel_for(count, [&, level](std::size_t morton) {
        fill_weights(level, morton, std::span<double>(cache_[level].data() + morton * children(), children()));
      });
      cached_levels_ = level + 1;
    }
  }

  // Rejection from the box [beta, 1 - (2^n - 1) beta]^{2^n}, normalised, until
  // the normalised fractions respect the same box.
  void fill_weights(int level, std::uint64_t morton, std::span<double> w) const {
    if (uniform_) {
      std::fill(w.begin(), w.end(), uniform_weight_);
      return;
    }
    const double lo = beta_;
    const double hi = 1.0 - static_cast<double>(children() - 1) * beta_;
    StreamRng rng(mix64(seed_, static_cast<std::uint64_t>(level), morton));
    while (true) {
      double sum = 0.0;
      for (auto& v : w) {
        v = rng.uniform(lo, hi);
        sum += v;
      }
      bool ok = true;
      for (auto& v : w) {
        v /= sum;
        ok = ok && v >= lo && v <= hi;
      }
      if (ok) return;
    }
  }

  struct Accumulator {
    double inside = 0.0;
    double straddle = 0.0;
    std::size_t straddle_count = 0;

    void merge(const Accumulator& o) {
      inside += o.inside;
      straddle += o.straddle;
      straddle_count += o.straddle_count;
    }
  };

  struct Walk {
    const DyadicMeasureTree& tree;
    int target;
    bool check;

    template <class I>
    void check_children(const I& indicator, int level, const Point& lower, double side, Cell parent) const {
      const double half = side / 2.0;
      Point child(lower.size());
      for (unsigned d = 0; d < tree.children(); ++d) {
        for (int k = 0; k < tree.n_; ++k) {
          child[static_cast<std::size_t>(k)] = lower[static_cast<std::size_t>(k)] + (((d >> k) & 1u) ? half : 0.0);
        }
        const Cell c = indicator(std::span<const double>(child), half);
        if ((parent == Cell::inside && c == Cell::outside) || (parent == Cell::outside && c == Cell::inside)) {
          throw IndicatorLogicError("indicator classified a level-" + std::to_string(level + 1) + " cube as " +
                                    (c == Cell::inside ? "inside" : "outside") + " under a parent classified as " +
                                    (parent == Cell::inside ? "inside" : "outside"));
        }
      }
    }

    template <class I>
    void visit(const I& indicator, int level, std::uint64_t morton, const Point& lower, double side, double mass,
               Cell cell, Accumulator& acc) const {
      if (cell == Cell::outside) {
        if (check && level < target) check_children(indicator, level, lower, side, cell);
        return;
      }
      if (cell == Cell::inside) {
        if (check && level < target) check_children(indicator, level, lower, side, cell);
        acc.inside += mass;
        return;
      }
      if (level == target) {
        acc.straddle += mass;
        ++acc.straddle_count;
        return;
      }
      const double half = side / 2.0;
      Point child(lower.size());
      std::vector<double> weights(tree.children());
      if (tree.uniform_) {
        std::fill(weights.begin(), weights.end(), tree.uniform_weight_);
      } else if (level < tree.cached_levels_) {
        std::copy_n(tree.cache_[level].begin() + static_cast<std::ptrdiff_t>(morton * tree.children()),
                    tree.children(), weights.begin());
      } else {
        tree.fill_weights(level, morton, weights);
      }
      for (unsigned d = 0; d < tree.children(); ++d) {
        for (int k = 0; k < tree.n_; ++k) {
          child[static_cast<std::size_t>(k)] = lower[static_cast<std::size_t>(k)] + (((d >> k) & 1u) ? half : 0.0);
        }
        const Cell c = indicator(std::span<const double>(child), half);
        visit(indicator, level + 1, (morton << tree.n_) | d, child, half, mass * weights[d], c, acc);
      }
    }
  };

  int n_;
  int depth_;
  double beta_;
  std::uint64_t seed_;
  bool uniform_ = false;
  double uniform_weight_ = 0.0;
  int cached_levels_ = 0;
  std::vector<std::vector<double>> cache_;
};

/// The whole cube.
struct WholeCube {
  Cell operator()(std::span<const double>, double) const { return Cell::inside; }
};

/// Half-space {x_axis <= threshold}.
struct HalfSpace {
  std::size_t axis = 0;
  double threshold = 0.5;

  Cell operator()(std::span<const double> lower, double side) const {
    if (lower[axis] + side <= threshold) return Cell::inside;
    if (lower[axis] >= threshold) return Cell::outside;
    return Cell::straddles;
  }
};

/// Closed ball B(center, radius).
struct BallIndicator {
  Point center;
  double radius = 0.0;

  Cell operator()(std::span<const double> lower, double side) const {
    if (farthest_in_box(center, lower, side) <= radius) return Cell::inside;
    if (distance_to_box(center, lower, side) > radius) return Cell::outside;
    return Cell::straddles;
  }
};

/// Union of balls in [0,1]^n with a uniform-grid hash. A cube counts as inside
/// when a single ball contains it.
class BallUnionIndicator {
 public:
  explicit BallUnionIndicator(std::vector<Ball> balls) : balls_(std::move(balls)) {
    if (balls_.empty()) return;
    n_ = balls_.front().dimension();
    double rmax = 0.0;
    for (const auto& b : balls_) rmax = std::max(rmax, b.radius);
    const std::size_t cap = n_ == 1 ? 1u << 16 : (n_ == 2 ? 1u << 10 : 1u << 6);
    grid_ = static_cast<std::size_t>(std::clamp(std::floor(1.0 / rmax), 1.0, static_cast<double>(cap)));
    std::size_t total = 1;
    for (std::size_t k = 0; k < n_; ++k) total *= grid_;
    buckets_.resize(total);
    for (std::uint32_t i = 0; i < balls_.size(); ++i) {
      std::vector<std::size_t> lo(n_), hi(n_);
      for (std::size_t k = 0; k < n_; ++k) {
        lo[k] = cell_of(balls_[i].center[k] - balls_[i].radius);
        hi[k] = cell_of(balls_[i].center[k] + balls_[i].radius);
      }
      for_each_bucket(lo, hi, [&](std::size_t b) { buckets_[b].push_back(i); });
    }
  }

  Cell operator()(std::span<const double> lower, double side) const {
    if (balls_.empty()) return Cell::outside;
    std::vector<std::size_t> lo(n_), hi(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      lo[k] = cell_of(lower[k]);
      hi[k] = cell_of(lower[k] + side);
    }
    bool touches = false;
    bool inside = false;
    // Any ball meeting the cube is registered in a bucket the cube overlaps.
    for_each_bucket(lo, hi, [&](std::size_t b) {
      if (inside) return;
      for (auto i : buckets_[b]) {
        const auto& ball = balls_[i];
        if (distance_to_box(ball.center, lower, side) > ball.radius) continue;
        touches = true;
        if (farthest_in_box(ball.center, lower, side) <= ball.radius) {
          inside = true;
          return;
        }
      }
    });
    if (inside) return Cell::inside;
    return touches ? Cell::straddles : Cell::outside;
  }

  /// Whether p lies in some (open) ball of the union.
  bool contains(std::span<const double> p) const {
    if (balls_.empty()) return false;
    std::size_t flat = 0, stride = 1;
    for (std::size_t k = 0; k < n_; ++k) {
      flat += cell_of(p[k]) * stride;
      stride *= grid_;
    }
    for (auto i : buckets_[flat]) {
      if (balls_[i].contains(p)) return true;
    }
    return false;
  }

  std::size_t size() const { return balls_.size(); }

 private:
  std::size_t cell_of(double v) const {
    const double c = std::floor(v * static_cast<double>(grid_));
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(grid_ - 1)));
  }

  template <class Fn>
  void for_each_bucket(const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi, Fn&& fn) const {
    std::vector<std::size_t> idx = lo;
    while (true) {
      std::size_t flat = 0, stride = 1;
      for (std::size_t k = 0; k < n_; ++k) {
        flat += idx[k] * stride;
        stride *= grid_;
      }
      fn(flat);
      std::size_t k = 0;
      while (k < n_ && idx[k] == hi[k]) {
        idx[k] = lo[k];
        ++k;
      }
      if (k == n_) return;
      ++idx[k];
    }
  }

  std::vector<Ball> balls_;
  std::size_t n_ = 0;
  std::size_t grid_ = 1;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

/// A minus B for indicators; B is assumed to have empty interior or be classified conservatively.
template <CubeIndicator A, CubeIndicator B>
struct Difference {
  A a;
  B b;

  Cell operator()(std::span<const double> lower, double side) const {
    const Cell ca = a(lower, side);
    if (ca == Cell::outside) return Cell::outside;
    const Cell cb = b(lower, side);
    if (cb == Cell::inside) return Cell::outside;
    if (ca == Cell::inside && cb == Cell::outside) return Cell::inside;
    return Cell::straddles;
  }
};

struct DoublingSample {
  Point center;
  double radius = 0.0;
  MassInterval outer;  // closed ball of radius r
  MassInterval inner;  // closed ball of radius r/2
  double ratio_upper = 0.0;
  double ratio_lower = 0.0;
};

struct DoublingReport {
  double C = 0.0;                   // max over samples of ratio_upper
  double slack = 0.0;               // max over samples of ratio_upper / ratio_lower - 1
  std::vector<DoublingSample> samples;
  std::vector<std::size_t> violations;  // samples whose ratio_upper exceeds the claimed constant
  int resolution = 0;
};

struct DoublingPlan {
  std::size_t samples = 200;
  double r_min = 1.0 / 64.0;
  double r_max = 0.25;
  std::uint64_t seed = 1;
  double claimed_C = std::numeric_limits<double>::infinity();
  int resolution = -1;  // -1 selects the tree depth
};

/// Empirical doubling constant from balls with centres in [r, 1-r]^n and radii
/// log-uniform in [r_min, r_max]; upper bounds on top, lower bounds below.
inline DoublingReport verify_doubling(const DyadicMeasureTree& tree, const DoublingPlan& plan = {}) {
  if (!(plan.r_min > 0.0 && plan.r_min <= plan.r_max && plan.r_max <= 0.25)) {
    throw DomainError("doubling radii must satisfy 0 < r_min <= r_max <= 1/4");
  }
  if (plan.samples == 0) throw ConfigurationError("doubling check needs at least one sample");
  DoublingReport rep;
  rep.resolution = plan.resolution < 0 ? tree.depth() : plan.resolution;
  const auto n = static_cast<std::size_t>(tree.dimension());
  rep.samples.resize(plan.samples);
  for (std::size_t i = 0; i < plan.samples; ++i) {
    StreamRng rng(mix64(plan.seed, 0xd0bULL, i));
    auto& s = rep.samples[i];
    s.radius = std::exp(rng.uniform(std::log(plan.r_min), std::log(plan.r_max)));
    s.center.resize(n);
    for (auto& c : s.center) c = rng.uniform(s.radius, 1.0 - s.radius);
  }
  for (auto& s : rep.samples) {
    s.outer = tree.mass_of_set(BallIndicator{s.center, s.radius}, rep.resolution, false);
    s.inner = tree.mass_of_set(BallIndicator{s.center, s.radius / 2.0}, rep.resolution, false);
    if (!(s.inner.lower > 0.0)) {
      throw ResolutionError("half ball of radius " + format_real(s.radius / 2.0) +
                            " has zero lower mass at resolution " + std::to_string(rep.resolution));
    }
    s.ratio_upper = s.outer.upper / s.inner.lower;
    s.ratio_lower = s.outer.lower / s.inner.upper;
  }
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& s = rep.samples[i];
    rep.C = std::max(rep.C, s.ratio_upper);
    if (s.ratio_lower > 0.0) rep.slack = std::max(rep.slack, s.ratio_upper / s.ratio_lower - 1.0);
    else rep.slack = std::numeric_limits<double>::infinity();
    if (s.ratio_upper > plan.claimed_C) rep.violations.push_back(i);
  }
  return rep;
}

}  // namespace zyg
