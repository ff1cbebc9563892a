#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zyg/errors.hpp"
#include "zyg/geometry.hpp"
#include "zyg/spec_string.hpp"

namespace zyg {

/// Anything that maps points of R^d to reals and reports d.
template <class F>
concept ScalarFunction = requires(const F& f, std::span<const double> x) {
  { f(x) } -> std::convertible_to<double>;
  { f.dimension() } -> std::convertible_to<std::size_t>;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// A field that can also enclose its own range over a box.
template <class F>
concept EnclosableFunction = ScalarFunction<F> && requires(const F& f, std::span<const double> lo, std::span<const double> hi) {
  { f.range_over(lo, hi) } -> std::convertible_to<Interval>;
};

/// Declared regularity class. Metadata only; the regularity module checks it empirically.
struct RegularityLabel {
  enum class Class { lipschitz, holder, zygmund, zygmund_not_lipschitz };

  Class cls = Class::zygmund;
  double constant = 0.0;  // L for Lipschitz, C for Hoelder
  double alpha = 1.0;

  std::string describe() const {
    switch (cls) {
      case Class::lipschitz:
        return "Lipschitz(L=" + format_real(constant) + ")";
      case Class::holder:
        return "Holder(alpha=" + format_real(alpha) + ",C=" + format_real(constant) + ")";
      case Class::zygmund:
        return "Zygmund";
      case Class::zygmund_not_lipschitz:
        return "ZygmundNotLipschitz";
    }
    return "?";
  }
};

enum class Family { weierstrass, takagi, holder, affine, abs, square };

inline constexpr int kDefaultTruncation = 48;
inline constexpr double kDefaultTailTolerance = 0x1.0p-40;
inline constexpr double kHolderTailTolerance = 1e-6;
inline constexpr std::size_t kMaxDimension = 3;
inline constexpr double kTakagiLabelExponent = 0.9;

/// Deterministic evaluator for one member of the test-function catalog.
///
/// Series families and |x|, x^2 act coordinate-wise and extend to d >= 2 as
/// f(x) = g(x_1) + ... + g(x_d). Every field may carry an output rescale
/// f -> scale * f + offset, which is how graphs are embedded into the unit cube.
class ScalarField {
 public:
  static ScalarField weierstrass(double a, double b, int truncation = kDefaultTruncation, std::size_t dim = 1,
                                 double tail_tolerance = kDefaultTailTolerance) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigurationError("weierstrass requires 0 < a < 1");
    if (!(b > 1.0)) throw ConfigurationError("weierstrass requires b > 1");
    ScalarField f(Family::weierstrass, dim, truncation, tail_tolerance);
    f.a_ = a;
    f.b_ = b;
    f.build_series(a, b);
    return f;
  }

  /// The critical case a b = 1.
  static ScalarField critical_weierstrass(double b, int truncation = kDefaultTruncation, std::size_t dim = 1) {
    return weierstrass(1.0 / b, b, truncation, dim);
  }

  static ScalarField takagi(int truncation = kDefaultTruncation, std::size_t dim = 1,
                            double tail_tolerance = kDefaultTailTolerance) {
    ScalarField f(Family::takagi, dim, truncation, tail_tolerance);
    f.a_ = 0.5;
    f.b_ = 2.0;
    f.build_series(0.5, 2.0);
    return f;
  }

  /// sum 2^{-alpha n} cos(2^n pi x), a Hoelder-alpha function that is not Zygmund for alpha < 1.
  static ScalarField holder_sample(double alpha, int truncation = kDefaultTruncation, std::size_t dim = 1,
                                   double tail_tolerance = kHolderTailTolerance) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigurationError("holder sample requires 0 < alpha < 1");
    ScalarField f(Family::holder, dim, truncation, tail_tolerance);
    f.alpha_ = alpha;
    f.a_ = std::exp2(-alpha);
    f.b_ = 2.0;
    f.build_series(f.a_, 2.0);
    return f;
  }

  static ScalarField affine(std::vector<double> slope, double intercept = 0.0) {
    if (slope.empty() || slope.size() > kMaxDimension) throw ConfigurationError("affine field needs 1..3 slopes");
    ScalarField f(Family::affine, slope.size(), 0, 0.0);
    f.slope_ = std::move(slope);
    f.intercept_ = intercept;
    return f;
  }

  static ScalarField constant(double c, std::size_t dim = 1) { return affine(std::vector<double>(dim, 0.0), c); }

  static ScalarField abs_field(std::size_t dim = 1) { return ScalarField(Family::abs, dim, 0, 0.0); }

  static ScalarField square(std::size_t dim = 1) { return ScalarField(Family::square, dim, 0, 0.0); }

  /// Parses `family:key=value{,key=value}`.
  static ScalarField parse(std::string_view text) {
    const auto spec = SpecString::parse(text);
    const auto dim = static_cast<std::size_t>(spec.integer("d", 1));
    const int n = static_cast<int>(spec.integer("N", kDefaultTruncation));
    ScalarField f;
    if (spec.family == "weierstrass") {
      spec.require_only({"a", "b", "N", "d", "tol", "scale", "offset"});
      const double b = spec.real("b", 2.0);
      f = weierstrass(spec.real("a", 1.0 / b), b, n, dim, spec.real("tol", kDefaultTailTolerance));
    } else if (spec.family == "takagi") {
      spec.require_only({"N", "d", "tol", "scale", "offset"});
      f = takagi(n, dim, spec.real("tol", kDefaultTailTolerance));
    } else if (spec.family == "holder") {
      spec.require_only({"alpha", "N", "d", "tol", "scale", "offset"});
      f = holder_sample(spec.real("alpha", 0.5), n, dim, spec.real("tol", kHolderTailTolerance));
    } else if (spec.family == "affine") {
      spec.require_only({"slope", "c", "scale", "offset"});
      if (!spec.has("slope")) throw ConfigurationError("affine field requires slope=");
      f = affine(spec.reals("slope"), spec.real("c", 0.0));
    } else if (spec.family == "constant") {
      spec.require_only({"c", "d", "scale", "offset"});
      f = constant(spec.real("c", 0.0), dim);
    } else if (spec.family == "abs") {
      spec.require_only({"d", "scale", "offset"});
      f = abs_field(dim);
    } else if (spec.family == "square") {
      spec.require_only({"d", "scale", "offset"});
      f = square(dim);
    } else {
      throw ConfigurationError("unknown field family '" + spec.family + "'");
    }
    return f.rescaled(spec.real("scale", 1.0), spec.real("offset", 0.0));
  }

  /// Canonical spec string; parse(spec()) reproduces the field.
  std::string spec() const {
    std::string s;
    const auto dim = ",d=" + std::to_string(dim_);
    switch (family_) {
      case Family::weierstrass:
        s = "weierstrass:a=" + format_real(a_) + ",b=" + format_real(b_) + ",N=" + std::to_string(truncation_) + dim +
            ",tol=" + format_real(tail_tolerance_);
        break;
      case Family::takagi:
        s = "takagi:N=" + std::to_string(truncation_) + dim + ",tol=" + format_real(tail_tolerance_);
        break;
      case Family::holder:
        s = "holder:alpha=" + format_real(alpha_) + ",N=" + std::to_string(truncation_) + dim +
            ",tol=" + format_real(tail_tolerance_);
        break;
      case Family::affine: {
        s = "affine:slope=";
        for (std::size_t i = 0; i < slope_.size(); ++i) s += (i ? ";" : "") + format_real(slope_[i]);
        s += ",c=" + format_real(intercept_);
        break;
      }
      case Family::abs:
        s = "abs:d=" + std::to_string(dim_);
        break;
      case Family::square:
        s = "square:d=" + std::to_string(dim_);
        break;
    }
    if (scale_ != 1.0 || offset_ != 0.0) s += ",scale=" + format_real(scale_) + ",offset=" + format_real(offset_);
    return s;
  }

  /// x -> scale * f(x) + offset.
  ScalarField rescaled(double scale, double offset) const {
    if (!std::isfinite(scale) || !std::isfinite(offset) || scale == 0.0) {
      throw ConfigurationError("rescale needs finite nonzero scale and finite offset");
    }
    ScalarField out = *this;
    out.scale_ = scale_ * scale;
    out.offset_ = offset_ * scale + offset;
    return out;
  }

  Family family() const { return family_; }
  std::size_t dimension() const { return dim_; }
  int truncation() const { return truncation_; }
  double scale() const { return scale_; }
  double offset() const { return offset_; }
  double tail_tolerance() const { return tail_tolerance_; }
  bool is_series() const {
    return family_ == Family::weierstrass || family_ == Family::takagi || family_ == Family::holder;
  }
  bool is_affine() const { return family_ == Family::affine; }

  double operator()(std::span<const double> x) const {
    if (x.size() != dim_) throw DomainError("point dimension mismatch");
    double v = 0.0;
    if (family_ == Family::affine) {
      v = intercept_;
      for (std::size_t i = 0; i < dim_; ++i) v += slope_[i] * x[i];
    } else {
      for (std::size_t i = 0; i < dim_; ++i) v += profile(x[i]);
    }
    return scale_ * v + offset_;
  }

  double operator()(double x) const {
    const double p[1] = {x};
    return (*this)(std::span<const double>(p, 1));
  }

  /// One-dimensional profile g of a coordinate-wise family (unscaled).
  double profile(double t) const {
    if (!std::isfinite(t)) throw DomainError("evaluation point must be finite");
    switch (family_) {
      case Family::weierstrass:
      case Family::holder:
        return cosine_series(t);
      case Family::takagi:
        return takagi_series(t);
      case Family::abs:
        return std::abs(t);
      case Family::square:
        return t * t;
      case Family::affine:
        return slope_[0] * t;
    }
    return 0.0;
  }

  /// Sum of the omitted terms' amplitudes, sum_{n>N} a^n (times the cosine/distance bound).
  double tail_bound() const {
    switch (family_) {
      case Family::weierstrass:
      case Family::holder:
        return std::pow(a_, truncation_ + 1) / (1.0 - a_);
      case Family::takagi:
        return 0.5 * std::exp2(-(truncation_ + 1));
      default:
        return 0.0;
    }
  }

  /// sup over the unit cube of |f|.
  double declared_bound() const {
    double g = 0.0;
    switch (family_) {
      case Family::weierstrass:
      case Family::holder:
        for (double amp : amplitude_) g += amp;
        break;
      case Family::takagi:
        for (double amp : amplitude_) g += 0.5 * amp;
        break;
      case Family::abs:
      case Family::square:
        g = 1.0;
        break;
      case Family::affine: {
        double s = std::abs(intercept_);
        for (double a : slope_) s += std::abs(a);
        return std::abs(scale_) * s + std::abs(offset_);
      }
    }
    return std::abs(scale_) * g * static_cast<double>(dim_) + std::abs(offset_);
  }

  /// Modulus of continuity of the truncated profile: |g(s) - g(t)| <= modulus(|s - t|).
  /// Only meaningful for the series families.
  double modulus(double h) const {
    h = std::abs(h);
    double w = 0.0;
    switch (family_) {
      case Family::weierstrass:
      case Family::holder:
        for (int n = 0; n <= truncation_; ++n) {
          w += amplitude_[n] * std::min(2.0, frequency_[n] * std::numbers::pi * h);
        }
        return w;
      case Family::takagi:
        for (int n = 0; n <= truncation_; ++n) w += amplitude_[n] * std::min(0.5, frequency_[n] * h);
        return w;
      case Family::abs:
        return h;
      default:
        throw DomainError("modulus is only defined for coordinate-wise series and |x|");
    }
  }

  /// Encloses f over the box [lower, upper]. The result contains every computed value.
  Interval range_over(std::span<const double> lower, std::span<const double> upper) const {
    Interval sum{0.0, 0.0};
    if (family_ == Family::affine) {
      sum.lo = sum.hi = intercept_;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double a = slope_[i] * lower[i];
        const double b = slope_[i] * upper[i];
        sum.lo += std::min(a, b);
        sum.hi += std::max(a, b);
      }
    } else {
      for (std::size_t i = 0; i < dim_; ++i) {
        const Interval c = profile_range(lower[i], upper[i]);
        sum.lo += c.lo;
        sum.hi += c.hi;
      }
    }
    Interval out{scale_ * sum.lo + offset_, scale_ * sum.hi + offset_};
    if (out.lo > out.hi) std::swap(out.lo, out.hi);
    const double slack = 1e-12 * (1.0 + std::max(std::abs(out.lo), std::abs(out.hi)));
    return {out.lo - slack, out.hi + slack};
  }

  RegularityLabel label() const {
    const double d = static_cast<double>(dim_);
    const double s = std::abs(scale_);
    RegularityLabel out;
    switch (family_) {
      case Family::affine:
        out.cls = RegularityLabel::Class::lipschitz;
        out.constant = s * norm(slope_);
        break;
      case Family::abs:
        out.cls = RegularityLabel::Class::lipschitz;
        out.constant = s * std::sqrt(d);
        break;
      case Family::square:
        // On the unit cube and its unit neighbourhood.
        out.cls = RegularityLabel::Class::lipschitz;
        out.constant = s * 2.0 * std::sqrt(d);
        break;
      case Family::takagi:
        // Log-Lipschitz: 2 T(h) / h grows like 2 log2(1/h) at x = 0, so not Zygmund.
        out.cls = RegularityLabel::Class::holder;
        out.alpha = kTakagiLabelExponent;
        out.constant = s * d * holder_constant(kTakagiLabelExponent);
        break;
      case Family::holder:
        out.cls = RegularityLabel::Class::holder;
        out.alpha = alpha_;
        out.constant = s * d * holder_constant(alpha_);
        break;
      case Family::weierstrass: {
        const double ab = a_ * b_;
        if (std::abs(ab - 1.0) < 1e-12) {
          out.cls = RegularityLabel::Class::zygmund_not_lipschitz;
        } else if (ab < 1.0) {
          out.cls = RegularityLabel::Class::lipschitz;
          out.constant = s * std::sqrt(d) * std::numbers::pi / (1.0 - ab);
        } else {
          out.cls = RegularityLabel::Class::holder;
          out.alpha = -std::log(a_) / std::log(b_);
          out.constant = s * d * holder_constant(out.alpha);
        }
        break;
      }
    }
    return out;
  }

 private:
  ScalarField() = default;
  ScalarField(Family family, std::size_t dim, int truncation, double tail_tolerance)
      : family_(family), dim_(dim), truncation_(truncation), tail_tolerance_(tail_tolerance) {
    if (dim_ < 1 || dim_ > kMaxDimension) throw ConfigurationError("dimension must be 1..3");
  }

  void build_series(double a, double b) {
    if (truncation_ < 1) throw ConfigurationError("series truncation N must be >= 1");
    amplitude_.resize(truncation_ + 1);
    frequency_.resize(truncation_ + 1);
    for (int n = 0; n <= truncation_; ++n) {
      amplitude_[n] = std::pow(a, n);
      frequency_[n] = std::pow(b, n);
    }
    integer_frequency_ = b == std::round(b);
    if (tail_bound() > tail_tolerance_) {
      throw ConfigurationError("truncation N=" + std::to_string(truncation_) + " leaves tail " +
                               format_real(tail_bound()) + " above tolerance " + format_real(tail_tolerance_));
    }
  }

  // For integer b the phase b^n x mod 2 is carried exactly instead of forming b^n pi x.
  double cosine_series(double t) const {
    double v = 0.0;
    if (integer_frequency_) {
      double phase = std::fmod(t, 2.0);
      if (phase < 0.0) phase += 2.0;
      for (int n = 0; n <= truncation_; ++n) {
        v += amplitude_[n] * std::cos(std::numbers::pi * phase);
        phase = std::fmod(b_ * phase, 2.0);
      }
    } else {
      for (int n = 0; n <= truncation_; ++n) v += amplitude_[n] * std::cos(frequency_[n] * std::numbers::pi * t);
    }
    return v;
  }

  double takagi_series(double t) const {
    double phase = t - std::floor(t);
    double v = 0.0;
    for (int n = 0; n <= truncation_; ++n) {
      v += amplitude_[n] * std::min(phase, 1.0 - phase);
      phase = 2.0 * phase;
      phase -= std::floor(phase);
    }
    return v;
  }

  Interval profile_range(double lo, double hi) const {
    switch (family_) {
      case Family::abs: {
        const double a = std::abs(lo), b = std::abs(hi);
        return {(lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(a, b), std::max(a, b)};
      }
      case Family::square: {
        const double a = lo * lo, b = hi * hi;
        return {(lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(a, b), std::max(a, b)};
      }
      default: {
        const double mid = 0.5 * (lo + hi);
        const double v = profile(mid);
        const double w = modulus(0.5 * (hi - lo));
        double floor_value = -declared_profile_bound();
        if (family_ == Family::takagi) floor_value = 0.0;
        return {std::max(v - w, floor_value), std::min(v + w, declared_profile_bound())};
      }
    }
  }

  double declared_profile_bound() const {
    double g = 0.0;
    for (double amp : amplitude_) g += amp;
    return family_ == Family::takagi ? 0.5 * g : g;
  }

  // Hoelder constant of the truncated profile derived from its modulus on dyadic scales.
  double holder_constant(double alpha) const {
    double c = 0.0;
    for (int j = 0; j <= 60; ++j) {
      const double h = std::exp2(-j);
      c = std::max(c, modulus(h) / std::pow(h, alpha));
    }
    return c * std::exp2(alpha);
  }

  Family family_ = Family::affine;
  std::size_t dim_ = 1;
  int truncation_ = 0;
  double tail_tolerance_ = 0.0;
  double a_ = 0.0;
  double b_ = 0.0;
  double alpha_ = 1.0;
  std::vector<double> slope_;
  double intercept_ = 0.0;
  double scale_ = 1.0;
  double offset_ = 0.0;
  std::vector<double> amplitude_;
  std::vector<double> frequency_;
  bool integer_frequency_ = false;
};

/// First difference f(x + h) - f(x).
template <ScalarFunction F>
double first_difference(const F& f, std::span<const double> x, std::span<const double> h) {
  if (!(norm(h) > 0.0)) throw DomainError("first difference needs |h| > 0");
  const Point xp = add(x, h);
  return f(std::span<const double>(xp)) - f(x);
}

/// Second difference f(x + h) + f(x - h) - 2 f(x).
template <ScalarFunction F>
double second_difference(const F& f, std::span<const double> x, std::span<const double> h) {
  if (!(norm(h) > 0.0)) throw DomainError("second difference needs |h| > 0");
  const Point xp = add(x, h);
  const Point xm = subtract(x, h);
  // Pair the outer values first so that h and -h give bit-identical results.
  const double a = f(std::span<const double>(xp));
  const double b = f(std::span<const double>(xm));
  return (std::min(a, b) + std::max(a, b)) - 2.0 * f(x);
}

}  // namespace zyg
