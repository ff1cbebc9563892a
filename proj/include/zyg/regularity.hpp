#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "zyg/function_catalog.hpp"
#include "zyg/parallel.hpp"
#include "zyg/random.hpp"

namespace zyg {

struct ScaleMax {
  double scale = 0.0;
  double max_ratio = 0.0;
};

/// Empirical lower bound for a sup of difference ratios, with its per-scale maxima.
struct SeminormEstimate {
  double value = 0.0;
  std::size_t x_samples = 0;
  std::vector<ScaleMax> scale_profile;
};

/// Where and at which step sizes the ratios are sampled.
struct SamplingPlan {
  std::size_t x_samples = 4096;
  std::vector<double> scales;
  std::uint64_t seed = 1;
};

/// 2^{-k} for k = first..last (coarse to fine).
inline std::vector<double> dyadic_scales(int first, int last) {
  std::vector<double> out;
  for (int k = first; k <= last; ++k) out.push_back(std::exp2(-k));
  return out;
}

inline SamplingPlan default_plan() { return SamplingPlan{4096, dyadic_scales(4, 20), 1}; }

namespace detail {

// d = 1: the uniform grid i/(n-1), which contains 0 and 1 and is nested under
// doubling of n-1. d >= 2: seeded uniform points, prefix-stable in n.
inline Point sample_point(std::size_t d, std::size_t n, std::size_t i, std::uint64_t seed) {
  if (d == 1) return Point{n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1)};
  StreamRng rng(mix64(seed, 0x51ULL, i));
  Point p(d);
  for (auto& v : p) v = rng.uniform();
  return p;
}

// Half the samples use an axis direction, half a random unit direction.
inline Point sample_direction(std::size_t d, std::size_t i, std::uint64_t seed) {
  if (d == 1) return Point{1.0};
  if (i % 2 == 0) {
    Point e(d, 0.0);
    e[(i / 2) % d] = 1.0;
    return e;
  }
  StreamRng rng(mix64(seed, 0xd1ULL, i));
  return random_unit_vector(rng, d);
}

enum class RatioKind { second, first };

template <ScalarFunction F>
SeminormEstimate sampled_sup(const F& f, const SamplingPlan& plan, RatioKind kind, double alpha) {
  if (plan.scales.empty()) throw ConfigurationError("scale list is empty");
  if (plan.x_samples < 1) throw ConfigurationError("need at least one x sample");
  for (double s : plan.scales) {
    if (!(s > 0.0)) throw ConfigurationError("scales must be positive");
  }
  const std::size_t d = f.dimension();
  const std::size_t ns = plan.scales.size();
  std::vector<double> per_sample(plan.x_samples * ns, 0.0);
  parallel_for(plan.x_samples, [&](std::size_t i) {
    const Point x = sample_point(d, plan.x_samples, i, plan.seed);
    const Point u = sample_direction(d, i, plan.seed);
    for (std::size_t s = 0; s < ns; ++s) {
      const Point h = scaled(u, plan.scales[s]);
      const double hn = norm(h);
      double r = 0.0;
      if (kind == RatioKind::second) {
        r = std::abs(second_difference(f, x, h)) / hn;
      } else {
        r = std::abs(first_difference(f, x, h)) / std::pow(hn, alpha);
      }
      per_sample[i * ns + s] = r;
    }
  });
  SeminormEstimate out;
  out.x_samples = plan.x_samples;
  for (std::size_t s = 0; s < ns; ++s) {
    double m = 0.0;
    for (std::size_t i = 0; i < plan.x_samples; ++i) m = std::max(m, per_sample[i * ns + s]);
    out.scale_profile.push_back({plan.scales[s], m});
    out.value = std::max(out.value, m);
  }
  return out;
}

}  // namespace detail

/// max |f(x+h) + f(x-h) - 2 f(x)| / |h| over the sampling plan.
template <ScalarFunction F>
SeminormEstimate estimate_zygmund_seminorm(const F& f, const SamplingPlan& plan = default_plan()) {
  return detail::sampled_sup(f, plan, detail::RatioKind::second, 1.0);
}

/// max |f(x+h) - f(x)| / |h|^alpha; alpha = 1 gives the Lipschitz ratio.
template <ScalarFunction F>
SeminormEstimate estimate_pointwise_constant(const F& f, double alpha, const SamplingPlan& plan = default_plan()) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("Hoelder exponent must lie in (0, 1]");
  return detail::sampled_sup(f, plan, detail::RatioKind::first, alpha);
}

/// Least-squares slope of log2(max ratio) against log2(scale) over the finest `count` scales.
inline double trend_slope(const std::vector<ScaleMax>& profile, std::size_t count = 8) {
  std::vector<ScaleMax> rows = profile;
  std::sort(rows.begin(), rows.end(), [](const ScaleMax& a, const ScaleMax& b) { return a.scale < b.scale; });
  rows.resize(std::min(count, rows.size()));
  if (rows.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log2(r.scale);
    const double y = std::log2(std::max(r.max_ratio, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

/// Mean of the finest half over the mean of the coarser half, within the finest
/// `count` scales. Values near 1 mean a flat profile.
inline double growth_factor(const std::vector<ScaleMax>& profile, std::size_t count = 8) {
  std::vector<ScaleMax> rows = profile;
  std::sort(rows.begin(), rows.end(), [](const ScaleMax& a, const ScaleMax& b) { return a.scale < b.scale; });
  rows.resize(std::min(count, rows.size()));
  const std::size_t half = rows.size() / 2;
  if (half == 0) return 1.0;
  double fine = 0.0, coarse = 0.0;
  for (std::size_t i = 0; i < half; ++i) fine += rows[i].max_ratio;
  for (std::size_t i = half; i < 2 * half; ++i) coarse += rows[i].max_ratio;
  if (coarse <= 1e-12 * half) return 1.0;
  return fine / coarse;
}

enum class Verdict { zygmund_lipschitz, zygmund_not_lipschitz, not_zygmund };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::zygmund_lipschitz:
      return "Zygmund-consistent (first differences bounded)";
    case Verdict::zygmund_not_lipschitz:
      return "Zygmund-consistent (first differences grow)";
    case Verdict::not_zygmund:
      return "not Zygmund-consistent (second differences grow)";
  }
  return "?";
}

struct ProfileRow {
  double scale = 0.0;
  double max_second_ratio = 0.0;
  double max_first_ratio = 0.0;
};

struct ClassReport {
  RegularityLabel declared;
  std::vector<ProfileRow> rows;  // coarse to fine
  double second_slope = 0.0;
  double first_slope = 0.0;
  double second_growth = 1.0;  // finest-4 mean over next-4 mean of the second-difference maxima
  double first_growth = 1.0;
  bool second_bounded = true;
  bool first_growing = false;
  Verdict verdict = Verdict::zygmund_lipschitz;
  bool consistent = true;
};

// Verdict thresholds on the finest 8 scales.
inline constexpr double kBoundedSlopeFloor = -0.15;
inline constexpr double kGrowthFactor = 1.1;
inline constexpr std::size_t kTrendScales = 8;

/// Compares the declared label with the empirical first- and second-difference profiles.
template <ScalarFunction F>
ClassReport classify(const F& f, const RegularityLabel& declared, const SamplingPlan& plan = default_plan()) {
  const auto second = estimate_zygmund_seminorm(f, plan);
  const auto first = estimate_pointwise_constant(f, 1.0, plan);
  ClassReport rep;
  rep.declared = declared;
  for (std::size_t i = 0; i < second.scale_profile.size(); ++i) {
    rep.rows.push_back({second.scale_profile[i].scale, second.scale_profile[i].max_ratio, first.scale_profile[i].max_ratio});
  }
  rep.second_slope = trend_slope(second.scale_profile, kTrendScales);
  rep.first_slope = trend_slope(first.scale_profile, kTrendScales);

  rep.second_growth = growth_factor(second.scale_profile);
  rep.first_growth = growth_factor(first.scale_profile);

  // Slopes catch power-law growth; the growth factor catches logarithmic growth.
  rep.second_bounded = rep.second_slope > kBoundedSlopeFloor && rep.second_growth <= kGrowthFactor;
  rep.first_growing = rep.first_growth > kGrowthFactor;
  if (!rep.second_bounded) {
    rep.verdict = Verdict::not_zygmund;
  } else {
    rep.verdict = rep.first_growing ? Verdict::zygmund_not_lipschitz : Verdict::zygmund_lipschitz;
  }
  using C = RegularityLabel::Class;
  switch (declared.cls) {
    case C::lipschitz:
      rep.consistent = rep.verdict == Verdict::zygmund_lipschitz;
      break;
    case C::zygmund:
      rep.consistent = rep.verdict != Verdict::not_zygmund;
      break;
    case C::zygmund_not_lipschitz:
      rep.consistent = rep.verdict == Verdict::zygmund_not_lipschitz;
      break;
    case C::holder:
      rep.consistent = declared.alpha >= 1.0 || rep.verdict == Verdict::not_zygmund;
      break;
  }
  return rep;
}

inline ClassReport classify(const ScalarField& f, const SamplingPlan& plan = default_plan()) {
  return classify(f, f.label(), plan);
}

/// CSV with columns scale,max_second_ratio,max_first_ratio.
inline void write_profile_csv(std::ostream& os, const std::vector<ProfileRow>& rows) {
  os << "scale,max_second_ratio,max_first_ratio\n";
  os.precision(17);
  for (const auto& r : rows) os << r.scale << ',' << r.max_second_ratio << ',' << r.max_first_ratio << '\n';
}

}  // namespace zyg
