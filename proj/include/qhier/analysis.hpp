#pragma once

// Power-law fits, pseudo-threshold extraction and the soft/hard
// outperformance conditions for the concatenated scheme.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qhier/sim.hpp"

namespace qhier {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference constants for the (3,4) HGP + L=5 surface construction.
struct FitConstants {
  double b = 5.481;      // α = b·s^c (soft decoding)
  double c = 0.667;
  double b_h = 2.76;     // d_s = b_h·s^c_h
  double c_h = 0.660;
  double pth_c = 0.157;  // average pseudo-threshold of the concatenated codes
  double pth_s = 0.1776; // surface-code reference threshold

  friend bool operator==(const FitConstants&, const FitConstants&) = default;
};

struct PowerLawFit {
  double b = 0.0;
  double c = 0.0;
  double residual = 0.0;  // RMS residual in log space
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

inline LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  if (!(sw > 0)) throw FitError("fit: weights sum to zero");
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw FitError("fit: abscissae are not distinct");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += w[i] * r * r;
  }
  f.residual = std::sqrt(ss / sw);
  return f;
}

}  // namespace detail

/// Least squares of log(value) against log(s): value = b·s^c.
inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> x, y;
  for (const auto& [s, v] : points) {
    if (!(s > 0) || !(v > 0) || !std::isfinite(s) || !std::isfinite(v)) {
      throw FitError("fit_power_law: sizes and values must be positive and finite");
    }
    x.push_back(std::log(s));
    y.push_back(std::log(v));
  }
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 2) {
    throw FitError("fit_power_law: need at least two distinct sizes");
  }
  const auto line = detail::weighted_line(x, y, std::vector<double>(x.size(), 1.0));
  return {std::exp(line.intercept), line.slope, line.residual};
}

struct ScalingPoint {
  double p = 0.0;
  double p_l = 0.0;
  double weight = 1.0;
};

struct ErrorScalingFit {
  double alpha = 0.0;
  double p_th = 0.0;
  std::size_t points_used = 0;
  double residual = 0.0;
  bool low_confidence = false;  // no point lies below the fitted threshold
};

/// Weighted fit of log p_L = α·log p − α·log p_th.
inline ErrorScalingFit fit_error_scaling(const std::vector<ScalingPoint>& points) {
  if (points.size() < 2) throw FitError("fit_error_scaling: need at least two points");
  std::vector<double> x, y, w;
  for (const auto& pt : points) {
    if (!(pt.p > 0) || !(pt.p_l > 0) || !(pt.weight > 0) || !std::isfinite(pt.weight)) {
      throw FitError("fit_error_scaling: p, p_L and weight must be positive");
    }
    x.push_back(std::log(pt.p));
    y.push_back(std::log(pt.p_l));
    w.push_back(pt.weight);
  }
  const auto line = detail::weighted_line(x, y, w);
  if (!(line.slope > 0)) throw FitError("fit_error_scaling: logical rate does not grow with p");
  ErrorScalingFit f;
  f.alpha = line.slope;
  f.p_th = std::exp(-line.intercept / line.slope);
  f.points_used = points.size();
  f.residual = line.residual;
  f.low_confidence = std::none_of(points.begin(), points.end(), [&](const auto& pt) { return pt.p < f.p_th; });
  return f;
}

/// Observed logical error rate at one physical error rate.
struct RatePoint {
  double p = 0.0;
  double rate = 0.0;            // fitted quantity (per-qubit mean rate)
  std::uint64_t failures = 0;   // failure events behind the estimate
  std::uint64_t trials = 0;
};

struct WindowedFit {
  ErrorScalingFit fit;
  ErrorScalingFit crude;
  double window_p_max = 0.0;
  std::size_t min_failures = 0;
  bool fell_back = false;  // window held fewer than two points; crude fit returned
};

/// Two passes: an unweighted fit over every nonzero point, then an
/// inverse-variance refit restricted to p ≤ p_th/2 with enough failures.
inline WindowedFit fit_error_scaling_windowed(const std::vector<RatePoint>& points, std::size_t min_failures = 100) {
  std::vector<ScalingPoint> all;
  for (const auto& pt : points) {
    if (pt.rate > 0) all.push_back({pt.p, pt.rate, 1.0});
  }
  WindowedFit out;
  out.min_failures = min_failures;
  out.crude = fit_error_scaling(all);
  out.window_p_max = out.crude.p_th / 2.0;

  std::vector<ScalingPoint> window;
  for (const auto& pt : points) {
    if (pt.rate <= 0 || pt.p > out.window_p_max || pt.failures < min_failures || pt.trials == 0) continue;
    // var(log q̂) ≈ (1 − q)/(n·q) = (1 − q)/failures
    const double q = static_cast<double>(pt.failures) / static_cast<double>(pt.trials);
    const double var = std::max(1.0 - q, 1e-12) / static_cast<double>(pt.failures);
    window.push_back({pt.p, pt.rate, 1.0 / var});
  }
  std::sort(window.begin(), window.end(), [](const auto& a, const auto& b) { return a.p < b.p; });
  const bool distinct = window.size() >= 2 && window.front().p < window.back().p;
  if (distinct) {
    out.fit = fit_error_scaling(window);
  } else {
    out.fit = out.crude;
    out.fit.low_confidence = true;
    out.fell_back = true;
  }
  return out;
}

/// Crossing of p_L = p, interpolated linearly in log-log space between the
/// first pair of neighbouring grid points that bracket it.
inline std::optional<double> pseudo_threshold(std::vector<std::pair<double, double>> curve) {
  std::sort(curve.begin(), curve.end());
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const auto [p0, r0] = curve[i];
    const auto [p1, r1] = curve[i + 1];
    if (!(p0 > 0 && r0 > 0 && r1 > 0)) continue;
    const double g0 = std::log(r0) - std::log(p0);
    const double g1 = std::log(r1) - std::log(p1);
    if (g0 == 0) return p0;
    if ((g0 < 0) != (g1 < 0) || g1 == 0) {
      const double t = g0 / (g0 - g1);
      return std::exp(std::log(p0) + t * (std::log(p1) - std::log(p0)));
    }
  }
  return std::nullopt;
}

inline double s_approx(double d, double b, double c) {
  if (!(d >= 1) || !(b > 0) || !(c > 0)) throw std::invalid_argument("s_approx: need d >= 1, b > 0, c > 0");
  return std::pow((d + 1.0) / (2.0 * b), 1.0 / c);
}

/// Size at which soft-decoded concatenation matches a distance-d surface code.
inline double s_rs(double p, double d, double b, double c, double pth_c, double pth_s) {
  if (!(d >= 1) || !(b > 0) || !(c > 0)) throw std::invalid_argument("s_rs: need d >= 1, b > 0, c > 0");
  if (!(pth_c > 0 && pth_c < 1 && pth_s > 0 && pth_s < 1)) throw std::invalid_argument("s_rs: thresholds out of (0, 1)");
  if (!(p > 0) || p >= std::min(pth_c, pth_s)) {
    throw std::domain_error("s_rs: p must lie strictly between 0 and both thresholds");
  }
  const double ratio = std::log(p / pth_s) / std::log(p / pth_c);
  return std::pow((d + 1.0) / (2.0 * b) * ratio, 1.0 / c);
}

struct CrossoverResult {
  double s_rs = 0.0;
  long s_min = 0;
  long d_min = 0;
  DecodeMode mode = DecodeMode::soft;
  long L1 = 5;
};

/// Soft-mode crossover for a lower layer of distance L1 (surface comparison distance 5·L1).
inline CrossoverResult crossover_size(double p, double d, const FitConstants& k = {}, long L1 = 5) {
  CrossoverResult r;
  r.s_rs = s_rs(p, d, k.b, k.c, k.pth_c, k.pth_s);
  r.s_min = static_cast<long>(std::ceil(r.s_rs - 1e-12));
  r.d_min = 5 * L1;
  r.mode = DecodeMode::soft;
  r.L1 = L1;
  return r;
}

inline long hard_decision_alpha(long d1, long d2) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("hard_decision_alpha: distances must be >= 1");
  return ((d1 + 1) / 2) * ((d2 + 1) / 2);
}

/// Exact lower bound 2(5L1+1)/(L1+1) on the upper distance in hard mode.
inline double hard_distance_bound(long L1) {
  return 2.0 * (5.0 * static_cast<double>(L1) + 1.0) / (static_cast<double>(L1) + 1.0);
}

/// Smallest even upper distance meeting the hard-mode bound.
inline long hard_distance_threshold(long L1) {
  if (L1 < 1 || L1 % 2 == 0) throw std::invalid_argument("hard_distance_threshold: L1 must be a positive odd integer");
  // Exact integer ceiling of 2(5L1+1)/(L1+1), then round up to even.
  long t = (2 * (5 * L1 + 1) + L1) / (L1 + 1);
  return t + (t % 2);
}

/// Distances d_s indexed by s.
using DistanceTable = std::map<long, long>;

/// Smallest s such that every tabulated s' ≥ s reaches d_threshold.
inline std::optional<long> size_from_distance_table(const DistanceTable& table, long d_threshold) {
  std::optional<long> best;
  for (auto it = table.rbegin(); it != table.rend(); ++it) {
    if (it->second < d_threshold) break;
    best = it->first;
  }
  return best;
}

/// Smallest integer s with b_h·s^c_h ≥ d_threshold.
inline long size_from_distance_fit(const FitConstants& k, long d_threshold) {
  return static_cast<long>(std::ceil(std::pow(static_cast<double>(d_threshold) / k.b_h, 1.0 / k.c_h) - 1e-12));
}

struct OutperformanceReport {
  DecodeMode mode = DecodeMode::soft;
  long L1 = 5;
  long d_min = 0;                 // surface distance the concatenation must match
  std::optional<long> d_s_min;    // hard mode only
  std::optional<long> s_min;
  std::optional<double> s_rs;     // soft mode only
  std::string s_source;           // "crossover", "distance table" or "distance fit"
};

/// Size conditions under which concatenation beats a distance-5·L1 surface
/// code. Hard mode reads s from `distances` when given, else from the d_s fit.
inline OutperformanceReport outperformance_conditions(DecodeMode mode, long L1, const FitConstants& k = {},
                                                      double p = 1e-2, const DistanceTable* distances = nullptr) {
  if (L1 < 1 || L1 % 2 == 0) throw std::invalid_argument("outperformance_conditions: L1 must be a positive odd integer");
  OutperformanceReport r;
  r.mode = mode;
  r.L1 = L1;
  r.d_min = 5 * L1;
  if (mode == DecodeMode::soft) {
    const auto c = crossover_size(p, static_cast<double>(r.d_min), k, L1);
    r.s_rs = c.s_rs;
    r.s_min = c.s_min;
    r.s_source = "crossover";
    return r;
  }
  r.d_s_min = hard_distance_threshold(L1);
  if (distances != nullptr) {
    r.s_min = size_from_distance_table(*distances, *r.d_s_min);
    r.s_source = "distance table";
  } else {
    r.s_min = size_from_distance_fit(k, *r.d_s_min);
    r.s_source = "distance fit";
  }
  return r;
}

}  // namespace qhier
