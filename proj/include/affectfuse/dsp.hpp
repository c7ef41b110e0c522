#pragma once

// Preprocessing chain: Butterworth low-pass design, zero-phase (forward-backward)
// filtering, envelope-mean smoothing and min-max scaling.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "affectfuse/core.hpp"
#include "affectfuse/error.hpp"
#include "affectfuse/log.hpp"

namespace affectfuse::dsp {

/// Transfer function b(z)/a(z) with a[0] == 1.
struct FilterCoefficients {
  std::vector<double> b;
  std::vector<double> a;

  double dc_gain() const {
    double sb = 0.0, sa = 0.0;
    for (double v : b) sb += v;
    for (double v : a) sa += v;
    return sb / sa;
  }
};

struct FilterDesign {
  FilterCoefficients coeffs;
  double requested_cutoff_hz = 0.0;
  double effective_cutoff_hz = 0.0;
  bool clamped = false;  ///< requested cutoff was at or above Nyquist
};

namespace detail {

// Expand prod (z - r_k) into real polynomial coefficients, highest power first.
inline std::vector<double> poly_from_roots(std::span<const std::complex<double>> roots) {
  std::vector<std::complex<double>> p{1.0};
  for (const auto& r : roots) {
    p.push_back(0.0);
    for (std::size_t k = p.size() - 1; k > 0; --k) p[k] -= r * p[k - 1];
  }
  std::vector<double> out(p.size());
  std::transform(p.begin(), p.end(), out.begin(), [](auto c) { return c.real(); });
  return out;
}

}  // namespace detail

/// Digital Butterworth low-pass from the analog prototype via the bilinear
/// transform with pre-warping. A cutoff at or above Nyquist is clamped to
/// 0.95 * Nyquist and flagged in the result.
inline FilterDesign design_lowpass_butterworth(int order, double cutoff_hz, double fs_hz) {
  if (order < 1) throw ParameterError("filter order must be >= 1");
  if (!(std::isfinite(cutoff_hz) && cutoff_hz > 0.0)) {
    throw ParameterError("cutoff must be positive and finite");
  }
  if (!(std::isfinite(fs_hz) && fs_hz > 0.0)) {
    throw ParameterError("sampling rate must be positive and finite");
  }

  FilterDesign design;
  design.requested_cutoff_hz = cutoff_hz;
  design.effective_cutoff_hz = cutoff_hz;
  const double nyquist = 0.5 * fs_hz;
  if (cutoff_hz >= nyquist) {
    design.effective_cutoff_hz = 0.95 * nyquist;
    design.clamped = true;
  }

  // Pre-warped analog cutoff for s = (z - 1) / (z + 1).
  const double warped = std::tan(std::numbers::pi * design.effective_cutoff_hz / fs_hz);

  std::vector<std::complex<double>> poles, zeros;
  for (int k = 1; k <= order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order - 1) / (2.0 * order);
    const std::complex<double> s = warped * std::polar(1.0, theta);
    poles.push_back((1.0 + s) / (1.0 - s));
    zeros.emplace_back(-1.0, 0.0);
  }

  FilterCoefficients& c = design.coeffs;
  c.a = detail::poly_from_roots(poles);
  c.b = detail::poly_from_roots(zeros);
  double sb = 0.0, sa = 0.0;
  for (double v : c.b) sb += v;
  for (double v : c.a) sa += v;
  const double gain = sa / sb;
  for (double& v : c.b) v *= gain;
  // Round-off can leave tiny imaginary-derived residue; pin exact zeros.
  for (double& v : c.a) if (std::abs(v) < 1e-15) v = 0.0;
  return design;
}

/// Steady-state initial state of the transposed direct-form II filter for a
/// unit step input (scale by the first sample).
inline std::vector<double> steady_state_state(const FilterCoefficients& c) {
  const std::size_t n = std::max(c.a.size(), c.b.size());
  std::vector<double> a(c.a), b(c.b);
  a.resize(n, 0.0);
  b.resize(n, 0.0);
  const double g = c.dc_gain();
  std::vector<double> z(n - 1, 0.0);
  double acc = 0.0;
  for (std::size_t m = n - 1; m >= 1; --m) {
    acc += b[m] - a[m] * g;
    z[m - 1] = acc;
  }
  return z;
}

/// Single causal pass (transposed direct-form II) with initial state `state`.
inline std::vector<double> filter_pass(const FilterCoefficients& c, std::span<const double> x,
                                       std::vector<double> state) {
  const std::size_t n = std::max(c.a.size(), c.b.size());
  std::vector<double> a(c.a), b(c.b);
  a.resize(n, 0.0);
  b.resize(n, 0.0);
  state.resize(n - 1, 0.0);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = b[0] * xi + (n > 1 ? state[0] : 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double next = (k + 2 < n) ? state[k + 1] : 0.0;
      state[k] = b[k + 1] * xi - a[k + 1] * yi + next;
    }
    y[i] = yi;
  }
  return y;
}

/// Zero-phase filtering: odd-extend each edge by 3*(n-1) samples, filter
/// forward, reverse, filter again, reverse, trim. Effective response |H|^2.
inline std::vector<double> zero_phase_filter(const FilterCoefficients& c,
                                             std::span<const double> x) {
  const std::size_t n = std::max(c.a.size(), c.b.size());
  if (c.a.empty() || c.b.empty() || c.a[0] != 1.0) {
    throw ParameterError("filter coefficients must have a[0] == 1");
  }
  if (x.size() <= 3 * n) {
    throw LengthError("zero_phase_filter: input length " + std::to_string(x.size()) +
                      " must exceed " + std::to_string(3 * n));
  }
  const std::size_t pad = 3 * (n - 1);
  const std::size_t len = x.size();

  std::vector<double> ext;
  ext.reserve(len + 2 * pad);
  for (std::size_t k = pad; k >= 1; --k) ext.push_back(2.0 * x[0] - x[k]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t k = 1; k <= pad; ++k) ext.push_back(2.0 * x[len - 1] - x[len - 1 - k]);

  const auto zi = steady_state_state(c);
  auto scaled = [&zi](double v) {
    std::vector<double> s(zi);
    for (double& e : s) e *= v;
    return s;
  };

  auto y = filter_pass(c, ext, scaled(ext.front()));
  std::reverse(y.begin(), y.end());
  y = filter_pass(c, y, scaled(y.front()));
  std::reverse(y.begin(), y.end());
  return {y.begin() + static_cast<std::ptrdiff_t>(pad),
          y.begin() + static_cast<std::ptrdiff_t>(pad + len)};
}

/// Indices of local maxima (or minima when `minima` is set). A plateau that is
/// strictly above (below) both neighbours contributes its first sample.
inline std::vector<std::size_t> local_extrema(std::span<const double> x, bool minima = false) {
  std::vector<std::size_t> idx;
  if (x.size() < 3) return idx;
  auto above = [minima](double p, double q) { return minima ? p < q : p > q; };
  std::size_t i = 1;
  while (i + 1 < x.size()) {
    if (above(x[i], x[i - 1])) {
      std::size_t j = i;
      while (j + 1 < x.size() && x[j + 1] == x[i]) ++j;
      if (j + 1 < x.size() && above(x[i], x[j + 1])) idx.push_back(i);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return idx;
}

namespace detail {

// Piecewise-linear curve through (0, x0), the given knots, and (n-1, x_last).
inline std::vector<double> linear_envelope(std::span<const double> x,
                                           const std::vector<std::size_t>& knots) {
  std::vector<std::size_t> k;
  k.reserve(knots.size() + 2);
  k.push_back(0);
  for (auto i : knots) if (i != 0 && i != x.size() - 1) k.push_back(i);
  k.push_back(x.size() - 1);

  std::vector<double> env(x.size());
  for (std::size_t s = 0; s + 1 < k.size(); ++s) {
    const std::size_t lo = k[s], hi = k[s + 1];
    const double ylo = x[lo], yhi = x[hi];
    const double span = static_cast<double>(hi - lo);
    for (std::size_t i = lo; i <= hi; ++i) {
      const double t = static_cast<double>(i - lo) / span;
      env[i] = ylo + (yhi - ylo) * t;
    }
  }
  return env;
}

}  // namespace detail

/// Mean of the upper and lower linear envelopes (knots at local maxima/minima,
/// endpoints anchored). Returns x unchanged when there are no interior extrema.
inline std::vector<double> envelope_mean(std::span<const double> x) {
  if (x.size() < 3) throw LengthError("envelope_mean: need at least 3 samples");
  const auto maxima = local_extrema(x, false);
  const auto minima = local_extrema(x, true);
  if (maxima.empty() && minima.empty()) return {x.begin(), x.end()};
  const auto upper = detail::linear_envelope(x, maxima);
  const auto lower = detail::linear_envelope(x, minima);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.5 * (upper[i] + lower[i]);
  return out;
}

/// (x - min) / (max - min); a constant input maps to all zeros.
inline std::vector<double> minmax_scale(std::span<const double> x) {
  if (x.empty()) throw LengthError("minmax_scale: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;
  std::vector<double> out(x.size(), 0.0);
  if (range > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - lo) / range;
  }
  return out;
}

struct CutoffConfig {
  double emg_hz = 10.0;
  double bvp_hz = 19.0;
  double gsr_hz = 19.0;
  int order = 1;

  double for_channel(ChannelKind c) const {
    switch (c) {
      case ChannelKind::emg: return emg_hz;
      case ChannelKind::bvp: return bvp_hz;
      case ChannelKind::gsr: return gsr_hz;
    }
    return emg_hz;
  }
};

/// Per-channel filter designs for one sampling rate. EMG and GSR are
/// envelope-smoothed; BVP is not.
struct PreprocessPlan {
  std::array<FilterDesign, kChannelCount> designs;

  static constexpr bool smoothed(ChannelKind c) { return c != ChannelKind::bvp; }
};

/// Design the three channel filters. Each clamped cutoff emits one
/// `WARN nyquist-clamp ...` line.
inline PreprocessPlan make_plan(double fs_hz, const CutoffConfig& cutoffs = {}) {
  PreprocessPlan plan;
  for (ChannelKind c : kChannels) {
    auto& d = plan.designs[index_of(c)];
    d = design_lowpass_butterworth(cutoffs.order, cutoffs.for_channel(c), fs_hz);
    if (d.clamped) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "nyquist-clamp channel=%s requested=%g effective=%g",
                    std::string(name_of(c)).c_str(), d.requested_cutoff_hz,
                    d.effective_cutoff_hz);
      log::warn(buf);
    }
  }
  return plan;
}

inline std::vector<double> preprocess_channel(const PreprocessPlan& plan, ChannelKind c,
                                              std::span<const double> x) {
  auto y = zero_phase_filter(plan.designs[index_of(c)].coeffs, x);
  if (PreprocessPlan::smoothed(c)) y = envelope_mean(y);
  return minmax_scale(y);
}

/// Filter, optionally smooth, and scale each channel of one session.
/// Scaling is per session and per channel.
inline Session preprocess(const Session& s, const PreprocessPlan& plan) {
  Session::Channels out;
  for (ChannelKind c : kChannels) out[index_of(c)] = preprocess_channel(plan, c, s.channel(c));
  return s.with_channels(std::move(out));
}

inline Session preprocess(const Session& s) { return preprocess(s, make_plan(s.fs_hz())); }

}  // namespace affectfuse::dsp
