#pragma once

// Independent reference computations used by the tests. None of these call
// into the library paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Direct-form I difference equation, history primed with the steady state
/// of a constant input equal to x[0].
inline std::vector<double> df1_pass(const std::vector<double>& b, const std::vector<double>& a,
                                    const std::vector<double>& x) {
  double sb = 0.0, sa = 0.0;
  for (double v : b) sb += v;
  for (double v : a) sa += v;
  const double y0 = x.front() * sb / sa;
  std::vector<double> y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double xv = n >= k ? x[n - k] : x.front();
      acc += b[k] * xv;
    }
    for (std::size_t k = 1; k < a.size(); ++k) {
      const double yv = n >= k ? y[n - k] : y0;
      acc -= a[k] * yv;
    }
    y[n] = acc / a[0];
  }
  return y;
}

/// Odd extension + forward pass + reversed pass, written out longhand.
inline std::vector<double> naive_filtfilt(const std::vector<double>& b,
                                          const std::vector<double>& a,
                                          const std::vector<double>& x) {
  const std::size_t nfilt = std::max(a.size(), b.size());
  const std::size_t pad = 3 * (nfilt - 1);
  const std::size_t n = x.size();
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
  for (std::size_t i = 0; i < n; ++i) ext[pad + i] = x[i];
  for (std::size_t i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  auto fwd = df1_pass(b, a, ext);
  std::vector<double> rev(fwd.rbegin(), fwd.rend());
  auto back = df1_pass(b, a, rev);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = back[back.size() - 1 - (pad + i)];
  return out;
}

/// Direct O(N^2) DFT periodogram summed over nonzero frequencies, two-sided,
/// normalized by N^2 so that the full sum equals the mean square.
inline double dft_nonzero_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double total = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) /
                         static_cast<double>(n);
      re += x[t] * std::cos(ang);
      im += x[t] * std::sin(ang);
    }
    total += (re * re + im * im);
  }
  return total / (static_cast<double>(n) * static_cast<double>(n));
}

/// Amplitude of the component at normalized frequency f (cycles/sample) by
/// least-squares projection over samples [lo, hi).
inline double sinusoid_amplitude(const std::vector<double>& y, double f, std::size_t lo,
                                 std::size_t hi) {
  double sc = 0.0, ss = 0.0, cc = 0.0, s2 = 0.0, cs = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double c = std::cos(2.0 * std::numbers::pi * f * static_cast<double>(i));
    const double s = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i));
    sc += y[i] * c;
    ss += y[i] * s;
    cc += c * c;
    s2 += s * s;
    cs += c * s;
  }
  const double det = cc * s2 - cs * cs;
  const double ac = (sc * s2 - ss * cs) / det;
  const double as = (ss * cc - sc * cs) / det;
  return std::hypot(ac, as);
}

/// Lag in [-max_lag, max_lag] maximizing sum x[i] y[i + lag].
inline int best_lag(const std::vector<double>& x, const std::vector<double>& y, int max_lag) {
  int best = 0;
  double best_val = -1e300;
  const int n = static_cast<int>(x.size());
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const int j = i + lag;
      if (j >= 0 && j < n) acc += x[i] * y[j];
    }
    if (acc > best_val) {
      best_val = acc;
      best = lag;
    }
  }
  return best;
}

/// Pearson correlation via the textbook two-pass formula.
inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx += (x[i] - mx) * (x[i] - mx);
    dy += (y[i] - my) * (y[i] - my);
  }
  if (dx == 0 || dy == 0) return 0.0;
  return num / std::sqrt(dx * dy);
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, sigma);
  std::vector<double> v(n);
  for (auto& e : v) e = d(rng);
  return v;
}

}  // namespace oracle
