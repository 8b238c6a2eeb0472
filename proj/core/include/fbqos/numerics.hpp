#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fbqos/errors.hpp"

namespace fbqos {

inline double log_add_exp(double a, double b) {
  if (std::isinf(a) && a < 0.0) return b;
  if (std::isinf(b) && b < 0.0) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample (N-1) standard deviation
};

inline MeanStd mean_and_stddev(std::span<const double> v) {
  const auto n = static_cast<double>(v.size());
  if (v.empty()) throw std::invalid_argument("mean_and_stddev: empty input");
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (n - 1.0))};
}

struct LogMeanResult {
  double log_mean;   // log((1/N) sum exp(v_i))
  double std_error;  // delta-method stderr of the log-mean
};

// Max-shifted log-mean-exp. -inf entries are admitted (zero weight); +inf
// or NaN entries and an all--inf input are errors. The reduction is a
// fixed left-to-right pass so the result does not depend on how the input
// was produced.
inline LogMeanResult log_mean_exp(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("log_mean_exp: empty input");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) {
    if (std::isnan(x) || (std::isinf(x) && x > 0.0))
      throw NumericRangeError("log_mean_exp: sample exponent " + std::to_string(x) +
                              " is outside the stabilized range");
    m = std::max(m, x);
  }
  if (std::isinf(m))
    throw NumericRangeError("log_mean_exp: degenerate estimate, all samples are -inf");
  const auto n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - m);
  const double mean_w = sum / n;
  double ss = 0.0;
  for (double x : v) {
    const double d = std::exp(x - m) - mean_w;
    ss += d * d;
  }
  const double sd_w = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {m + std::log(mean_w), sd_w / (std::sqrt(n) * mean_w)};
}

struct ScalarMax {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section maximization on [lo, hi]; returns the best point among all
// evaluations including the endpoints, so a boundary optimum is returned
// exactly.
template <typename F>
ScalarMax golden_section_max(F&& f, double lo, double hi, double xtol,
                             int max_iter = 200) {
  if (!(lo <= hi)) throw std::invalid_argument("golden_section_max: empty interval");
  constexpr double kInvPhi = 0.61803398874989484820;
  ScalarMax best{lo, f(lo)};
  const double fhi = f(hi);
  if (fhi > best.value) best = {hi, fhi};
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  if (fc > best.value) best = {c, fc};
  if (fd > best.value) best = {d, fd};
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      if (fc > best.value) best = {c, fc};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      if (fd > best.value) best = {d, fd};
    }
  }
  return best;
}

// Bisection for a root of f on a bracketing interval [lo, hi]; f(lo) and
// f(hi) must have opposite signs (or be zero). Stops on |f| <= ftol or
// width <= xtol, capped at max_iter halvings; returns the evaluated point
// with smallest |f|.
template <typename F>
double bisect_root(F&& f, double lo, double hi, double flo, double fhi,
                   double xtol, double ftol = 0.0, int max_iter = 80) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect_root: interval does not bracket a root");
  double best_x = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double best_f = std::min(std::abs(flo), std::abs(fhi));
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) < best_f) {
      best_f = std::abs(fm);
      best_x = mid;
    }
    if (fm == 0.0 || std::abs(fm) <= ftol) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fm = f(mid);
  return std::abs(fm) <= best_f ? mid : best_x;
}

// Unimodality certificate: true when the sequence has no second peak of
// prominence above tol (rises of more than tol after a fall of more than
// tol from the running maximum fail it).
inline bool is_unimodal(std::span<const double> v, double tol) {
  if (v.size() < 3) return true;
  double peak = v[0];
  double valley = v[0];
  bool fell = false;
  for (double x : v) {
    if (!fell) {
      if (x >= peak) {
        peak = x;
      } else if (x < peak - tol) {
        fell = true;
        valley = x;
      }
    } else {
      valley = std::min(valley, x);
      if (x > valley + tol) return false;
    }
  }
  return true;
}

// digamma at positive integer arguments: psi(1) = -gamma_E, plus harmonic
// partial sums.
inline double digamma_int(int i) {
  if (i < 1) throw std::invalid_argument("digamma_int: argument must be >= 1");
  double v = -0.57721566490153286061;
  for (int k = 1; k < i; ++k) v += 1.0 / static_cast<double>(k);
  return v;
}

inline std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

inline std::vector<double> logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > 0.0))
    throw std::invalid_argument("logspace: endpoints must be positive");
  std::vector<double> out = linspace(std::log(lo), std::log(hi), count);
  for (double& x : out) x = std::exp(x);
  if (count >= 1) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

}  // namespace fbqos
