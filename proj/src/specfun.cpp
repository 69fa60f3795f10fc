#include "specbound/specfun.hpp"

#include "specbound/errors.hpp"

#include <mutex>
#include <shared_mutex>
#include <string>

namespace specbound {
namespace {

// Single root of J_n in (lo, hi) where J_n changes sign: bisection down to a
// short interval, then safeguarded Newton.
double polish_root(int n, double lo, double hi) {
  double flo = bessel_j(n, lo);
  double fhi = bessel_j(n, hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw NumericalError("bessel_zero: bracket without sign change for order " + std::to_string(n));
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    const double fm = bessel_j(n, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double f = bessel_j(n, x);
    const double df = bessel_j_deriv(n, x);
    double next = x - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if ((f > 0.0) == (flo > 0.0)) lo = x; else hi = x;
    const double step = std::abs(next - x);
    x = next;
    if (step <= 1e-15 * x) break;
  }
  return x;
}

// McMahon leading terms for the zeros of J_0; accurate to well under the
// bracket half-width used below for every k >= 1.
double mcmahon_j0(int k) {
  const double beta = (k - 0.25) * std::numbers::pi;
  return beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta * beta * beta);
}

class ZeroTable {
 public:
  double zero(int n, int k) {
    {
      std::shared_lock lock(mutex_);
      if (n < static_cast<int>(zeros_.size()) && k <= static_cast<int>(zeros_[n].size()))
        return zeros_[n][k - 1];
    }
    std::unique_lock lock(mutex_);
    ensure(n, k);
    return zeros_[n][k - 1];
  }

 private:
  // Interlacing j_{m-1,k} < j_{m,k} < j_{m-1,k+1} brackets every zero of
  // J_m by consecutive zeros of J_{m-1}; order 0 is bracketed by McMahon.
  void ensure(int n, int k) {
    if (static_cast<int>(zeros_.size()) <= n) zeros_.resize(n + 1);
    for (int m = 0; m <= n; ++m) {
      const int needed = k + (n - m);
      auto& row = zeros_[m];
      for (int idx = static_cast<int>(row.size()) + 1; idx <= needed; ++idx) {
        double lo, hi;
        if (m == 0) {
          const double guess = mcmahon_j0(idx);
          lo = guess - 0.5;
          hi = guess + 0.5;
        } else {
          lo = zeros_[m - 1][idx - 1];
          hi = zeros_[m - 1][idx];
        }
        row.push_back(polish_root(m, lo, hi));
      }
    }
  }

  std::shared_mutex mutex_;
  std::vector<std::vector<double>> zeros_;
};

ZeroTable& table() {
  static ZeroTable t;
  return t;
}

}  // namespace

double bessel_zero(int n, int k) {
  if (n < 0 || k < 1)
    throw DomainError("bessel_zero: need n >= 0 and k >= 1");
  return table().zero(n, k);
}

std::vector<double> bessel_zeros_below(int n, double bound) {
  std::vector<double> out;
  // j_{n,1} > n, so nothing to do when the bound is below the order.
  if (bound <= static_cast<double>(n)) return out;
  for (int k = 1;; ++k) {
    const double z = bessel_zero(n, k);
    if (z >= bound) break;
    out.push_back(z);
  }
  return out;
}

}  // namespace specbound
