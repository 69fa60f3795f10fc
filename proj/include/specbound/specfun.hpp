#ifndef SPECBOUND_SPECFUN_HPP
#define SPECBOUND_SPECFUN_HPP

// Bessel functions of the first kind (integer order, real argument), their
// positive zeros, and Gauss-Legendre rules.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

namespace specbound {

namespace detail {

template <typename Scalar>
Scalar bessel_j_series(int n, Scalar x) {
  using std::exp;
  using std::log;
  using std::lgamma;
  const Scalar half = x / Scalar(2);
  const Scalar q = half * half;
  Scalar term = exp(Scalar(n) * log(half) - lgamma(Scalar(n) + Scalar(1)));
  Scalar sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= -q / (Scalar(k) * Scalar(n + k));
    sum += term;
    if (std::abs(term) <= std::numeric_limits<Scalar>::epsilon() * std::abs(sum) * Scalar(0.01))
      break;
  }
  return sum;
}

// Start index for Miller's backward recurrence; J_start(x) is negligible
// against every J_k(x), k <= max(n, x).
inline int miller_start(int n, double x) {
  const double m = std::max(static_cast<double>(n), x);
  const int start = static_cast<int>(m + 30.0 + std::sqrt(60.0 * m));
  return start + (start % 2);
}

inline bool use_series(int n, double x) { return x <= 8.0 || x * x < 4.0 * (n + 1); }

}  // namespace detail

/// J_0(x) ... J_nmax(x) in one Miller sweep. x must be > 0.
template <typename Scalar>
std::vector<Scalar> bessel_j_sequence(int nmax, Scalar x) {
  std::vector<Scalar> out(static_cast<std::size_t>(nmax) + 1, Scalar(0));
  if (x == Scalar(0)) {
    out[0] = Scalar(1);
    return out;
  }
  const int start = detail::miller_start(nmax, static_cast<double>(x));
  const Scalar big(1e250);
  Scalar next(0);    // J_{k+1}
  Scalar cur(1e-30); // J_k
  Scalar norm(0);
  for (int k = start; k > 0; --k) {
    const Scalar prev = Scalar(2 * k) / x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (k - 1 <= nmax) out[static_cast<std::size_t>(k - 1)] = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += Scalar(2) * cur;
    if (std::abs(cur) > big) {
      cur /= big;
      next /= big;
      norm /= big;
      for (int j = k - 1; j <= nmax; ++j) out[static_cast<std::size_t>(j)] /= big;
    }
  }
  norm += cur;  // J_0
  for (auto& v : out) v /= norm;
  return out;
}

/// J_n(x) for n >= 0, x >= 0. Ascending series where it converges without
/// cancellation, Miller's normalized backward recurrence elsewhere.
template <typename Scalar>
Scalar bessel_j(int n, Scalar x) {
  if (x == Scalar(0)) return n == 0 ? Scalar(1) : Scalar(0);
  if (detail::use_series(n, static_cast<double>(x))) return detail::bessel_j_series(n, x);
  return bessel_j_sequence(n, x)[static_cast<std::size_t>(n)];
}

/// J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2, with J_{-1} = -J_1.
template <typename Scalar>
Scalar bessel_j_deriv(int n, Scalar x) {
  if (n == 0) return -bessel_j(1, x);
  return (bessel_j(n - 1, x) - bessel_j(n + 1, x)) / Scalar(2);
}

/// k-th positive zero (k >= 1) of J_n. Backed by a process-wide table.
double bessel_zero(int n, int k);

/// All positive zeros of J_n below `bound`, ascending.
std::vector<double> bessel_zeros_below(int n, double bound);

template <typename Scalar>
struct QuadratureRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
  int order = 0;

  /// Nodes and weights mapped affinely from [-1, 1] onto [a, b].
  QuadratureRule mapped(Scalar a, Scalar b) const {
    QuadratureRule out;
    const Scalar mid = (a + b) / Scalar(2);
    const Scalar half = (b - a) / Scalar(2);
    out.nodes = (nodes.array() * half + mid).matrix();
    out.weights = weights * half;
    out.order = order;
    return out;
  }
};

/// m-point Gauss-Legendre rule on [-1, 1], nodes ascending.
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_legendre(int m) {
  QuadratureRule<Scalar> rule;
  rule.order = m;
  rule.nodes.setZero(m);
  rule.weights.setZero(m);
  if (m == 1) {
    rule.weights[0] = Scalar(2);
    return rule;
  }
  // P_m(z) and P_m'(z) by the three-term recurrence
  const auto legendre = [m](Scalar z, Scalar& deriv) {
    Scalar p0(1), p1 = z;
    for (int j = 2; j <= m; ++j) {
      const Scalar p2 = (Scalar(2 * j - 1) * z * p1 - Scalar(j - 1) * p0) / Scalar(j);
      p0 = p1;
      p1 = p2;
    }
    deriv = Scalar(m) * (z * p1 - p0) / (z * z - Scalar(1));
    return p1;
  };
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < m / 2; ++i) {
    Scalar z = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(m) + Scalar(0.5)));
    Scalar dp(0);
    for (int it = 0; it < 100; ++it) {
      const Scalar dz = legendre(z, dp) / dp;
      z -= dz;
      if (std::abs(dz) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    legendre(z, dp);
    const Scalar w = Scalar(2) / ((Scalar(1) - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[m - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) {
    Scalar dp(0);
    legendre(Scalar(0), dp);
    rule.weights[m / 2] = Scalar(2) / (dp * dp);
  }
  return rule;
}

}  // namespace specbound

#endif  // SPECBOUND_SPECFUN_HPP
