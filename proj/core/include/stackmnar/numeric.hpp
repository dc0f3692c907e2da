// Numerical helpers shared across modules: stable exponential-weight
// normalization, logistic/probit link functions.
#ifndef STACKMNAR_NUMERIC_HPP
#define STACKMNAR_NUMERIC_HPP

#include <Eigen/Dense>
#include <cmath>

namespace stackmnar {

// log(1 + exp(x)) without overflow for large x.
inline double log1pexp(double x) {
  if (x > 33.0) return x;  // exp(-x) below double epsilon
  if (x > -37.0) return std::log1p(std::exp(x));
  return std::exp(x);
}

inline double expit(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double norm_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Standard normal CDF via erfc; accurate in both tails.
inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

inline double logsumexp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

// Weights proportional to exp(exponents[k]), rescaled to sum to 1.
// Max-subtraction keeps the largest exponent at 0, so the sum is in
// [1, K] and never overflows. All-zero exponents give exactly 1/K.
inline Eigen::VectorXd normalized_exp(const Eigen::VectorXd& exponents) {
  const double m = exponents.maxCoeff();
  Eigen::VectorXd w(exponents.size());
  double total = 0.0;
  for (Eigen::Index k = 0; k < exponents.size(); ++k) {
    w[k] = std::exp(exponents[k] - m);
    total += w[k];
  }
  w /= total;
  return w;
}

}  // namespace stackmnar

#endif
