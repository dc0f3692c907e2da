// Test-side oracles, independent of the library implementation paths they
// check: closed-form simple regression, Rubin's-rules pooling, a two-sample
// Kolmogorov-Smirnov statistic, and exhaustive enumeration of a binary
// (Z1, Z2, R) joint distribution.
#ifndef STACKMNAR_TESTS_ORACLES_HPP
#define STACKMNAR_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracles {

// Simple linear regression y = a + b x by the textbook moment formulas.
struct SimpleOls {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;
};

inline SimpleOls simple_ols(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) throw std::invalid_argument("simple_ols: bad input");
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  SimpleOls fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.rss += r * r;
  }
  return fit;
}

// Rubin's combining rules for per-imputation estimates and variances.
struct RubinPooled {
  Eigen::VectorXd theta;
  Eigen::VectorXd variance;  // per coordinate
};

inline RubinPooled rubin_pool(const std::vector<Eigen::VectorXd>& thetas,
                              const std::vector<Eigen::VectorXd>& variances) {
  const int m = static_cast<int>(thetas.size());
  const Eigen::Index q = thetas.front().size();
  RubinPooled out;
  out.theta = Eigen::VectorXd::Zero(q);
  for (const auto& t : thetas) out.theta += t;
  out.theta /= m;
  Eigen::VectorXd within = Eigen::VectorXd::Zero(q);
  for (const auto& v : variances) within += v;
  within /= m;
  Eigen::VectorXd between = Eigen::VectorXd::Zero(q);
  for (const auto& t : thetas) between += (t - out.theta).cwiseAbs2();
  between /= (m - 1);
  out.variance = within + (1.0 + 1.0 / m) * between;
  return out;
}

// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Critical value c(alpha) * sqrt((n1+n2)/(n1*n2)); c(0.01) = 1.628.
inline double ks_critical(double c_alpha, std::size_t n1, std::size_t n2) {
  return c_alpha * std::sqrt((static_cast<double>(n1) + static_cast<double>(n2)) /
                             (static_cast<double>(n1) * static_cast<double>(n2)));
}

inline double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Fully enumerated joint for binary Z1, binary Z2 and observation indicator
// R with P(R=1 | Z1, Z2) = expit(c0 + c1 Z1 + c2 Z2).
struct BinaryJoint {
  double p_z2;              // P(Z2 = 1)
  double p_z1_given_z2[2];  // P(Z1 = 1 | Z2 = z2)
  double c0, c1, c2;        // observation model coefficients

  double p_obs(double z1, double z2) const { return expit(c0 + c1 * z1 + c2 * z2); }

  // P(Z1 = z1, Z2 = z2, R = r)
  double cell(int z1, int z2, int r) const {
    const double pz2 = z2 == 1 ? p_z2 : 1.0 - p_z2;
    const double pz1 = z1 == 1 ? p_z1_given_z2[z2] : 1.0 - p_z1_given_z2[z2];
    const double pobs = p_obs(z1, z2);
    return pz2 * pz1 * (r == 1 ? pobs : 1.0 - pobs);
  }

  // f(Z1 = z1 | Z2 = z2, R = r)
  double z1_given_z2_r(int z1, int z2, int r) const {
    const double num = cell(z1, z2, r);
    const double den = cell(0, z2, r) + cell(1, z2, r);
    return num / den;
  }

  // E[Z1 | R = 0]
  double mean_z1_given_missing() const {
    double num = 0.0, den = 0.0;
    for (int z2 = 0; z2 < 2; ++z2) {
      for (int z1 = 0; z1 < 2; ++z1) {
        num += z1 * cell(z1, z2, 0);
        den += cell(z1, z2, 0);
      }
    }
    return num / den;
  }
};

}  // namespace oracles

#endif
