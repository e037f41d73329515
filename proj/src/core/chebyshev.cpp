#include "oscflow/chebyshev.hpp"

#include <cmath>

#include "oscflow/error.hpp"

namespace oscflow::cheb {

Eigen::VectorXd nodes(int order) {
  if (order < 1) fail(ErrorCode::InvalidArgument, "chebyshev: order must be >= 1");
  Eigen::VectorXd x(order + 1);
  // sin form keeps the nodes exactly antisymmetric
  for (int j = 0; j <= order; ++j) x(j) = std::sin(M_PI * (order - 2.0 * j) / (2.0 * order));
  return x;
}

Eigen::MatrixXd diff_matrix(int order) {
  const int n = order;
  const Eigen::VectorXd x = nodes(n);
  Eigen::MatrixXd d(n + 1, n + 1);
  auto c = [n](int j) { return (j == 0 || j == n ? 2.0 : 1.0) * (j % 2 == 0 ? 1.0 : -1.0); };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      if (i == j) {
        d(i, j) = 0.0;
        continue;
      }
      // x_i - x_j via the trigonometric identity avoids cancellation
      const double diff = 2.0 * std::sin(M_PI * (i + j) / (2.0 * n)) *
                          std::sin(M_PI * (j - i) / (2.0 * n));
      d(i, j) = c(i) / c(j) / diff;
    }
  // negative-sum trick for the diagonal
  for (int i = 0; i <= n; ++i) d(i, i) = -(d.row(i).sum());
  return d;
}

Eigen::VectorXd clenshaw_curtis_weights(int order) {
  const int n = order;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double theta = M_PI * j / n;
    double s = 0.0;
    for (int m = 0; m <= n / 2; ++m) {
      const double b = (m == 0 || 2 * m == n) ? 1.0 : 2.0;
      s += b / (1.0 - 4.0 * m * m) * std::cos(2.0 * m * theta);
    }
    const double c = (j == 0 || j == n) ? 1.0 : 2.0;
    w(j) = c / n * s;
  }
  return w;
}

Eigen::MatrixXcd coefficients(const Eigen::MatrixXcd& nodal) {
  const int n = static_cast<int>(nodal.rows()) - 1;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n + 1, nodal.cols());
  for (int m = 0; m <= n; ++m) {
    for (int j = 0; j <= n; ++j) {
      const double cj = (j == 0 || j == n) ? 0.5 : 1.0;
      a.row(m) += cj * std::cos(M_PI * m * j / n) * nodal.row(j);
    }
    a.row(m) *= ((m == 0 || m == n) ? 1.0 : 2.0) / n;
  }
  return a;
}

Eigen::MatrixXcd derivative_coefficients(const Eigen::MatrixXcd& coeffs) {
  const int n = static_cast<int>(coeffs.rows()) - 1;
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n + 1, coeffs.cols());
  if (n == 0) return d;
  d.row(n - 1) = 2.0 * n * coeffs.row(n);
  for (int m = n - 2; m >= 0; --m) {
    d.row(m) = 2.0 * (m + 1) * coeffs.row(m + 1);
    if (m + 2 <= n) d.row(m) += d.row(m + 2);
  }
  d.row(0) *= 0.5;
  return d;
}

Eigen::MatrixXcd integral_coefficients(const Eigen::MatrixXcd& coeffs) {
  const int n = static_cast<int>(coeffs.rows()) - 1;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n + 2, coeffs.cols());
  auto c = [&](int m) -> Eigen::RowVectorXcd {
    if (m > n) return Eigen::RowVectorXcd::Zero(coeffs.cols());
    return m == 0 ? Eigen::RowVectorXcd(2.0 * coeffs.row(0)) : Eigen::RowVectorXcd(coeffs.row(m));
  };
  for (int m = 1; m <= n + 1; ++m) a.row(m) = (c(m - 1) - c(m + 1)) / (2.0 * m);
  // fix the constant so the primitive vanishes at x = -1
  Eigen::RowVectorXcd at_minus_one = Eigen::RowVectorXcd::Zero(coeffs.cols());
  for (int m = 1; m <= n + 1; ++m) at_minus_one += (m % 2 == 0 ? 1.0 : -1.0) * a.row(m);
  a.row(0) = -at_minus_one;
  return a;
}

Eigen::VectorXcd clenshaw(const Eigen::MatrixXcd& coeffs, double x) {
  const int n = static_cast<int>(coeffs.rows()) - 1;
  Eigen::RowVectorXcd b1 = Eigen::RowVectorXcd::Zero(coeffs.cols());
  Eigen::RowVectorXcd b2 = b1;
  for (int m = n; m >= 1; --m) {
    Eigen::RowVectorXcd b0 = 2.0 * x * b1 - b2 + coeffs.row(m);
    b2 = b1;
    b1 = b0;
  }
  return (x * b1 - b2 + coeffs.row(0)).transpose();
}

}  // namespace oscflow::cheb
