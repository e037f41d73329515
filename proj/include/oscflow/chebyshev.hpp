#pragma once

#include <Eigen/Dense>

#include "oscflow/fourier.hpp"

namespace oscflow::cheb {

// Chebyshev-Gauss-Lobatto points x_j = cos(pi j / N), j = 0..N, so x_0 = 1 and
// x_N = -1.
Eigen::VectorXd nodes(int order);

// Collocation differentiation matrix on nodes(order).
Eigen::MatrixXd diff_matrix(int order);

// Clenshaw-Curtis weights: sum_j w_j f(x_j) integrates the interpolant over [-1, 1].
Eigen::VectorXd clenshaw_curtis_weights(int order);

// Nodal values -> coefficients a_m of sum_m a_m T_m(x).
Eigen::MatrixXcd coefficients(const Eigen::MatrixXcd& nodal);

// Coefficients of the derivative series.
Eigen::MatrixXcd derivative_coefficients(const Eigen::MatrixXcd& coeffs);

// Coefficients of the antiderivative vanishing at x = -1 (one degree higher).
Eigen::MatrixXcd integral_coefficients(const Eigen::MatrixXcd& coeffs);

// Evaluates every column of a coefficient matrix at x.
Eigen::VectorXcd clenshaw(const Eigen::MatrixXcd& coeffs, double x);

}  // namespace oscflow::cheb
