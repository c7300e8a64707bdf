#pragma once

#include <Eigen/Dense>

namespace swcons {

/// exp(A) by scaling and squaring with a diagonal Padé approximant of degree
/// 3, 5, 7, 9 or 13 chosen from the 1-norm of A (Higham 2005 thresholds).
/// Throws Numerical on non-finite input.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

/// Matrix 1-norm (max column sum of absolute values).
inline double norm1(const Eigen::MatrixXd& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace swcons
