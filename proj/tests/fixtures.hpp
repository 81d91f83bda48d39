#pragma once

#include <vector>

#include "rsl/ctmc.hpp"

namespace rsl::fixtures {

inline MatrixXd q1() {
  MatrixXd q(5, 5);
  q << -0.6, 0.2, 0.2, 0.1, 0.1,
       0.1, -0.5, 0.2, 0.1, 0.1,
       0.1, 0.1, -0.5, 0.2, 0.1,
       0.1, 0.1, 0.2, -0.6, 0.2,
       0.1, 0.1, 0.2, 0.2, -0.6;
  return q;
}

inline MatrixXd q2() {
  MatrixXd q(5, 5);
  q << -0.5, 0.2, 0.1, 0.1, 0.1,
       0.1, -0.5, 0.2, 0.1, 0.1,
       0.1, 0.1, -0.6, 0.2, 0.2,
       0.1, 0.1, 0.2, -0.7, 0.3,
       0.1, 0.1, 0.2, 0.3, -0.7;
  return q;
}

/// Uniform off-diagonal rate `rate` on n states.
inline MatrixXd uniform_generator(int n, double rate) {
  MatrixXd q = MatrixXd::Constant(n, n, rate);
  q.diagonal().setConstant(-rate * (n - 1));
  return q;
}

inline MatrixXd q_large5() { return uniform_generator(5, 8.0); }
inline MatrixXd q_large4() { return uniform_generator(4, 12.0); }

/// The 4x5 logistic-regression generator exactly as printed.
inline MatrixXd q_beta_printed() {
  MatrixXd q(4, 5);
  q << 0.6, 0.2, 0.2, 0.1, 0.1,
       0.1, -0.5, 0.2, 0.1, 0.1,
       0.1, -0.5, 0.2, 0.1, 0.1,
       0.1, 0.1, 0.2, 0.2, -0.6;
  return q;
}

inline const std::vector<double> beta_small{0.5, 0.6, 0.7, 0.8, 0.9};
inline const std::vector<double> beta_large{0.1, 1.0, 1.8, 2.6, 4.0};
inline const std::vector<double> beta_mid{0.6, 0.8, 1.0, 1.2, 1.4};
inline const std::vector<double> gamma_small{0.05, 0.08, 0.1, 0.12};
inline const std::vector<double> gamma_large{8.0, 10.0, 12.0, 16.0};

}  // namespace rsl::fixtures
