#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "rsl/error.hpp"
#include "rsl/numerics.hpp"

namespace rsl {

namespace {

void require_finite(const MatrixXd& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorCode::NonFiniteEntry, std::string(what) + " has a non-finite entry");
}

bool spectrum_order(const std::complex<double>& lhs, const std::complex<double>& rhs) {
  if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
  return lhs.imag() > rhs.imag();
}

// Closed-form roots of the 2x2 characteristic polynomial.
std::vector<std::complex<double>> two_by_two_eigenvalues(const MatrixXd& a) {
  const double half_trace = 0.5 * (a(0, 0) + a(1, 1));
  const double half_gap = 0.5 * (a(0, 0) - a(1, 1));
  const double disc = half_gap * half_gap + a(0, 1) * a(1, 0);
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    // Avoid cancellation: compute the larger-magnitude root first.
    const double big = half_trace >= 0.0 ? half_trace + root : half_trace - root;
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double small = big != 0.0 ? det / big : half_trace - (big - half_trace);
    return {big, small};
  }
  const double im = std::sqrt(-disc);
  return {{half_trace, im}, {half_trace, -im}};
}

}  // namespace

double ComplexSpectrum::max_real() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues) best = std::max(best, z.real());
  return best;
}

double ComplexSpectrum::min_real() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues) best = std::min(best, z.real());
  return best;
}

double ComplexSpectrum::max_abs() const {
  double best = 0.0;
  for (const auto& z : eigenvalues) best = std::max(best, std::abs(z));
  return best;
}

ComplexSpectrum eigenvalues(const MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "eigenvalues need a non-empty square matrix");
  }
  require_finite(a, "matrix");
  ComplexSpectrum out;
  if (a.rows() == 1) {
    out.eigenvalues = {a(0, 0)};
  } else if (a.rows() == 2) {
    out.eigenvalues = two_by_two_eigenvalues(a);
  } else {
    Eigen::EigenSolver<MatrixXd> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::IterationLimitExceeded, "real Schur iteration did not converge");
    }
    const auto& values = solver.eigenvalues();
    out.eigenvalues.assign(values.data(), values.data() + values.size());
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), spectrum_order);
  return out;
}

VectorXd symmetric_eigenvalues(const MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "symmetric eigenvalues need a non-empty square matrix");
  }
  require_finite(a, "matrix");
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::IterationLimitExceeded, "symmetric eigensolver did not converge");
  }
  return solver.eigenvalues();
}

double spectral_norm(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const VectorXd gram = symmetric_eigenvalues(a.transpose() * a);
  return std::sqrt(std::max(0.0, gram.maxCoeff()));
}

MatrixXd matrix_exp(const MatrixXd& a, double t) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix_exp needs a square matrix");
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::NonFiniteEntry, "time must be finite and >= 0");
  require_finite(a, "matrix");
  const Eigen::Index n = a.rows();
  const MatrixXd identity = MatrixXd::Identity(n, n);
  if (t == 0.0 || n == 0) return identity;

  MatrixXd b = a * t;
  const double norm1 = b.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1) || norm1 > 1e8) {
    throw Error(ErrorCode::NormOverflow, "||A t||_1 = " + std::to_string(norm1) + " is too large");
  }

  // Higham (2005): degree-13 Pade with theta_13 = 5.37.
  constexpr double kTheta13 = 5.371920351148152;
  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
    b /= std::ldexp(1.0, squarings);
  }
  constexpr double c[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
                          129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
                          1323241920.0,        40840800.0,          960960.0,           16380.0,
                          182.0,               1.0};
  const MatrixXd b2 = b * b;
  const MatrixXd b4 = b2 * b2;
  const MatrixXd b6 = b4 * b2;
  const MatrixXd u_inner = b6 * (c[13] * b6 + c[11] * b4 + c[9] * b2) + c[7] * b6 + c[5] * b4 + c[3] * b2 + c[1] * identity;
  const MatrixXd u = b * u_inner;
  const MatrixXd v = b6 * (c[12] * b6 + c[10] * b4 + c[8] * b2) + c[6] * b6 + c[4] * b4 + c[2] * b2 + c[0] * identity;
  MatrixXd result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!result.allFinite()) throw Error(ErrorCode::NormOverflow, "matrix exponential overflowed");
  return result;
}

}  // namespace rsl
