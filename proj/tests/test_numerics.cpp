#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "fixtures.hpp"
#include "rsl/error.hpp"
#include "rsl/numerics.hpp"

using namespace rsl;
using cplx = std::complex<double>;

namespace {

// Faddeev-LeVerrier: coefficients c[0..n] of det(lambda I - A) = sum c[k] lambda^{n-k}.
std::vector<double> characteristic_polynomial(const MatrixXd& a) {
  const Eigen::Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  MatrixXd m = MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * MatrixXd::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

cplx evaluate(const std::vector<double>& c, cplx z) {
  cplx out = 0.0;
  for (double coeff : c) out = out * z + coeff;
  return out;
}

// Durand-Kerner simultaneous root iteration.
std::vector<cplx> polynomial_roots(const std::vector<double>& c) {
  const std::size_t n = c.size() - 1;
  std::vector<cplx> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = std::pow(cplx(0.4, 0.9), static_cast<double>(i));
  for (int iter = 0; iter < 5000; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx denom = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      roots[i] -= evaluate(c, roots[i]) / denom;
    }
  }
  return roots;
}

// Greedy nearest matching of two root multisets; returns the worst distance.
double match_distance(std::vector<cplx> a, std::vector<cplx> b) {
  double worst = 0.0;
  for (const cplx& z : a) {
    auto best = std::min_element(b.begin(), b.end(), [&](cplx u, cplx v) { return std::abs(u - z) < std::abs(v - z); });
    worst = std::max(worst, std::abs(*best - z));
    b.erase(best);
  }
  return worst;
}

MatrixXd random_matrix(RngStream& rng, int n) {
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a;
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("philox known-answer vectors") {
    using detail::philox4x32_10;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
          detail::PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          detail::PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          detail::PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("streams are deterministic and lanes are disjoint") {
    RngStream a(42);
    RngStream b(42);
    const VectorXd x = standard_normal(a, 3);
    const VectorXd y = standard_normal(b, 3);
    CHECK(x == y);

    RngStream lane0(7, 3, 0);
    RngStream lane1(7, 3, 1);
    RngStream other_stream(7, 4, 0);
    std::vector<std::uint64_t> s0, s1, s2;
    for (int i = 0; i < 1000; ++i) {
      s0.push_back(lane0.next_u64());
      s1.push_back(lane1.next_u64());
      s2.push_back(other_stream.next_u64());
    }
    std::sort(s0.begin(), s0.end());
    for (auto v : s1) CHECK_FALSE(std::binary_search(s0.begin(), s0.end(), v));
    for (auto v : s2) CHECK_FALSE(std::binary_search(s0.begin(), s0.end(), v));
  }

  TEST_CASE("standard normal moments over 1e6 draws") {
    RngStream rng(2024);
    const VectorXd z = standard_normal(rng, 1000000);
    const double mean = z.mean();
    const double var = (z.array() - mean).square().sum() / (z.size() - 1);
    CHECK(std::abs(mean) < 0.01);
    // sd of the sample variance is sqrt(2/n) ~ 1.4e-3, so 0.01 is about 7 sd
    CHECK(std::abs(var - 1.0) < 0.01);
  }

  TEST_CASE("uniform and exponential draws") {
    RngStream rng(5);
    double total = 0.0;
    double exp_total = 0.0;
    for (int i = 0; i < 200000; ++i) {
      const double u = rng.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      total += u;
      exp_total += rng.exponential(4.0);
    }
    CHECK(total / 200000 == doctest::Approx(0.5).epsilon(0.01));
    CHECK(exp_total / 200000 == doctest::Approx(0.25).epsilon(0.01));
  }

  TEST_CASE("categorical sampling") {
    RngStream rng(11);
    const std::vector<double> point{1.0, 0.0, 0.0};
    for (int i = 0; i < 1000; ++i) CHECK(sample_categorical(rng, point) == 0);

    const std::vector<double> coin{0.5, 0.5};
    int zeros = 0;
    for (int i = 0; i < 1000000; ++i) zeros += sample_categorical(rng, coin) == 0;
    CHECK(std::abs(zeros / 1e6 - 0.5) < 0.005);

    // first row of I + 0.1 Q1
    const std::vector<double> row{0.94, 0.02, 0.02, 0.01, 0.01};
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 1000000; ++i) ++counts[sample_categorical(rng, row)];
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(counts[i] / 1e6 - row[i]) < 0.005);

    // a zero weight is never selected, even in the rounding gap
    const std::vector<double> gap{0.3, 0.7, 0.0};
    for (int i = 0; i < 10000; ++i) CHECK(sample_categorical(rng, gap) != 2);
  }

  TEST_CASE("categorical validation") {
    RngStream rng(1);
    const std::vector<double> negative{1.2, -0.2};
    const std::vector<double> unnormalized{0.5, 0.4};
    CHECK_THROWS_AS(sample_categorical(rng, negative), Error);
    try {
      sample_categorical(rng, negative);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NegativeWeight);
    }
    try {
      sample_categorical(rng, unnormalized);
      FAIL("expected UnnormalizedWeights");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnnormalizedWeights);
    }
  }

  TEST_CASE("eigenvalues of small and structured matrices") {
    const ComplexSpectrum zero = eigenvalues(MatrixXd::Zero(2, 2));
    REQUIRE(zero.size() == 2);
    for (const auto& z : zero.eigenvalues) CHECK(std::abs(z) == 0.0);

    // Q_large = 8 J - 40 I has spectrum {0, -40 x4}
    const ComplexSpectrum large = eigenvalues(fixtures::q_large5());
    REQUIRE(large.size() == 5);
    CHECK(std::abs(large.eigenvalues[0]) < 1e-10 * 40);
    for (std::size_t i = 1; i < 5; ++i) CHECK(std::abs(large.eigenvalues[i] - cplx(-40.0)) < 1e-10 * 40);

    MatrixXd rotation(2, 2);
    rotation << 0.0, -2.0, 2.0, 0.0;
    const ComplexSpectrum rot = eigenvalues(rotation);
    CHECK(rot.eigenvalues[0].imag() == doctest::Approx(2.0));
    CHECK(rot.eigenvalues[1].imag() == doctest::Approx(-2.0));
    CHECK(rot.max_real() == doctest::Approx(0.0));

    MatrixXd bad(1, 1);
    bad << std::nan("");
    CHECK_THROWS_AS(eigenvalues(bad), Error);
  }

  TEST_CASE("Q1 spectrum against a characteristic-polynomial oracle") {
    const MatrixXd q = fixtures::q1();
    const ComplexSpectrum s = eigenvalues(q);
    const auto coeffs = characteristic_polynomial(q);
    // Q1 has a double eigenvalue, where root iteration is only sqrt(eps) accurate
    CHECK(match_distance(s.eigenvalues, polynomial_roots(coeffs)) < 1e-6);
    for (const cplx& z : s.eigenvalues) CHECK(std::abs(evaluate(coeffs, z)) < 1e-13);
    CHECK(std::abs(s.eigenvalues[0]) < 1e-12);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.eigenvalues[i].real() < -1e-3);
  }

  TEST_CASE("random spectra match the polynomial oracle and trace/determinant") {
    RngStream rng(99);
    for (int n = 1; n <= 6; ++n) {
      for (int rep = 0; rep < 10; ++rep) {
        const MatrixXd a = random_matrix(rng, n);
        const ComplexSpectrum s = eigenvalues(a);
        REQUIRE(s.size() == static_cast<std::size_t>(n));
        const double norm = spectral_norm(a);
        cplx sum = 0.0;
        cplx prod = 1.0;
        for (const cplx& z : s.eigenvalues) {
          sum += z;
          prod *= z;
        }
        CHECK(std::abs(sum - a.trace()) < 1e-8 * std::max(1.0, norm));
        if (n <= 5) CHECK(std::abs(prod - a.determinant()) < 1e-8 * std::max(1.0, std::pow(norm, n)));
        CHECK(match_distance(s.eigenvalues, polynomial_roots(characteristic_polynomial(a))) < 1e-7 * std::max(1.0, norm));
        // conjugate pairs
        for (const cplx& z : s.eigenvalues) {
          if (std::abs(z.imag()) > 1e-12) {
            const bool paired = std::any_of(s.eigenvalues.begin(), s.eigenvalues.end(),
                                            [&](cplx w) { return std::abs(w - std::conj(z)) < 1e-10 * norm; });
            CHECK(paired);
          }
        }
      }
    }
  }

  TEST_CASE("symmetric eigenvalues and spectral norm") {
    MatrixXd a(2, 2);
    a << 2.0, 1.0, 1.0, 2.0;
    const VectorXd ev = symmetric_eigenvalues(a);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(3.0));
    MatrixXd b(2, 2);
    b << 0.0, 3.0, 0.0, 0.0;
    CHECK(spectral_norm(b) == doctest::Approx(3.0));
  }

  TEST_CASE("matrix exponential") {
    RngStream rng(3);
    const MatrixXd a = random_matrix(rng, 4);
    CHECK((matrix_exp(a, 0.0) - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    MatrixXd diag = MatrixXd::Zero(2, 2);
    diag(0, 0) = -1.0;
    diag(1, 1) = -2.0;
    const MatrixXd e = matrix_exp(diag, 1.0);
    CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(e(0, 1) == 0.0);

    // semigroup property
    const MatrixXd lhs = matrix_exp(a, 0.7 + 1.3);
    const MatrixXd rhs = matrix_exp(a, 0.7) * matrix_exp(a, 1.3);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));

    // generator rows stay stochastic
    for (const MatrixXd& q : {fixtures::q1(), fixtures::q2(), fixtures::q_large5(), fixtures::q_large4()}) {
      for (double t : {0.01, 0.5, 3.0, 20.0}) {
        const MatrixXd p = matrix_exp(q, t);
        CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
        CHECK(p.minCoeff() > -1e-12);
      }
    }

    // eigendecomposition oracle on a symmetric matrix with norm * t up to 1e3
    const MatrixXd r = random_matrix(rng, 5);
    const MatrixXd s = 0.5 * (r + r.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
    for (double t : {0.1, 1.0, 10.0}) {
      const MatrixXd oracle =
          eig.eigenvectors() * (eig.eigenvalues() * t).array().exp().matrix().asDiagonal() * eig.eigenvectors().transpose();
      const double scale = std::max(1.0, oracle.cwiseAbs().maxCoeff());
      CHECK((matrix_exp(s, t) - oracle).cwiseAbs().maxCoeff() < 1e-10 * scale);
    }

    // decaying generator-type matrix at ||A|| t ~ 1e3 stays within 1e-10 of the eigen route
    const MatrixXd shifted = fixtures::q_large5() - 2.0 * MatrixXd::Identity(5, 5);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig2(shifted);
    const MatrixXd oracle2 = eig2.eigenvectors() * (eig2.eigenvalues() * 25.0).array().exp().matrix().asDiagonal() *
                             eig2.eigenvectors().transpose();
    CHECK((matrix_exp(shifted, 25.0) - oracle2).cwiseAbs().maxCoeff() < 1e-10);

    MatrixXd bad = MatrixXd::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(matrix_exp(bad, 1.0), Error);
  }

  TEST_CASE("quadrature against closed forms") {
    CHECK(quadrature([](double) { return 1.0; }, 0.0, 1.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-14));
    const double gamma = 1.5;
    const double h = 0.1;
    const double value = quadrature([&](double t) { return std::exp(-2.0 * gamma * t); }, 0.0, h, 1e-14);
    CHECK(std::abs(value - (1.0 - std::exp(-0.3)) / 3.0) < 1e-14);
    const double oscillating = quadrature([](double t) { return std::sin(10.0 * t) * std::sin(10.0 * t); }, 0.0, M_PI, 1e-12);
    CHECK(std::abs(oscillating - M_PI / 2.0) < 1e-11);
    CHECK(quadrature([](double t) { return t; }, 2.0, 2.0, 1e-12) == 0.0);
  }
}
