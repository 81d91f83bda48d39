#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "rsl/error.hpp"
#include "rsl/metrics.hpp"
#include "rsl/samplers.hpp"

using namespace rsl;

namespace {

std::shared_ptr<const Potential> standard_gaussian(int d) {
  return quadratic_potential(MatrixXd::Identity(d, d), VectorXd::Zero(d));
}

// 2 gamma int_0^h of (psi0^2, psi0 psi1, psi1^2) by quadrature.
NoiseCovariance2x2 covariance_oracle(double h, double gamma) {
  auto psi0 = [&](double t) { return std::exp(-gamma * t); };
  auto psi1 = [&](double t) { return -std::expm1(-gamma * t) / gamma; };
  NoiseCovariance2x2 n;
  n.var_v = 2.0 * gamma * quadrature([&](double t) { return psi0(t) * psi0(t); }, 0.0, h, 1e-16);
  n.cov_vx = 2.0 * gamma * quadrature([&](double t) { return psi0(t) * psi1(t); }, 0.0, h, 1e-16);
  n.var_x = 2.0 * gamma * quadrature([&](double t) { return psi1(t) * psi1(t); }, 0.0, h, 1e-16);
  return n;
}

// Stationary covariance of s' = A s + noise(Sigma) via (I - A kron A) vec S = vec Sigma.
MatrixXd lyapunov_2x2(const MatrixXd& a, const MatrixXd& sigma) {
  MatrixXd kron(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) kron.block(2 * i, 2 * j, 2, 2) = a(i, j) * a;
  const VectorXd vec_sigma = Eigen::Map<const VectorXd>(sigma.data(), 4);
  const VectorXd vec_s = (MatrixXd::Identity(4, 4) - kron).fullPivLu().solve(vec_sigma);
  return Eigen::Map<const MatrixXd>(vec_s.data(), 2, 2);
}

SamplerConfig base_config(double eta, std::size_t k) {
  SamplerConfig c;
  c.stepsize = eta;
  c.iterations = k;
  c.friction = 1.5;
  return c;
}

}  // namespace

TEST_SUITE("samplers") {
  TEST_CASE("overdamped steps") {
    const VectorXd one = VectorXd::Ones(1);
    VectorXd x = one;
    lmc_update(x, one, 0.1, VectorXd::Zero(1));
    CHECK(x[0] == doctest::Approx(0.9));
    x = one;
    lmc_update(x, one, 4.0 * 0.01, VectorXd::Zero(1));
    CHECK(x[0] == doctest::Approx(0.96));

    // pure diffusion
    RngStream rng(1);
    for (double beta : {1.0, 2.6}) {
      RunningMoments m(1);
      OverdampedState s{VectorXd::Zero(1)};
      for (int i = 0; i < 100000; ++i) m.push(rslmc_step(s, beta, VectorXd::Zero(1), 0.01, rng).x);
      CHECK(m.covariance()(0, 0) == doctest::Approx(0.02 * beta).epsilon(0.02));
    }

    // effective stepsize: RS-LMC (beta, eta) equals LMC (beta eta) given the same draw
    RngStream a(9);
    RngStream b(9);
    const VectorXd x0 = (VectorXd(2) << 0.3, -1.2).finished();
    const VectorXd grad = (VectorXd(2) << 0.5, 0.1).finished();
    CHECK(rslmc_step({x0}, 1.8, grad, 0.01, a).x == lmc_step({x0}, grad, 1.8 * 0.01, b).x);
  }

  TEST_CASE("LMC stationary variance on a 1D Gaussian") {
    const auto f = standard_gaussian(1);
    const double eta = 0.01;
    SamplerConfig c = base_config(eta, 1100000);
    c.record_positions = false;
    RunningMoments m(1);
    Recorder r;
    r.on_step = [&](const StepView& s) {
      if (s.iteration > 100000) m.push(s.x);
    };
    run_chain(c, Algorithm::LMC, *f, RngStream(2), r);
    const double var = m.covariance()(0, 0);
    CHECK(var >= 1.0 - 3.0 * eta);
    CHECK(var <= 1.05);
  }

  TEST_CASE("integrator coefficients") {
    const auto zero = klmc_coefficients(0.0, 1.5);
    CHECK(zero.psi0 == 1.0);
    CHECK(zero.psi1 == 0.0);
    CHECK(zero.psi2 == 0.0);

    const auto c = klmc_coefficients(0.1, 1.5);
    CHECK(c.psi0 == doctest::Approx(std::exp(-0.15)).epsilon(1e-15));
    CHECK(c.psi1 == doctest::Approx((1.0 - std::exp(-0.15)) / 1.5).epsilon(1e-14));
    CHECK(c.psi2 == doctest::Approx((0.1 - c.psi1) / 1.5).epsilon(1e-12));

    for (double gamma : {0.5, 1.5, 10.0}) {
      for (double h : {1e-9, 1e-8 / gamma, 1e-4, 0.05, 0.1, 1.0, 5.0}) {
        const auto k = klmc_coefficients(h, gamma);
        const double oracle = quadrature([&](double t) { return -std::expm1(-gamma * t) / gamma; }, 0.0, h, 1e-30);
        CHECK(std::abs(k.psi2 - oracle) <= 1e-12 * oracle);
        CHECK(k.psi1 <= h);
        CHECK(k.psi2 <= 0.5 * h * h);
        CHECK(k.psi2 >= 0.0);
      }
    }
  }

  TEST_CASE("noise covariance against quadrature") {
    const auto zero = klmc_noise_covariance(0.0, 2.0);
    CHECK(zero.var_v == 0.0);
    CHECK(zero.cov_vx == 0.0);
    CHECK(zero.var_x == 0.0);

    const auto ref = covariance_oracle(0.1, 1.5);
    const auto got = klmc_noise_covariance(0.1, 1.5);
    CHECK(std::abs(got.var_v - ref.var_v) < 1e-10);
    CHECK(std::abs(got.cov_vx - ref.cov_vx) < 1e-10);
    CHECK(std::abs(got.var_x - ref.var_x) < 1e-10);

    // leading-order behaviour at gamma h = 1e-3
    const double gamma = 2.0;
    const double h = 5e-4;
    const auto small = klmc_noise_covariance(h, gamma);
    CHECK(small.var_v / (2.0 * gamma * h) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(small.cov_vx / (gamma * h * h) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(small.var_x / (2.0 * gamma / 3.0 * h * h * h) == doctest::Approx(1.0).epsilon(0.01));

    for (double g : {0.05, 0.5, 1.5, 10.0, 16.0}) {
      for (double hh : {1e-8, 1e-3, 0.0667, 0.1, 1.0, 3.0}) {
        const auto n = klmc_noise_covariance(hh, g);
        CHECK(n.var_v * n.var_x - n.cov_vx * n.cov_vx >= -1e-14);
        const auto o = covariance_oracle(hh, g);
        CHECK(std::abs(n.var_x - o.var_x) <= 1e-12 * std::max(o.var_x, 1e-300) + 1e-300);
      }
    }
  }

  TEST_CASE("regime-switching block noise equals the time-changed SDE over one step") {
    // Over [0, eta] with speed beta: dv = -gamma beta v ds + sqrt(2 gamma beta) dB, dx = beta v ds.
    const double beta = 2.6;
    const double eta = 0.1;
    const double gamma = 1.5;
    MatrixXd drift(2, 2);
    drift << -gamma * beta, 0.0, beta, 0.0;  // state (v, x)
    MatrixXd diffusion = MatrixXd::Zero(2, 2);
    diffusion(0, 0) = 2.0 * gamma * beta;
    auto entry = [&](int i, int j) {
      return quadrature(
          [&](double s) {
            const MatrixXd e = matrix_exp(drift, s);
            return (e * diffusion * e.transpose())(i, j);
          },
          0.0, eta, 1e-15);
    };
    const auto block = klmc_noise_covariance(beta * eta, gamma);
    CHECK(std::abs(entry(0, 0) - block.var_v) < 1e-10);
    CHECK(std::abs(entry(0, 1) - block.cov_vx) < 1e-10);
    CHECK(std::abs(entry(1, 1) - block.var_x) < 1e-10);
  }

  TEST_CASE("kinetic step") {
    KineticState s{VectorXd::Zero(1), VectorXd::Ones(1)};
    const KlmcKernel k = KlmcKernel::make(0.1, 1.5);
    klmc_update(s, VectorXd::Zero(1), k, VectorXd::Zero(1), VectorXd::Zero(1));
    CHECK(s.x[0] == doctest::Approx(klmc_coefficients(0.1, 1.5).psi1));
    CHECK(s.v[0] == doctest::Approx(std::exp(-0.15)));

    // the Cholesky factor reproduces the covariance
    const auto n = klmc_noise_covariance(0.1, 1.5);
    CHECK(k.l11 * k.l11 == doctest::Approx(n.var_v));
    CHECK(k.l11 * k.l21 == doctest::Approx(n.cov_vx));
    CHECK(k.l21 * k.l21 + k.l22 * k.l22 == doctest::Approx(n.var_x));

    // long horizon: velocity forgets and is N(0, 1)
    RngStream rng(3);
    RunningMoments m(1);
    for (int i = 0; i < 100000; ++i) {
      m.push(klmc_step({VectorXd::Zero(1), VectorXd::Zero(1)}, VectorXd::Zero(1), 20.0, 1.5, rng).v);
    }
    CHECK(m.covariance()(0, 0) == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("KLMC position variance matches the discrete Lyapunov oracle") {
    const double gamma = 1.5;
    const double h = 0.01;
    const auto c = klmc_coefficients(h, gamma);
    const auto n = klmc_noise_covariance(h, gamma);
    MatrixXd a(2, 2);
    a << c.psi0, -c.psi1, c.psi1, 1.0 - c.psi2;  // (v, x) with grad = x
    MatrixXd sigma(2, 2);
    sigma << n.var_v, n.cov_vx, n.cov_vx, n.var_x;
    const MatrixXd stationary = lyapunov_2x2(a, sigma);
    CHECK(stationary(1, 1) == doctest::Approx(1.0).epsilon(0.01));

    const auto f = standard_gaussian(1);
    SamplerConfig cfg = base_config(h, 1100000);
    cfg.friction = gamma;
    cfg.record_positions = false;
    RunningMoments m(1);
    RunningMoments v(1);
    Recorder r;
    r.on_step = [&](const StepView& s) {
      if (s.iteration > 100000) {
        m.push(s.x);
        v.push(*s.v);
      }
    };
    run_chain(cfg, Algorithm::KLMC, *f, RngStream(4), r);
    CHECK(m.covariance()(0, 0) == doctest::Approx(stationary(1, 1)).epsilon(0.05));
    CHECK(m.covariance()(0, 0) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(v.covariance()(0, 0) == doctest::Approx(stationary(0, 0)).epsilon(0.05));
  }

  TEST_CASE("run_chain bookkeeping") {
    const auto f = standard_gaussian(2);
    SamplerConfig c = base_config(0.01, 0);
    const Trace empty = run_chain(c, Algorithm::LMC, *f, RngStream(1));
    CHECK(empty.size() == 0);
    CHECK(empty.positions.empty());

    c.iterations = 1000;
    c.thinning = 7;
    c.record_velocity = true;
    Recorder r;
    r.metrics.push_back({"norm", [](const VectorXd& x) { return x.norm(); }});
    const Trace t = run_chain(c, Algorithm::KLMC, *f, RngStream(1), r);
    CHECK(t.size() == 1000 / 7);
    CHECK(t.iterations.front() == 7);
    CHECK(t.positions.size() == t.size() * 2);
    CHECK(t.velocities.size() == t.size() * 2);
    CHECK(t.metrics.at("norm").size() == t.size());
    CHECK(t.metrics.at("norm").back() == doctest::Approx(t.position(t.size() - 1).norm()));
    CHECK(t.burn_in == 100);

    SamplerConfig rs = base_config(0.01, 500);
    rs.regime = RegimeSpec::stationary(fixtures::beta_large, validate_generator(fixtures::q1()));
    const Trace rt = run_chain(rs, Algorithm::RSLMC, *f, RngStream(2));
    CHECK(rt.regime_indices.size() == 500);
    for (auto i : rt.regime_indices) CHECK(i < 5);

    // determinism
    const Trace again = run_chain(rs, Algorithm::RSLMC, *f, RngStream(2));
    CHECK(again.positions == rt.positions);
    CHECK(again.regime_indices == rt.regime_indices);
  }

  TEST_CASE("run_chain validation and divergence") {
    const auto f = standard_gaussian(1);
    SamplerConfig c = base_config(0.01, 10);
    auto code = [&](Algorithm a, const SamplerConfig& cfg) -> std::optional<ErrorCode> {
      try {
        run_chain(cfg, a, *f, RngStream(1));
      } catch (const Error& e) {
        return e.code();
      }
      return std::nullopt;
    };
    CHECK(code(Algorithm::RSLMC, c) == ErrorCode::ConfigError);
    CHECK(code(Algorithm::FRSKLMC, c) == ErrorCode::ConfigError);
    SamplerConfig with_regime = c;
    with_regime.regime = RegimeSpec::stationary(fixtures::beta_large, validate_generator(fixtures::q1()));
    CHECK(code(Algorithm::LMC, with_regime) == ErrorCode::ConfigError);
    SamplerConfig burn = c;
    burn.burn_in = 10;
    CHECK(code(Algorithm::LMC, burn) == ErrorCode::ConfigError);
    SamplerConfig fast = c;
    fast.stepsize = 0.05;
    fast.regime = RegimeSpec::stationary(std::vector<double>(5, 1.0), validate_generator(fixtures::q_large5()));
    CHECK(code(Algorithm::RSLMC, fast) == ErrorCode::StepsizeTooLarge);
    SamplerConfig exact = fast;
    exact.regime_kernel = RegimeKernel::Exact;
    CHECK_FALSE(code(Algorithm::RSLMC, exact).has_value());

    SamplerConfig divergent = base_config(3.0, 200);
    divergent.x0 = VectorXd::Ones(1);
    CHECK(code(Algorithm::LMC, divergent) == ErrorCode::NonFiniteState);

    // the admissibility flag is a warning, not an error
    const Trace t = run_chain(base_config(1.5, 5), Algorithm::LMC, *f, RngStream(1));
    CHECK_FALSE(t.admissible);
    CHECK_FALSE(t.warnings.empty());
    CHECK(run_chain(base_config(0.01, 5), Algorithm::LMC, *f, RngStream(1)).admissible);
  }

  TEST_CASE("single-regime switching samplers reduce to the classical ones") {
    const MatrixXd a = (MatrixXd(2, 2) << 2.0, 0.3, 0.3, 1.0).finished();
    const auto f = quadratic_potential(a, VectorXd::Ones(2));
    const SamplerConfig plain = base_config(0.05, 10000);

    SamplerConfig rs = plain;
    rs.regime = RegimeSpec::constant(1.0);
    CHECK(run_chain(plain, Algorithm::LMC, *f, RngStream(5)).positions ==
          run_chain(rs, Algorithm::RSLMC, *f, RngStream(5)).positions);
    CHECK(run_chain(plain, Algorithm::KLMC, *f, RngStream(5)).positions ==
          run_chain(rs, Algorithm::RSKLMC, *f, RngStream(5)).positions);
    SamplerConfig frs = plain;
    frs.frictional_regime = RegimeSpec::constant(plain.friction);
    CHECK(run_chain(plain, Algorithm::KLMC, *f, RngStream(5)).positions ==
          run_chain(frs, Algorithm::FRSKLMC, *f, RngStream(5)).positions);
  }

  TEST_CASE("2D stationarity of the switching samplers") {
    const MatrixXd a = (MatrixXd(2, 2) << 1.5, 0.5, 0.5, 1.0).finished();
    const auto f = quadratic_potential(a, VectorXd::Zero(2));
    const MatrixXd target = a.inverse();
    const GeneratorMatrix q1 = validate_generator(fixtures::q1());

    struct Case {
      Algorithm algorithm;
      SamplerConfig config;
    };
    std::vector<Case> cases;
    SamplerConfig rs = base_config(0.01, 1100000);
    rs.record_positions = false;
    rs.regime = RegimeSpec::stationary(fixtures::beta_mid, q1);
    cases.push_back({Algorithm::RSLMC, rs});
    cases.push_back({Algorithm::RSKLMC, rs});
    SamplerConfig frs = base_config(0.01, 1100000);
    frs.record_positions = false;
    frs.frictional_regime = RegimeSpec::stationary({1.0, 1.5, 2.0, 2.5}, validate_generator(fixtures::q_large4()));
    cases.push_back({Algorithm::FRSKLMC, frs});

    for (const Case& tc : cases) {
      RunningMoments m(2);
      RunningMoments v(2);
      Recorder r;
      r.on_step = [&](const StepView& s) {
        if (s.iteration > 100000) {
          m.push(s.x);
          if (s.v) v.push(*s.v);
        }
      };
      run_chain(tc.config, tc.algorithm, *f, RngStream(17), r);
      INFO(algorithm_name(tc.algorithm));
      CHECK(m.mean().cwiseAbs().maxCoeff() <= 0.05);
      CHECK(((m.covariance().diagonal().array() / target.diagonal().array()) - 1.0).abs().maxCoeff() <= 0.05);
      if (v.count() > 0) CHECK((v.covariance() - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 0.05);
    }
  }

  TEST_CASE("algorithm names") {
    CHECK(algorithm_name(Algorithm::RSLMC) == "RS-LMC");
    CHECK(algorithm_name(Algorithm::RSLMC, true) == "RS-SGLD");
    CHECK(algorithm_name(Algorithm::FRSKLMC, true) == "FRS-SGHMC");
    CHECK(parse_algorithm("SGHMC") == Algorithm::KLMC);
    CHECK(parse_algorithm("RS-KLMC") == Algorithm::RSKLMC);
    CHECK_FALSE(parse_algorithm("HMC").has_value());
  }
}
