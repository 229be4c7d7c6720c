#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "spikebench/amp.hpp"

using namespace spikebench;

namespace {

DenoiserSpec custom(std::function<double(int, double)> f, std::function<double(int, double)> df) {
  DenoiserSpec s;
  s.kind = DenoiserKind::Custom;
  s.custom = {f, df, f, df};
  return s;
}

}  // namespace

TEST_SUITE("amp") {
  TEST_CASE("initialisation") {
    const auto inst = build_instance(2.0, GaussianNoise{}, 1200, 2000, 1);
    Rng rng(2);
    CHECK(init_u1(inst, 1.0, rng) == inst.u_star);
    const Vec u = init_u1(inst, 0.2, rng);
    CHECK(u.squaredNorm() == doctest::Approx(1200).epsilon(1e-12));
    CHECK(std::abs(u.dot(inst.u_star) / 1200 - 0.2) < 3 / std::sqrt(1200.0));
    CHECK_THROWS_AS(init_u1(inst, 0.0, rng), DomainError);
    CHECK_THROWS_AS(init_u1(inst, 1.5, rng), DomainError);
    AmpConfig bad;
    bad.t_max = 0;
    CHECK_THROWS_AS(validate(bad), DomainError);
  }

  TEST_CASE("assumed-model tracker") {
    const double a = 0.6, l = 3.0, eps = 0.2;
    const LinearSchedule s = assumed_model_schedule(l, a, eps, 400);
    const double nu = std::sqrt(l * a) * eps;
    CHECK(s.c[0] == doctest::Approx(nu / (nu * nu + a)));
    // fixed point: squared overlaps of the Gaussian outlier vectors
    const double d = s.d.back(), c = s.c.back();
    const double qv = (std::sqrt(l / a) / d - 1) * a / l;
    const double qu = (std::sqrt(l * a) / c - a) / (l * a);
    const double left = 1 - a * (1 + l) / (l * (l + a));
    const double right = 1 - (a + l) / (l * (l + 1));
    CHECK(qv == doctest::Approx(right).epsilon(1e-8));
    CHECK(qu == doctest::Approx(left).epsilon(1e-8));
    CHECK(qu * qv == doctest::Approx(oracle::gauss_spectral_sq(l, a)).epsilon(1e-8));
  }

  TEST_CASE("first step and Onsager coefficients") {
    const auto inst = build_instance(4.0, RectPoissonNoise{1.0}, 300, 500, 3);
    AmpConfig cfg;
    cfg.lambda_assumed = 4.0;
    Rng rng(4);
    AmpState s = amp_init(inst, cfg, rng);
    const Vec u1 = s.u;
    const Denoisers den = Denoisers::make(cfg.denoiser, 4.0, inst.aspect, cfg.init_corr, cfg.t_max);
    amp_step(s, inst, den);
    const Eigen::VectorXd ref = inst.Y.transpose() * u1;
    CHECK((s.g - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.history[0].beta_t == 0.0);
    for (int t = 1; t <= 5; ++t) {
      if (t > 1) amp_step(s, inst, den);
      CHECK(s.alpha_t == doctest::Approx(den.coef_v(t)).epsilon(1e-14));
      CHECK(s.beta_t == doctest::Approx(den.coef_u(t + 1)).epsilon(1e-14));
    }
    // second sweep applies the memory term explicitly
    AmpState r = amp_init(inst, cfg, rng);
    amp_step(r, inst, den);
    const Vec u2 = r.u, v1 = r.v;
    const double b2 = r.beta_t;
    amp_step(r, inst, den);
    const Eigen::VectorXd g2 = inst.Y.transpose() * u2 - inst.aspect * b2 * v1;
    CHECK((r.g - g2).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("zero denoiser") {
    const auto inst = build_instance(4.0, GaussianNoise{}, 120, 200, 5);
    AmpConfig cfg;
    cfg.denoiser = custom([](int, double) { return 0.0; }, [](int, double) { return 0.0; });
    cfg.early_stop_tol = 0;
    Rng rng(6);
    const AmpState s = run_amp(inst, cfg, rng);
    CHECK(s.history.size() == 8);
    for (const auto& h : s.history) CHECK(h.overlap == 0.0);
    CHECK(s.u.isZero(0));
  }

  TEST_CASE("no signal, no overlap") {
    const auto inst = build_instance(0.0, GaussianNoise{}, 1200, 2000, 7);
    AmpConfig cfg;
    cfg.lambda_assumed = 2.0;
    Rng rng(8);
    const AmpState s = run_amp(inst, cfg, rng);
    for (const auto& h : s.history) CHECK(h.overlap < 0.05);
  }

  TEST_CASE("g1 variance for Gaussian noise") {
    const auto inst = build_instance(0.0, GaussianNoise{}, 1200, 2000, 9);
    Rng rng(10);
    const Vec u = init_u1(inst, 0.2, rng);
    const Eigen::VectorXd g = inst.Y.transpose() * u;
    const double var = g.squaredNorm() / 2000 - g.mean() * g.mean();
    CHECK(var == doctest::Approx(0.6).epsilon(0.05));
  }

  TEST_CASE("determinism and metric ranges") {
    const auto inst = build_instance(3.0, RectPoissonNoise{1.0}, 300, 500, 11);
    AmpConfig cfg;
    cfg.lambda_assumed = 3.0;
    Rng a(12), b(12);
    const AmpState s1 = run_amp(inst, cfg, a), s2 = run_amp(inst, cfg, b);
    REQUIRE(s1.history.size() == s2.history.size());
    for (std::size_t i = 0; i < s1.history.size(); ++i) {
      CHECK(s1.history[i].overlap == s2.history[i].overlap);
      CHECK(s1.history[i].mse == s2.history[i].mse);
      CHECK(s1.history[i].overlap >= 0);
      CHECK(s1.history[i].overlap <= 1);
    }
    CHECK(s1.u == s2.u);
  }

  TEST_CASE("early stop") {
    const auto inst = build_instance(6.0, GaussianNoise{}, 300, 500, 13);
    AmpConfig cfg;
    cfg.lambda_assumed = 6.0;
    cfg.t_max = 200;
    cfg.early_stop_tol = 1e-3;
    Rng rng(14);
    const AmpState s = run_amp(inst, cfg, rng);
    CHECK(s.history.size() < 200);
    const auto& h = s.history;
    CHECK(std::abs(h.back().overlap - h[h.size() - 2].overlap) < 1e-3);
  }

  TEST_CASE("divergence keeps the partial history") {
    const auto inst = build_instance(2.0, GaussianNoise{}, 60, 100, 15);
    AmpConfig cfg;
    cfg.early_stop_tol = 0;
    cfg.denoiser = custom([](int t, double x) { return t >= 3 ? std::numeric_limits<double>::infinity() : x; },
                          [](int, double) { return 1.0; });
    Rng rng(16);
    try {
      run_amp(inst, cfg, rng);
      FAIL("expected divergence");
    } catch (const AmpDivergenceError& e) {
      CHECK(e.iteration == 2);
      CHECK(e.history.size() == 2);
    }
  }
}
