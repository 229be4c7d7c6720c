#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "oracles.hpp"
#include "spikebench/bayes_theory.hpp"
#include "spikebench/error.hpp"
#include "spikebench/spectral.hpp"

using namespace spikebench;

TEST_SUITE("spectral") {
  TEST_CASE("Lanczos against a full decomposition") {
    Rng rng(31);
    for (auto [n, m] : {std::pair{5, 7}, std::pair{40, 40}, std::pair{120, 200}, std::pair{200, 200}}) {
      Mat Y(n, m);
      fill_normal(rng, Y.data(), static_cast<std::size_t>(Y.size()));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(Y), Eigen::ComputeThinU | Eigen::ComputeThinV);
      const SingularTriplet tr = top_singular_triplet(Y, 7);
      CAPTURE(n);
      CHECK(tr.sigma == doctest::Approx(svd.singularValues()(0)).epsilon(1e-8));
      const double ou = std::abs(tr.u.dot(svd.matrixU().col(0))) / std::sqrt(double(n));
      const double ov = std::abs(tr.v.dot(svd.matrixV().col(0))) / std::sqrt(double(m));
      CHECK(ou >= 1 - 1e-8);
      CHECK(ov >= 1 - 1e-8);
      CHECK(tr.u.squaredNorm() == doctest::Approx(n).epsilon(1e-12));
      CHECK(tr.v.squaredNorm() == doctest::Approx(m).epsilon(1e-12));
      CHECK(tr.u(0) >= 0);
    }
  }

  TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(top_singular_triplet(Mat::Zero(4, 6)), DomainError);
    Mat one = Mat::Zero(3, 5);
    one(1, 2) = -2.5;
    const SingularTriplet tr = top_singular_triplet(one);
    CHECK(tr.sigma == doctest::Approx(2.5));
    CHECK(std::abs(tr.u(1)) == doctest::Approx(std::sqrt(3.0)));
  }

  TEST_CASE("noiseless spike and pure atomic noise") {
    const auto inst = build_instance(3.0, GaussianNoise{}, 60, 100, 5);
    SpikedInstance clean = inst;
    clean.Y = inst.Y - noise_of(inst);
    const SingularTriplet tr = top_singular_triplet(clean.Y, 1);
    CHECK(tr.sigma == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
    CHECK(overlap_of(tr.u, tr.v, clean) == doctest::Approx(1.0).epsilon(1e-10));

    Rng rng(2);
    const Mat Z = sample_noise(FromLawNoise{SingularLaw::atomic(0.6, {1.0}, {1.0})}, 60, 100, rng);
    CHECK(top_singular_triplet(Z, 3).sigma == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("same seed, same triplet") {
    const auto inst = build_instance(4.0, RectPoissonNoise{1.0}, 90, 150, 8);
    const SingularTriplet a = top_singular_triplet(inst.Y, 11), b = top_singular_triplet(inst.Y, 11);
    CHECK(a.sigma == b.sigma);
    CHECK(a.u == b.u);
  }

  TEST_CASE("J scaling") {
    const double a = 0.6;
    const auto g = SingularLaw::gaussian(a);
    CHECK(j_scaling(g, 0.5) == 0.0);
    CHECK(j_scaling(g, 1e3) >= 0.99);
    for (double ls : {0.9, 1.5, 4.0, 8.0})
      CHECK(j_scaling(g, ls) == doctest::Approx(std::sqrt(oracle::gauss_spectral_sq(ls, a))).epsilon(1e-9));
    const auto p = SingularLaw::rect_poisson(a, 1.0);
    CHECK(j_scaling(p, 0.5 / p.edge().h_bar) == 0.0);
    CHECK(j_scaling(p, 1e3) >= 0.99);
    // continuous at the BBP point
    CHECK(j_scaling(p, 1 / p.edge().h_bar) < 1e-3);
    CHECK_THROWS_AS(j_scaling(g, 0.0), DomainError);
  }

  TEST_CASE("estimators") {
    const auto inst = build_instance(4.0, GaussianNoise{}, 120, 200, 21);
    const SpectralEstimate os = optspec(inst), gs = gauspec(inst, 4.0);
    CHECK(os.j_scale == gs.j_scale);
    CHECK(os.sigma1 == gs.sigma1);
    CHECK(spectral_mse(os, inst) == doctest::Approx(mse_rank_one(os.j_scale * os.u1, os.v1, inst)));

    const auto below = build_instance(0.3, GaussianNoise{}, 120, 200, 22);
    const SpectralEstimate z = optspec(below);
    CHECK(z.j_scale == 0.0);
    CHECK(spectral_mse(z, below) == doctest::Approx(0.5));
  }

  TEST_CASE("spectral theory identity") {
    for (const auto& law : {SingularLaw::gaussian(0.6), SingularLaw::rect_poisson(0.6, 1.0)})
      for (double ls : {0.5, 1.0, 2.0, 4.0, 8.0})
        for (double l : {0.5, 1.0, 4.0, 16.0, 32.0}) {
          const SpectralTheory s = spectral_theory_mse(law, l, ls);
          CHECK(std::abs((s.mse_gs - s.mse_os) - 0.5 * (s.j_os - s.j_gs) * (s.j_os - s.j_gs)) < 1e-12);
          CHECK(s.mse_gs >= s.mse_os - 1e-12);
          if (s.j_os == 0.0) CHECK(s.mse_os == 0.5);
        }
    const SpectralTheory m = spectral_theory_mse(SingularLaw::gaussian(0.6), 3.0, 3.0);
    CHECK(m.mse_os == m.mse_gs);
  }

  TEST_CASE("OptSpec beats GauSpec on average for Poisson noise") {
    double os = 0, gs = 0;
    for (int k = 0; k < 20; ++k) {
      const auto inst = build_instance(4.0, RectPoissonNoise{1.0}, 300, 500, 100 + k);
      const SingularTriplet tr = top_singular_triplet(inst.Y, inst.seed);
      const SpectralTheory th = spectral_theory_mse(SingularLaw::rect_poisson(0.6, 1.0), 4.0, 4.0);
      os += mse_rank_one(th.j_os * tr.u, tr.v, inst);
      gs += mse_rank_one(th.j_gs * tr.u, tr.v, inst);
    }
    CHECK(os <= gs);
  }
}
