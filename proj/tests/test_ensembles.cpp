#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "spikebench/ensembles.hpp"
#include "spikebench/error.hpp"
#include "spikebench/rng.hpp"

using namespace spikebench;

namespace {

std::vector<double> singular_values(const Mat& Z) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(Z * Z.transpose()), Eigen::EigenvaluesOnly);
  std::vector<double> s;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
  return s;
}

}  // namespace

TEST_SUITE("ensembles") {
  TEST_CASE("sphere samples") {
    Rng rng(3);
    const Vec u = sample_sphere(500, std::sqrt(500.0), rng);
    CHECK(std::abs(u.squaredNorm() - 500) < 1e-12 * 500);
    const Vec w = sample_sphere(500, std::sqrt(500.0), rng);
    CHECK(std::abs(u.dot(w)) / 500 < 4 / std::sqrt(500.0));

    const int dim = 5, draws = 10000;
    Vec mean = Vec::Zero(dim);
    for (int i = 0; i < draws; ++i) mean += sample_sphere(dim, 1.0, rng);
    mean /= draws;
    for (int k = 0; k < dim; ++k) CHECK(std::abs(mean(k)) < 3 / std::sqrt(double(draws) * dim));
    CHECK_THROWS_AS(sample_sphere(0, 1.0, rng), DomainError);
  }

  TEST_CASE("haar columns are orthonormal") {
    Rng rng(4);
    const Mat Q = haar_orthonormal(60, 40, rng);
    const Eigen::MatrixXd G = Q.transpose() * Q;
    CHECK((G - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("noise normalisation") {
    Rng rng(5);
    const Mat G = sample_noise(GaussianNoise{}, 1200, 2000, rng);
    CHECK(std::abs(G.squaredNorm() / 1200 - 1) < 0.02);
    const Mat P = sample_noise(RectPoissonNoise{1.0}, 1200, 2000, rng);
    CHECK(std::abs(P.squaredNorm() / 1200 - 1) < 0.05);
    const Mat A = sample_noise(FromLawNoise{SingularLaw::atomic(0.6, {1.0}, {1.0})}, 30, 50, rng);
    for (double s : singular_values(A)) CHECK(std::abs(s - 1) < 1e-10);
  }

  TEST_CASE("rect-poisson Frobenius mean by brute force") {
    // E|sum_k u_k v_k^T|^2 = n for n unit rank-one terms; averaged over many small draws
    Rng rng(6);
    const int n = 50, m = 80, reps = 400;
    double acc = 0;
    for (int r = 0; r < reps; ++r) acc += sample_noise(RectPoissonNoise{1.0}, n, m, rng).squaredNorm() / n;
    CHECK(std::abs(acc / reps - 1) < 0.02);
    // c = 2 uses round(2n) terms
    double acc2 = 0;
    for (int r = 0; r < 50; ++r) acc2 += sample_noise(RectPoissonNoise{2.0}, n, m, rng).squaredNorm() / n;
    CHECK(std::abs(acc2 / 50 - 2) < 0.1);
  }

  TEST_CASE("from-law noise keeps the drawn singular values") {
    Rng rng(7);
    const auto law = SingularLaw::atomic(0.5, {0.5, 1.2}, {0.5, 0.5});
    const Mat Z = sample_noise(FromLawNoise{law}, 20, 40, rng);
    auto s = singular_values(Z);
    int lo = 0, hi = 0;
    for (double x : s) {
      if (std::abs(x - 0.5) < 1e-10) ++lo;
      if (std::abs(x - 1.2) < 1e-10) ++hi;
    }
    CHECK(lo + hi == 20);
    // rotations leave the spectrum unchanged
    const Mat L = haar_orthonormal(20, 20, rng), R = haar_orthonormal(40, 40, rng);
    auto s2 = singular_values(L * Z * R.transpose());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s[i] - s2[i]) < 1e-10);
  }

  TEST_CASE("inverse CDF samples follow the analytic law") {
    Rng rng(8);
    const auto g = SingularLaw::gaussian(0.6);
    const auto s = sample_singular_values(g, 20000, rng);
    double m2 = 0, m4 = 0;
    for (double x : s) {
      m2 += x * x;
      m4 += x * x * x * x;
    }
    CHECK(std::abs(m2 / s.size() - 1) < 0.02);
    CHECK(std::abs(m4 / s.size() - 1.6) < 0.05);
    for (double x : s) CHECK(x <= g.edge().gamma_bar + 1e-9);
  }

  TEST_CASE("empirical rect-poisson law reproduces the closed-form transform") {
    Rng rng(9);
    const double a = 0.6;
    const auto ref = SingularLaw::rect_poisson(a, 1.0);
    const Mat Z = sample_noise(RectPoissonNoise{1.0}, 2000, 3333, rng);
    const auto emp = SingularLaw::empirical(a, singular_values(Z));
    for (double z = 0.02; z <= 0.4 + 1e-12; z += 0.02) CHECK(std::abs(rect_r(emp, z) - rect_r(ref, z)) < 0.02);
    const auto quant = SingularLaw::empirical(a, sample_singular_values(ref, 2000, rng));
    for (double z = 0.02; z <= 0.4 + 1e-12; z += 0.02) CHECK(std::abs(rect_r(quant, z) - rect_r(ref, z)) < 0.02);
  }

  TEST_CASE("instances") {
    const auto i0 = build_instance(0.0, GaussianNoise{}, 30, 50, 11);
    CHECK(i0.Y == noise_of(i0));
    CHECK(std::abs(i0.u_star.squaredNorm() - 30) < 1e-9);
    CHECK(std::abs(i0.v_star.squaredNorm() - 50) < 1e-9);

    const auto i1 = build_instance(3.0, RectPoissonNoise{1.0}, 30, 50, 12);
    Rng rng(12);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(i1.Y - noise_of(i1)));
    CHECK(svd.singularValues()(0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(svd.singularValues()(1) < 1e-10);

    const auto again = build_instance(3.0, RectPoissonNoise{1.0}, 30, 50, 12);
    CHECK(again.Y == i1.Y);
    CHECK(again.u_star == i1.u_star);
    CHECK(build_instance(3.0, RectPoissonNoise{1.0}, 30, 50, 13).Y != i1.Y);
    CHECK_THROWS_AS(build_instance(-1.0, GaussianNoise{}, 30, 50, 1), DomainError);
    CHECK_THROWS_AS(build_instance(1.0, GaussianNoise{}, 50, 30, 1), DomainError);
  }

  TEST_CASE("metrics") {
    const auto inst = build_instance(2.0, GaussianNoise{}, 20, 30, 21);
    const Mat truth = inst.u_star * inst.v_star.transpose();
    CHECK(mse_of(truth, inst) == doctest::Approx(0.0).epsilon(1e-14).scale(1));
    CHECK(mse_of(Mat::Zero(20, 30), inst) == doctest::Approx(0.5));
    CHECK(mse_of(-truth, inst) == doctest::Approx(2.0));
    CHECK(mse_rank_one(inst.u_star, inst.v_star, inst) == doctest::Approx(0.0).scale(1));
    CHECK(mse_rank_one(-inst.u_star, inst.v_star, inst) == doctest::Approx(2.0));
    Rng rng(1);
    const Vec u = normal_vector(rng, 20), v = normal_vector(rng, 30);
    CHECK(mse_rank_one(u, v, inst) == doctest::Approx(mse_of(u * v.transpose(), inst)).epsilon(1e-12));
    CHECK_THROWS_AS(mse_of(Mat::Zero(3, 3), inst), DomainError);

    CHECK(overlap_of(inst.u_star, inst.v_star, inst) == doctest::Approx(1.0));
    CHECK(overlap_of(-inst.u_star, inst.v_star, inst) == doctest::Approx(1.0));
    CHECK(overlap_of(Vec::Zero(20), inst.v_star, inst) == 0.0);
    CHECK(overlap_of(u, v, inst) == doctest::Approx(std::abs(u.dot(inst.u_star) * v.dot(inst.v_star)) /
                                                   (u.norm() * v.norm() * std::sqrt(20.0 * 30.0))));
  }

  TEST_CASE("seed derivation") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 5) == derive_seed(1, 5));
    CHECK(trial_seed(1, 0, 1) != trial_seed(1, 1, 0));
    Rng a(derive_seed(9, 3)), b(derive_seed(9, 3));
    CHECK(normal_vector(a, 10) == normal_vector(b, 10));
  }
}
