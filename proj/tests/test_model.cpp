#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "lcvar/constraint.hpp"
#include "lcvar/model.hpp"
#include "oracles.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace lcvar;

TEST_CASE("spectral_radius on known matrices") {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = -1.0;
  CHECK(spectral_radius(d) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(spectral_radius(MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
  // 2x2 rotation scaled by 0.7: complex pair with modulus 0.7.
  MatrixXd rot(2, 2);
  rot << 0.0, -0.7, 0.7, 0.0;
  CHECK(spectral_radius(rot) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("VarModel validates Q") {
  MatrixXd a = MatrixXd::Zero(3, 3);
  CHECK_NOTHROW(VarModel(a, MatrixXd::Identity(3, 3)));
  MatrixXd asym = MatrixXd::Identity(3, 3);
  asym(0, 1) = 0.5;  // not symmetric
  CHECK_THROWS_AS(VarModel(a, asym), std::invalid_argument);
  MatrixXd neg = -MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(VarModel(a, neg), std::invalid_argument);
}

TEST_CASE("TimeSeriesData shapes and blocks") {
  MatrixXd states(2, 4);
  states << 1, 2, 3, 4, 5, 6, 7, 8;
  TimeSeriesData ts(states);
  CHECK(ts.n() == 4);
  CHECK(ts.lagged().cols() == 3);
  CHECK(ts.led().cols() == 3);
  CHECK(ts.lagged()(0, 0) == 1.0);
  CHECK(ts.led()(0, 2) == 4.0);
  CHECK_THROWS_AS(TimeSeriesData(MatrixXd::Zero(2, 1)), std::invalid_argument);
}

TEST_CASE("generate_sparse_stable: cardinality and radius") {
  SUBCASE("dense 3x3 with radius 0.5") {
    VarModel m = generate_sparse_stable(3, 9, 0.5, 11);
    CHECK(m.spectral_radius() == doctest::Approx(0.5).epsilon(1e-8));
    int nnz = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (m.a(i, j) != 0.0) ++nnz;
    CHECK(nnz == 9);
  }
  SUBCASE("p=5 nnz=5 radius checked by subspace-iteration oracle") {
    VarModel m = generate_sparse_stable(5, 5, 0.9, 42);
    double tau_oracle = oracle::spectral_radius_subspace(m.a);
    CHECK(tau_oracle == doctest::Approx(0.9).epsilon(1e-8));
  }
  SUBCASE("requested support size is exact") {
    VarModel m = generate_sparse_stable(12, 37, 0.8, 3);
    int nnz = 0;
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        if (m.a(i, j) != 0.0) ++nnz;
    CHECK(nnz == 37);
    CHECK(m.spectral_radius() == doctest::Approx(0.8).epsilon(1e-8));
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(generate_sparse_stable(3, 0, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_sparse_stable(3, 10, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_sparse_stable(3, 3, 1.0, 1), std::invalid_argument);
  }
  SUBCASE("bit-reproducible given seed") {
    VarModel m1 = generate_sparse_stable(6, 10, 0.7, 99);
    VarModel m2 = generate_sparse_stable(6, 10, 0.7, 99);
    CHECK((m1.a - m2.a).norm() == 0.0);
  }
}

TEST_CASE("generate_lowrank_stable: rank and stability") {
  SUBCASE("rank via the Gram-eigenvalue oracle") {
    VarModel m = generate_lowrank_stable(10, 3, 5);
    // Threshold in the squared domain: the Gram route only resolves sigma
    // down to sqrt(eps) * sigma_max, but sigma^2 is resolved to eps.
    Eigen::VectorXd sv_sq = oracle::singular_values_sq_gram(m.a);
    int rank = 0;
    for (int i = 0; i < sv_sq.size(); ++i)
      if (sv_sq(i) > 1e-12 * sv_sq(0)) ++rank;
    CHECK(rank == 3);
    CHECK(numerical_rank(m.a) == 3);
    CHECK(m.spectral_radius() < 1.0);
  }
  SUBCASE("full-rank case keeps all singular values in [0,1)") {
    VarModel m = generate_lowrank_stable(4, 4, 17);
    Eigen::JacobiSVD<MatrixXd> svd(m.a);
    CHECK(svd.singularValues().maxCoeff() < 1.0);
    CHECK(svd.singularValues().minCoeff() >= 0.0);
  }
  SUBCASE("stable for many seeds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      VarModel m = generate_lowrank_stable(8, 4, seed);
      CHECK(m.stable());
    }
  }
}

TEST_CASE("rescale_to_stable") {
  CHECK((rescale_to_stable(MatrixXd::Identity(3, 3)) -
         0.5 * MatrixXd::Identity(3, 3)).norm() == doctest::Approx(0.0));
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 1.0;
  MatrixXd r = rescale_to_stable(d);
  CHECK(r(0, 0) == doctest::Approx(0.5));
  CHECK(r(1, 1) == doctest::Approx(0.125));

  MatrixXd rnd = oracle::random_matrix(5, 5, 21);
  CHECK(spectral_radius(rescale_to_stable(rnd)) == doctest::Approx(0.5).epsilon(1e-10));

  MatrixXd nil(2, 2);
  nil << 0, 1, 0, 0;
  CHECK_THROWS_AS(rescale_to_stable(nil), std::runtime_error);
}

TEST_CASE("discretize (matrix exponential)") {
  CHECK((discretize(MatrixXd::Zero(3, 3)) - MatrixXd::Identity(3, 3)).norm() ==
        doctest::Approx(0.0));

  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = std::log(2.0);
  d(1, 1) = std::log(3.0);
  MatrixXd e = discretize(d, 1.0);
  CHECK(e(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(e(0, 1)) < 1e-14);

  MatrixXd nil(2, 2);
  nil << 0, 1, 0, 0;
  MatrixXd en = discretize(nil);
  CHECK(en(0, 0) == doctest::Approx(1.0));
  CHECK(en(0, 1) == doctest::Approx(1.0));
  CHECK(en(1, 0) == doctest::Approx(0.0));
  CHECK(en(1, 1) == doctest::Approx(1.0));

  SUBCASE("semigroup: exp(M) exp(-M) = I") {
    MatrixXd m = oracle::random_matrix(6, 6, 31);
    CHECK((discretize(m) * discretize(-m) - MatrixXd::Identity(6, 6)).norm() < 1e-8);
  }
  SUBCASE("commuting inputs: exp(M1) exp(M2) = exp(M1 + M2)") {
    MatrixXd m = oracle::random_matrix(4, 4, 32);
    MatrixXd m2 = 2.0 * m + MatrixXd::Identity(4, 4);  // commutes with m
    CHECK((discretize(m) * discretize(m2) - discretize(m + m2)).norm() < 1e-8);
  }
  SUBCASE("dt scaling") {
    MatrixXd m = oracle::random_matrix(3, 3, 33);
    CHECK((discretize(m, 0.5) * discretize(m, 0.5) - discretize(m, 1.0)).norm() < 1e-10);
  }
}

TEST_CASE("simulate") {
  SUBCASE("noiseless geometric decay") {
    VarModel m(0.5 * MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3));
    TimeSeriesData ts = simulate(m, VectorXd::Ones(3), 3, 0.0, 0);
    CHECK((ts.states.col(0) - VectorXd::Ones(3)).norm() == 0.0);
    CHECK((ts.states.col(1) - 0.5 * VectorXd::Ones(3)).norm() == 0.0);
    CHECK((ts.states.col(2) - 0.25 * VectorXd::Ones(3)).norm() == 0.0);
  }
  SUBCASE("noiseless recurrence identity for arbitrary A") {
    VarModel m(oracle::random_matrix(4, 4, 55), MatrixXd::Identity(4, 4));
    TimeSeriesData ts = simulate(m, VectorXd::Ones(4), 6, 0.0, 0);
    for (int t = 0; t + 1 < 6; ++t) {
      CHECK((ts.states.col(t + 1) - m.a * ts.states.col(t)).norm() == 0.0);
    }
  }
  SUBCASE("residual covariance matches the noise level") {
    VarModel m(0.5 * MatrixXd::Identity(4, 4), MatrixXd::Identity(4, 4));
    const double sigma = 0.1;
    TimeSeriesData ts = simulate(m, VectorXd::Zero(4), 4000, sigma, 123);
    MatrixXd resid = ts.led() - m.a * ts.lagged();
    VectorXd diag = (resid * resid.transpose()).diagonal() / double(resid.cols());
    for (int i = 0; i < 4; ++i) {
      CHECK(diag(i) == doctest::Approx(sigma * sigma).epsilon(0.3));
    }
  }
  SUBCASE("deterministic given seed") {
    VarModel m(0.9 * MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2));
    TimeSeriesData a = simulate(m, VectorXd::Zero(2), 50, 1.0, 7);
    TimeSeriesData b = simulate(m, VectorXd::Zero(2), 50, 1.0, 7);
    CHECK((a.states - b.states).norm() == 0.0);
  }
}

TEST_CASE("sample_steady_state") {
  SUBCASE("A=0, Q=I gives iid standard normals") {
    VarModel m(MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3));
    SteadyStateData ss = sample_steady_state(m, 4000, 9);
    MatrixXd s = sample_covariance(ss);
    CHECK((s - MatrixXd::Identity(3, 3)).norm() < 0.2 * std::sqrt(3.0));
  }
  SUBCASE("scalar model variance matches the Lyapunov solution") {
    MatrixXd a(1, 1), q(1, 1);
    a(0, 0) = 0.9;
    q(0, 0) = 1.0;
    VarModel m(a, q);
    SteadyStateData ss = sample_steady_state(m, 2000, 10);
    double var = sample_covariance(ss)(0, 0);
    CHECK(var == doctest::Approx(1.0 / (1.0 - 0.81)).epsilon(0.15));
  }
  SUBCASE("covariance approaches the direct Lyapunov solve") {
    VarModel truth = generate_sparse_stable(5, 12, 0.8, 77);
    SteadyStateData ss = sample_steady_state(truth, 5000, 11);
    MatrixXd s = sample_covariance(ss);
    MatrixXd pcov = solve_lyapunov(truth.a, truth.q);
    CHECK((s - pcov).norm() / pcov.norm() < 0.2);
  }
  SUBCASE("unstable model is rejected with the radius in the message") {
    VarModel m(2.0 * MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2));
    CHECK_THROWS_WITH_AS(sample_steady_state(m, 10, 0),
                         doctest::Contains("spectral radius"), std::invalid_argument);
  }
}

TEST_CASE("sample_covariance") {
  SUBCASE("two scalar samples") {
    MatrixXd z(1, 2);
    z << 0.0, 2.0;
    CHECK(sample_covariance(SteadyStateData(z))(0, 0) == doctest::Approx(2.0));
  }
  SUBCASE("identical samples give zero") {
    MatrixXd z = MatrixXd::Ones(3, 5);
    CHECK(sample_covariance(SteadyStateData(z)).norm() == 0.0);
  }
  SUBCASE("matches the naive double-loop oracle") {
    MatrixXd z = oracle::random_matrix(4, 50, 123);
    MatrixXd s = sample_covariance(SteadyStateData(z));
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    for (int i = 0; i < 50; ++i) mean += z.col(i);
    mean /= 50.0;
    MatrixXd naive = MatrixXd::Zero(4, 4);
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd d = z.col(i) - mean;
      naive += d * d.transpose();
    }
    naive /= 49.0;
    CHECK((s - naive).norm() < 1e-12 * naive.norm());
    CHECK((s - s.transpose()).norm() == 0.0);
  }
}

TEST_CASE("solve_lyapunov") {
  SUBCASE("a = 0 returns Q") {
    MatrixXd q = oracle::random_spd(4, 3);
    CHECK((solve_lyapunov(MatrixXd::Zero(4, 4), q) - q).norm() < 1e-12 * q.norm());
  }
  SUBCASE("scalar closed form") {
    MatrixXd a(1, 1), q(1, 1);
    a(0, 0) = 0.5;
    q(0, 0) = 1.0;
    CHECK(solve_lyapunov(a, q)(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("random stable system satisfies the residual bound") {
    VarModel m = generate_sparse_stable(6, 20, 0.9, 8);
    MatrixXd p = solve_lyapunov(m.a, m.q);
    double resid = (m.a * p * m.a.transpose() + m.q - p).norm();
    CHECK(resid <= 1e-10 * p.norm());
  }
  SUBCASE("kron and doubling backends agree") {
    VarModel m = generate_sparse_stable(30, 200, 0.85, 12);
    MatrixXd p1 = detail::solve_lyapunov_kron(m.a, m.q);
    MatrixXd p2 = detail::solve_lyapunov_doubling(m.a, m.q);
    CHECK((p1 - p2).norm() < 1e-9 * p1.norm());
  }
  SUBCASE("unstable input rejected") {
    CHECK_THROWS_AS(solve_lyapunov(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2)),
                    std::invalid_argument);
  }
}
