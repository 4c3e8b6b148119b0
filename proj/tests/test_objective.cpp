#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "lcvar/objective.hpp"
#include "oracles.hpp"

using Eigen::MatrixXd;
using namespace lcvar;

namespace {

ProblemSpec random_spec(int p, int n, std::uint64_t seed, double rho1 = 0.7,
                        double rho2 = 1.3, double mu = 0.0) {
  ProblemSpec s;
  s.c = oracle::random_matrix(p, n - 1, seed);
  s.d = oracle::random_matrix(p, n - 1, seed + 1);
  s.s_cov = oracle::random_spd(p, seed + 2);
  s.q = oracle::random_spd(p, seed + 3, 0.5);
  s.rho1 = rho1;
  s.rho2 = rho2;
  s.mu = mu;
  return s;
}

}  // namespace

TEST_CASE("validate rejects bad specs") {
  ProblemSpec s = random_spec(3, 5, 1);
  CHECK_NOTHROW(validate(s));
  ProblemSpec bad = s;
  bad.rho2 = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = s;
  bad.q(0, 1) += 1.0;  // asymmetric
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = s;
  bad.d = MatrixXd::Zero(3, 2);  // shape mismatch with c
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("f_value") {
  ProblemSpec s = random_spec(3, 4, 2);
  SUBCASE("zeros") {
    s.d.setZero();
    CHECK(f_value(s, MatrixXd::Zero(3, 3)) == 0.0);
  }
  SUBCASE("exact fit when C = I and X = D") {
    ProblemSpec id = s;
    id.c = MatrixXd::Identity(3, 3);
    id.d = oracle::random_matrix(3, 3, 4);
    CHECK(f_value(id, id.d) == 0.0);
  }
  SUBCASE("matches the naive double-loop oracle") {
    MatrixXd x = oracle::random_matrix(3, 3, 5);
    double naive = oracle::least_squares_naive(x, s.c, s.d);
    CHECK(f_value(s, x) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("h_value") {
  SUBCASE("vanishes when X = Y = 0 and Q = S") {
    ProblemSpec s = random_spec(3, 4, 6);
    s.q = s.s_cov;
    CHECK(h_value(s, MatrixXd::Zero(3, 3), MatrixXd::Zero(3, 3)) == 0.0);
  }
  SUBCASE("X = Y with S = Q = I reduces to the stability penalty form") {
    ProblemSpec s = random_spec(3, 4, 7);
    s.s_cov = MatrixXd::Identity(3, 3);
    s.q = MatrixXd::Identity(3, 3);
    s.mu = 0.0;
    MatrixXd x = oracle::random_matrix(3, 3, 8);
    CHECK(h_value(s, x, x) ==
          doctest::Approx(0.5 * s.rho1 * (x * x.transpose()).squaredNorm()).epsilon(1e-12));
  }
  SUBCASE("matches a naive evaluation, including the mu term") {
    ProblemSpec s = random_spec(3, 4, 9, 0.7, 1.3, 0.4);
    MatrixXd x = oracle::random_matrix(3, 3, 10);
    MatrixXd y = oracle::random_matrix(3, 3, 11);
    double naive =
        0.5 * s.rho1 *
            oracle::frobenius_sq_naive(y * s.s_cov * x.transpose() + s.q - s.s_cov) +
        0.5 * s.rho2 * oracle::frobenius_sq_naive(x - y) +
        0.5 * s.mu * oracle::frobenius_sq_naive(y * x.transpose());
    CHECK(h_value(s, x, y) == doctest::Approx(naive).epsilon(1e-12));
  }
  SUBCASE("h(x,x) without the coupling term equals the single-variable penalty") {
    ProblemSpec s = random_spec(4, 5, 12, 0.9, 2.0, 0.3);
    MatrixXd x = oracle::random_matrix(4, 4, 13);
    double expected = full_objective(s, x) - f_value(s, x);
    CHECK(h_value(s, x, x) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("phi_value and feasibility") {
  ProblemSpec s = random_spec(3, 4, 14);
  MatrixXd x = oracle::random_matrix(3, 3, 15);
  SUBCASE("feasible Y gives f + H") {
    MatrixXd y = oracle::random_matrix(3, 3, 16);
    Constraint all = Constraint::cardinality(9);
    CHECK(phi_value(s, all, x, y) ==
          doctest::Approx(f_value(s, x) + h_value(s, x, y)).epsilon(1e-14));
  }
  SUBCASE("infeasible Y gives +infinity") {
    MatrixXd y = MatrixXd::Ones(3, 3);  // 9 nonzeros
    CHECK(std::isinf(phi_value(s, Constraint::cardinality(8), x, y)));
  }
  SUBCASE("rank boundary is feasible") {
    MatrixXd y = oracle::random_rank_r(3, 2, 17, 1.0);
    CHECK(std::isfinite(phi_value(s, Constraint::rank(2), x, y)));
  }
}

TEST_CASE("partial gradients match finite differences") {
  int checked = 0;
  for (int p : {3, 6}) {
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      double mu = (trial % 2 == 0) ? 0.0 : 0.35;
      ProblemSpec s = random_spec(p, p + 2, 100 * p + trial, 0.8, 1.7, mu);
      MatrixXd x = oracle::random_matrix(p, p, 1000 + trial);
      MatrixXd y = oracle::random_matrix(p, p, 2000 + trial);

      MatrixXd gx = grad_x_h(s, x, y);
      MatrixXd gx_fd =
          oracle::fd_gradient([&](const MatrixXd& m) { return h_value(s, m, y); }, x);
      CHECK((gx - gx_fd).norm() / gx.norm() <= 1e-6);

      MatrixXd gy = grad_y_h(s, x, y);
      MatrixXd gy_fd =
          oracle::fd_gradient([&](const MatrixXd& m) { return h_value(s, x, m); }, y);
      CHECK((gy - gy_fd).norm() / gy.norm() <= 1e-6);
      ++checked;
    }
  }
  CHECK(checked == 20);
}

TEST_CASE("degenerate gradient cases") {
  ProblemSpec s = random_spec(3, 4, 20, 0.7, 1.3, 0.0);
  MatrixXd z = MatrixXd::Zero(3, 3);
  CHECK(grad_x_h(s, z, z).norm() == 0.0);
  CHECK(grad_y_h(s, z, z).norm() == 0.0);
  MatrixXd x = oracle::random_matrix(3, 3, 21);
  // With Y = 0 only the coupling term survives in grad_x.
  CHECK((grad_x_h(s, x, z) - s.rho2 * x).norm() == 0.0);
  MatrixXd y = oracle::random_matrix(3, 3, 22);
  CHECK((grad_y_h(s, z, y) - s.rho2 * y).norm() == 0.0);
}

TEST_CASE("Lipschitz constants") {
  SUBCASE("Y = 0 gives rho2 sqrt(p)") {
    ProblemSpec s = random_spec(4, 5, 23, 0.7, 1.3, 0.0);
    CHECK(lipschitz_x(s, MatrixXd::Zero(4, 4)) ==
          doctest::Approx(s.rho2 * 2.0).epsilon(1e-14));
    CHECK(lipschitz_y(s, MatrixXd::Zero(4, 4)) ==
          doctest::Approx(s.rho2 * 2.0).epsilon(1e-14));
  }
  SUBCASE("always at least rho2") {
    for (std::uint64_t t = 0; t < 20; ++t) {
      ProblemSpec s = random_spec(5, 6, 30 + t, 0.5, 2.2, t % 2 ? 0.4 : 0.0);
      MatrixXd m = oracle::random_matrix(5, 5, 60 + t, 2.0);
      CHECK(lipschitz_x(s, m) >= s.rho2);
      CHECK(lipschitz_y(s, m) >= s.rho2);
    }
  }
  SUBCASE("empirical Lipschitz inequality over 100 random pairs") {
    ProblemSpec s = random_spec(3, 4, 80, 0.9, 1.1, 0.2);
    for (std::uint64_t t = 0; t < 100; ++t) {
      MatrixXd y = oracle::random_matrix(3, 3, 300 + t);
      MatrixXd x1 = oracle::random_matrix(3, 3, 500 + t);
      MatrixXd x2 = oracle::random_matrix(3, 3, 700 + t);
      double lhs = (grad_x_h(s, x1, y) - grad_x_h(s, x2, y)).norm();
      CHECK(lhs <= lipschitz_x(s, y) * (x1 - x2).norm() * (1.0 + 1e-12));

      MatrixXd x = oracle::random_matrix(3, 3, 900 + t);
      double lhs2 = (grad_y_h(s, x, x1) - grad_y_h(s, x, x2)).norm();
      CHECK(lhs2 <= lipschitz_y(s, x) * (x1 - x2).norm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("full objective and gradient") {
  SUBCASE("zero at the trivial point") {
    ProblemSpec s = random_spec(3, 4, 40);
    s.q = s.s_cov;
    s.d.setZero();
    CHECK(full_objective(s, MatrixXd::Zero(3, 3)) == 0.0);
    CHECK(full_gradient(s, MatrixXd::Zero(3, 3)).norm() == 0.0);
  }
  SUBCASE("finite-difference check, p = 4, with and without mu") {
    for (std::uint64_t t = 0; t < 6; ++t) {
      ProblemSpec s = random_spec(4, 6, 50 + t, 0.6, 1.0, t % 2 ? 0.25 : 0.0);
      MatrixXd x = oracle::random_matrix(4, 4, 70 + t);
      MatrixXd g = full_gradient(s, x);
      MatrixXd g_fd =
          oracle::fd_gradient([&](const MatrixXd& m) { return full_objective(s, m); }, x);
      CHECK((g - g_fd).norm() / g.norm() <= 1e-6);
    }
  }
  SUBCASE("asymmetric S is rejected by the simplified gradient") {
    ProblemSpec s = random_spec(3, 4, 60);
    s.s_cov(0, 1) += 1.0;
    CHECK_THROWS_AS(full_gradient(s, MatrixXd::Identity(3, 3)), std::invalid_argument);
  }
}
