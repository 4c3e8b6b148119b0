#pragma once

#include <Eigen/Core>

#include "lcvar/constraint.hpp"

namespace lcvar {

// All fixed data of one identification problem:
//
//   minimize  1/2 ||X C - D||_F^2
//           + rho1/2 ||X S X^T + Q - S||_F^2  (+ mu/2 ||X X^T||_F^2)
//
// and its two-block splitting where Y replaces one X in the quadratic terms,
// coupled by rho2/2 ||X - Y||_F^2.
struct ProblemSpec {
  Eigen::MatrixXd c;      // p x (n-1), lagged states
  Eigen::MatrixXd d;      // p x (n-1), led states
  Eigen::MatrixXd s_cov;  // p x p, steady-state sample covariance S
  Eigen::MatrixXd q;      // p x p, noise covariance (usually sigma^2 I)
  double rho1 = 1.0;      // Lyapunov-penalty weight
  double rho2 = 1.0;      // coupling weight
  double mu = 0.0;        // stability-penalty weight, 0 = off

  int p() const { return static_cast<int>(s_cov.rows()); }
};

// Throws std::invalid_argument when shapes or weights are inconsistent.
// rho1 = 0 switches the Lyapunov penalty off (used by baselines); rho2 must
// be strictly positive, mu nonnegative, s_cov and q symmetric within 1e-12.
void validate(const ProblemSpec& spec);

// rho2 default: rho1 * ||S||_F^2, matching the scale of the Lyapunov term.
double default_rho2(double rho1, const Eigen::MatrixXd& s_cov);

// f(X) = 1/2 ||X C - D||_F^2
double f_value(const ProblemSpec& spec, const Eigen::MatrixXd& x);

// H(X,Y) = rho1/2 ||Y S X^T + Q - S||_F^2 + rho2/2 ||X - Y||_F^2
//        + mu/2 ||Y X^T||_F^2
double h_value(const ProblemSpec& spec, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

// Phi(X,Y) = f + H when Y satisfies the constraint, +infinity otherwise.
double phi_value(const ProblemSpec& spec, const Constraint& constraint,
                 const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

// grad_X H = rho1 (X S^T Y^T Y S + (Q-S)^T Y S) + rho2 (X - Y) + mu X Y^T Y
Eigen::MatrixXd grad_x_h(const ProblemSpec& spec, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y);

// grad_Y H = rho1 (Y S X^T X S^T + (Q-S) X S^T) + rho2 (Y - X) + mu Y X^T X
Eigen::MatrixXd grad_y_h(const ProblemSpec& spec, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y);

// L1(Y) = ||rho1 S^T Y^T Y S + mu Y^T Y + rho2 I||_F; always >= rho2.
double lipschitz_x(const ProblemSpec& spec, const Eigen::MatrixXd& y);

// L2(X) = ||rho1 S X^T X S^T + mu X^T X + rho2 I||_F; always >= rho2.
double lipschitz_y(const ProblemSpec& spec, const Eigen::MatrixXd& x);

// Single-variable objective and gradient used by gradient projection:
//   F(X) = 1/2 ||X C - D||_F^2 + rho1/2 ||X S X^T + Q - S||_F^2
//        + mu/2 ||X X^T||_F^2
//   grad F = (X C - D) C^T + 2 rho1 R X S + 2 mu (X X^T) X,  R = X S X^T + Q - S.
// The simplified gradient requires S and Q symmetric; full_gradient throws
// otherwise (asymmetric inputs signal an upstream pipeline bug).
double full_objective(const ProblemSpec& spec, const Eigen::MatrixXd& x);
Eigen::MatrixXd full_gradient(const ProblemSpec& spec, const Eigen::MatrixXd& x);

}  // namespace lcvar
