#include "lcvar/objective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lcvar {

namespace {

double sym_violation(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).norm() / std::max(1.0, m.norm());
}

void require_x_shape(const ProblemSpec& spec, const Eigen::MatrixXd& x, const char* who) {
  if (x.rows() != spec.p() || x.cols() != spec.p()) {
    throw std::invalid_argument(std::string(who) + ": X must be p x p");
  }
}

}  // namespace

void validate(const ProblemSpec& spec) {
  const int p = spec.p();
  if (p < 1 || spec.s_cov.cols() != p) {
    throw std::invalid_argument("ProblemSpec: S must be square and nonempty");
  }
  if (spec.q.rows() != p || spec.q.cols() != p) {
    throw std::invalid_argument("ProblemSpec: Q must be p x p");
  }
  if (spec.c.rows() != p || spec.d.rows() != p || spec.c.cols() != spec.d.cols()) {
    throw std::invalid_argument("ProblemSpec: C and D must be p x (n-1) with equal shape");
  }
  if (spec.c.cols() < 1) {
    throw std::invalid_argument("ProblemSpec: C and D are empty (time series too short)");
  }
  if (sym_violation(spec.s_cov) > 1e-12) {
    throw std::invalid_argument("ProblemSpec: S is not symmetric within tolerance");
  }
  if (sym_violation(spec.q) > 1e-12) {
    throw std::invalid_argument("ProblemSpec: Q is not symmetric within tolerance");
  }
  if (spec.rho1 < 0.0 || !(spec.rho2 > 0.0) || spec.mu < 0.0) {
    throw std::invalid_argument("ProblemSpec: need rho1 >= 0, rho2 > 0, mu >= 0");
  }
}

double default_rho2(double rho1, const Eigen::MatrixXd& s_cov) {
  return rho1 * s_cov.squaredNorm();
}

double f_value(const ProblemSpec& spec, const Eigen::MatrixXd& x) {
  require_x_shape(spec, x, "f_value");
  return 0.5 * (x * spec.c - spec.d).squaredNorm();
}

double h_value(const ProblemSpec& spec, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  require_x_shape(spec, x, "h_value");
  require_x_shape(spec, y, "h_value");
  double v = 0.5 * spec.rho1 * (y * spec.s_cov * x.transpose() + spec.q - spec.s_cov).squaredNorm() +
             0.5 * spec.rho2 * (x - y).squaredNorm();
  if (spec.mu > 0.0) v += 0.5 * spec.mu * (y * x.transpose()).squaredNorm();
  return v;
}

double phi_value(const ProblemSpec& spec, const Constraint& constraint,
                 const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (!constraint.is_feasible(y)) return std::numeric_limits<double>::infinity();
  return f_value(spec, x) + h_value(spec, x, y);
}

Eigen::MatrixXd grad_x_h(const ProblemSpec& spec, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y) {
  require_x_shape(spec, x, "grad_x_h");
  require_x_shape(spec, y, "grad_x_h");
  Eigen::MatrixXd ys = y * spec.s_cov;
  Eigen::MatrixXd g = spec.rho1 * (x * spec.s_cov.transpose() * y.transpose() * ys +
                                   (spec.q - spec.s_cov).transpose() * ys) +
                      spec.rho2 * (x - y);
  if (spec.mu > 0.0) g += spec.mu * x * y.transpose() * y;
  return g;
}

Eigen::MatrixXd grad_y_h(const ProblemSpec& spec, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y) {
  require_x_shape(spec, x, "grad_y_h");
  require_x_shape(spec, y, "grad_y_h");
  Eigen::MatrixXd xst = x * spec.s_cov.transpose();
  Eigen::MatrixXd g = spec.rho1 * (y * spec.s_cov * x.transpose() * xst +
                                   (spec.q - spec.s_cov) * xst) +
                      spec.rho2 * (y - x);
  if (spec.mu > 0.0) g += spec.mu * y * x.transpose() * x;
  return g;
}

double lipschitz_x(const ProblemSpec& spec, const Eigen::MatrixXd& y) {
  require_x_shape(spec, y, "lipschitz_x");
  Eigen::MatrixXd ys = y * spec.s_cov;
  Eigen::MatrixXd m = spec.rho1 * ys.transpose() * ys;
  if (spec.mu > 0.0) m += spec.mu * y.transpose() * y;
  m.diagonal().array() += spec.rho2;
  return m.norm();
}

double lipschitz_y(const ProblemSpec& spec, const Eigen::MatrixXd& x) {
  require_x_shape(spec, x, "lipschitz_y");
  Eigen::MatrixXd xst = x * spec.s_cov.transpose();
  Eigen::MatrixXd m = spec.rho1 * xst.transpose() * xst;
  if (spec.mu > 0.0) m += spec.mu * x.transpose() * x;
  m.diagonal().array() += spec.rho2;
  return m.norm();
}

double full_objective(const ProblemSpec& spec, const Eigen::MatrixXd& x) {
  require_x_shape(spec, x, "full_objective");
  double v = 0.5 * (x * spec.c - spec.d).squaredNorm() +
             0.5 * spec.rho1 *
                 (x * spec.s_cov * x.transpose() + spec.q - spec.s_cov).squaredNorm();
  if (spec.mu > 0.0) v += 0.5 * spec.mu * (x * x.transpose()).squaredNorm();
  return v;
}

Eigen::MatrixXd full_gradient(const ProblemSpec& spec, const Eigen::MatrixXd& x) {
  require_x_shape(spec, x, "full_gradient");
  // The 2 rho1 R X S form collapses R X S^T + R^T X S and is valid only for
  // symmetric S and Q; asymmetric inputs signal an upstream bug.
  if (sym_violation(spec.s_cov) > 1e-12 || sym_violation(spec.q) > 1e-12) {
    throw std::invalid_argument(
        "full_gradient: S and Q must be symmetric for the simplified gradient");
  }
  Eigen::MatrixXd r = x * spec.s_cov * x.transpose() + spec.q - spec.s_cov;
  Eigen::MatrixXd g = (x * spec.c - spec.d) * spec.c.transpose() +
                      2.0 * spec.rho1 * r * x * spec.s_cov;
  if (spec.mu > 0.0) g += 2.0 * spec.mu * (x * x.transpose()) * x;
  return g;
}

}  // namespace lcvar
