#include "lcvar/palm.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "lcvar/csv.hpp"
#include "lcvar/proximal.hpp"

namespace lcvar {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::monotonicity_violation: return "monotonicity_violation";
  }
  return "?";
}

namespace {

void validate_config(const PalmConfig& config) {
  if (!(config.gamma1 > 1.0) || !(config.gamma2 > 1.0)) {
    throw std::invalid_argument("PalmConfig: gamma1 and gamma2 must be > 1");
  }
  if (config.max_iters < 1) throw std::invalid_argument("PalmConfig: max_iters must be >= 1");
  if (!(config.tol_step > 0.0)) throw std::invalid_argument("PalmConfig: tol_step must be > 0");
}

// Ridge least-squares start: D C^T (C C^T + eps I)^{-1}.
Eigen::MatrixXd ridge_init(const ProblemSpec& spec) {
  Eigen::MatrixXd gram = spec.c * spec.c.transpose();
  double eps = 1e-6 * gram.trace() / spec.p();
  if (!(eps > 0.0)) eps = 1e-6;
  gram.diagonal().array() += eps;
  return gram.llt().solve(spec.c * spec.d.transpose()).transpose();
}

bool record_this_iter(int iter) {
  return iter <= 1000 || iter % 10 == 0;
}

}  // namespace

double sufficient_decrease_margin(const IterateState& prev, const IterateState& next,
                                  double q1_minus, double q2_minus, const PalmConfig& config) {
  double delta = std::min((config.gamma1 - 1.0) * q1_minus, (config.gamma2 - 1.0) * q2_minus);
  double step_sq = next.e_x * next.e_x + next.e_y * next.e_y;
  return prev.phi - next.phi - 0.5 * delta * step_sq;
}

SolveReport palm_solve(const ProblemSpec& spec, const Constraint& constraint,
                       const PalmConfig& config,
                       const std::optional<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& init) {
  validate(spec);
  validate_config(config);
  constraint.validate_for_dimension(spec.p());
  const auto t_start = std::chrono::steady_clock::now();

  Eigen::MatrixXd x, y;
  if (init) {
    x = init->first;
    y = init->second;
    if (x.rows() != spec.p() || x.cols() != spec.p() || y.rows() != spec.p() ||
        y.cols() != spec.p()) {
      throw std::invalid_argument("palm_solve: init matrices must be p x p");
    }
  } else {
    x = ridge_init(spec);
    y = prox_y(x, 1.0, constraint);
  }

  const bool use_woodbury = spec.p() > spec.c.cols();
  const int p = spec.p();
  const Eigen::MatrixXd q_minus_s = spec.q - spec.s_cov;

  SolveReport report;
  report.initial_phi = f_value(spec, x) + h_value(spec, x, y);
  if (!std::isfinite(report.initial_phi)) {
    throw std::runtime_error("palm_solve: initial objective is not finite");
  }
  double phi_prev = report.initial_phi;
  double q1_minus = std::numeric_limits<double>::infinity();
  double q2_minus = std::numeric_limits<double>::infinity();
  report.delta_min = std::numeric_limits<double>::infinity();
  report.status = SolveStatus::max_iters;

  IterateState prev_state;  // only phi is used before the first step
  prev_state.phi = phi_prev;

  // S is symmetric (validated above), which collapses the transposes in the
  // gradient and Lipschitz formulas; YS and X^{k+1}S are shared between the
  // Lipschitz constant, the partial gradient, and the next objective value.
  Eigen::MatrixXd ys = y * spec.s_cov;

  for (int k = 0; k < config.max_iters; ++k) {
    // X-update around the linearized coupling at (X^k, Y^k):
    //   L1 = ||rho1 (YS)^T YS + mu Y^T Y + rho2 I||_F
    //   grad_X H = X (rho1 (YS)^T YS + mu Y^T Y) + rho1 (Q-S) YS + rho2 (X-Y)
    Eigen::MatrixXd m1 = spec.rho1 * ys.transpose() * ys;
    if (spec.mu > 0.0) m1 += spec.mu * y.transpose() * y;
    double lip1 = (m1 + spec.rho2 * Eigen::MatrixXd::Identity(p, p)).norm();
    double c_k = config.gamma1 * lip1;
    q1_minus = std::min(q1_minus, lip1);
    Eigen::MatrixXd grad_x = x * m1 + spec.rho1 * q_minus_s * ys + spec.rho2 * (x - y);
    Eigen::MatrixXd u = x - grad_x / c_k;
    Eigen::MatrixXd x_next =
        use_woodbury ? prox_x_woodbury(spec, u, c_k) : prox_x_direct(spec, u, c_k);

    // Y-update around the linearization at (X^{k+1}, Y^k).
    Eigen::MatrixXd xs = x_next * spec.s_cov;
    Eigen::MatrixXd m2 = spec.rho1 * xs.transpose() * xs;
    if (spec.mu > 0.0) m2 += spec.mu * x_next.transpose() * x_next;
    double lip2 = (m2 + spec.rho2 * Eigen::MatrixXd::Identity(p, p)).norm();
    double d_k = config.gamma2 * lip2;
    q2_minus = std::min(q2_minus, lip2);
    Eigen::MatrixXd grad_y = y * m2 + spec.rho1 * q_minus_s * xs + spec.rho2 * (y - x_next);
    Eigen::MatrixXd v = y - grad_y / d_k;
    Eigen::MatrixXd y_next = prox_y(v, d_k, constraint);

    ys = y_next * spec.s_cov;
    double phi = 0.5 * (x_next * spec.c - spec.d).squaredNorm() +
                 0.5 * spec.rho1 * (ys * x_next.transpose() + q_minus_s).squaredNorm() +
                 0.5 * spec.rho2 * (x_next - y_next).squaredNorm();
    if (spec.mu > 0.0) phi += 0.5 * spec.mu * (y_next * x_next.transpose()).squaredNorm();
    if (!std::isfinite(phi) || !x_next.allFinite() || !y_next.allFinite()) {
      throw std::runtime_error("palm_solve: non-finite iterate at step " + std::to_string(k));
    }
    if (!constraint.is_feasible(y_next)) {
      throw std::runtime_error("palm_solve: projected Y infeasible at step " +
                               std::to_string(k) + " (projection bug)");
    }

    IterateState state;
    state.iter = k + 1;
    state.phi = phi;
    state.e_x = (x_next - x).norm();
    state.e_y = (y_next - y).norm();
    state.e_xy = (x_next - y_next).norm();
    state.c_k = c_k;
    state.d_k = d_k;

    double margin = sufficient_decrease_margin(prev_state, state, q1_minus, q2_minus, config);
    report.delta_min = std::min(report.delta_min, margin);

    x = std::move(x_next);
    y = std::move(y_next);

    bool violated = config.assert_monotone && (phi - phi_prev) > 1e-9 * (1.0 + std::abs(phi_prev));
    bool converged = std::max(state.e_x, state.e_y) <= config.tol_step;
    bool last = violated || converged || k + 1 == config.max_iters;
    if (record_this_iter(state.iter) || last) report.trace.push_back(state);
    report.iters = state.iter;
    phi_prev = phi;
    prev_state = state;

    if (violated) {
      report.status = SolveStatus::monotonicity_violation;
      break;
    }
    if (converged) {
      report.status = SolveStatus::converged;
      break;
    }
  }

  report.estimate = y;
  report.x_final = x;
  report.final_phi = phi_prev;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

void write_trace_csv(const std::string& path, const SolveReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open '" + path + "'");
  out << "iter,phi,e_x,e_y,e_xy,c_k,d_k\n";
  for (const IterateState& s : report.trace) {
    out << s.iter << ',' << format_double(s.phi) << ',' << format_double(s.e_x) << ','
        << format_double(s.e_y) << ',' << format_double(s.e_xy) << ','
        << format_double(s.c_k) << ',' << format_double(s.d_k) << '\n';
  }
  if (!out) throw std::runtime_error("write_trace_csv: write to '" + path + "' failed");
}

}  // namespace lcvar
