#include "lcvar/gp.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lcvar/csv.hpp"
#include "lcvar/proximal.hpp"

namespace lcvar {

std::string to_string(GpStatus status) {
  switch (status) {
    case GpStatus::converged: return "converged";
    case GpStatus::max_iters: return "max_iters";
    case GpStatus::line_search_failed: return "line_search_failed";
  }
  return "?";
}

namespace {

void validate_config(const GpConfig& config) {
  if (!(config.armijo_sigma > 0.0 && config.armijo_sigma < 1.0)) {
    throw std::invalid_argument("GpConfig: armijo_sigma must be in (0,1)");
  }
  if (!(config.armijo_beta > 0.0 && config.armijo_beta < 1.0)) {
    throw std::invalid_argument("GpConfig: armijo_beta must be in (0,1)");
  }
  if (!(config.initial_step > 0.0)) {
    throw std::invalid_argument("GpConfig: initial_step must be > 0");
  }
  if (config.max_backtracks < 0 || config.max_iters < 1) {
    throw std::invalid_argument("GpConfig: bad iteration limits");
  }
  if (!(config.tol_step > 0.0)) throw std::invalid_argument("GpConfig: tol_step must be > 0");
}

Eigen::MatrixXd ridge_init(const ProblemSpec& spec) {
  Eigen::MatrixXd gram = spec.c * spec.c.transpose();
  double eps = 1e-6 * gram.trace() / spec.p();
  if (!(eps > 0.0)) eps = 1e-6;
  gram.diagonal().array() += eps;
  return gram.llt().solve(spec.c * spec.d.transpose()).transpose();
}

}  // namespace

GpReport gp_solve(const ProblemSpec& spec, const Constraint& constraint,
                  const GpConfig& config, const std::optional<Eigen::MatrixXd>& init) {
  validate(spec);
  validate_config(config);
  constraint.validate_for_dimension(spec.p());
  if (!constraint.is_convex()) {
    throw std::invalid_argument(
        "gp_solve: only the convex constraints (l1_ball, nuclear_ball) are supported; "
        "projected gradient has no descent guarantee on " + constraint.describe());
  }
  const auto t_start = std::chrono::steady_clock::now();

  GpReport report;
  long projections = 0;
  auto project = [&](const Eigen::MatrixXd& m) {
    ++projections;
    return prox_y(m, 1.0, constraint);
  };

  Eigen::MatrixXd x;
  if (init) {
    if (init->rows() != spec.p() || init->cols() != spec.p()) {
      throw std::invalid_argument("gp_solve: init must be p x p");
    }
    x = project(*init);  // a feasible start; counted like any projection
  } else {
    x = project(ridge_init(spec));
  }

  double f = full_objective(spec, x);
  Eigen::MatrixXd grad = full_gradient(spec, x);
  report.status = GpStatus::max_iters;

  for (int k = 0; k < config.max_iters; ++k) {
    // The full-step trial doubles as the stationarity measure: stop on the
    // fixed-point residual ||X - P(X - s grad F(X))||, not on the accepted
    // (possibly backtracked-to-tiny) step.
    double alpha = config.initial_step;
    int backtracks = 0;
    Eigen::MatrixXd x_trial = project(x - alpha * grad);
    if ((x_trial - x).norm() <= config.tol_step) {
      report.status = GpStatus::converged;
      break;
    }
    bool accepted = false;
    double f_trial = 0.0;
    while (true) {
      f_trial = full_objective(spec, x_trial);
      double rhs =
          config.armijo_sigma * (grad.array() * (x - x_trial).array()).sum();
      if (f - f_trial >= rhs) {
        accepted = true;
        break;
      }
      if (backtracks >= config.max_backtracks) break;
      ++backtracks;
      alpha *= config.armijo_beta;
      x_trial = project(x - alpha * grad);
    }

    if (!accepted) {
      report.status = GpStatus::line_search_failed;
      break;
    }
    x = std::move(x_trial);
    f = f_trial;
    grad = full_gradient(spec, x);
    if (!std::isfinite(f) || !x.allFinite()) {
      throw std::runtime_error("gp_solve: non-finite iterate at step " + std::to_string(k));
    }
    if (!constraint.is_feasible(x)) {
      throw std::runtime_error("gp_solve: infeasible iterate at step " + std::to_string(k) +
                               " (projection bug)");
    }

    GpIterate it;
    it.iter = k + 1;
    it.f_value = f;
    it.step_size = alpha;
    it.backtracks = backtracks;
    it.projections_cum = projections;
    report.trace.push_back(it);
    report.iters = it.iter;
  }

  report.estimate = x;
  report.final_f = f;
  report.projections_total = projections;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

long projection_count(const GpReport& report) { return report.projections_total; }

void write_gp_trace_csv(const std::string& path, const GpReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_gp_trace_csv: cannot open '" + path + "'");
  out << "iter,f_value,step_size,backtracks,projections_cum\n";
  for (const GpIterate& s : report.trace) {
    out << s.iter << ',' << format_double(s.f_value) << ',' << format_double(s.step_size)
        << ',' << s.backtracks << ',' << s.projections_cum << '\n';
  }
  if (!out) throw std::runtime_error("write_gp_trace_csv: write to '" + path + "' failed");
}

}  // namespace lcvar
