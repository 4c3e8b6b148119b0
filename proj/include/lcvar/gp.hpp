#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "lcvar/constraint.hpp"
#include "lcvar/objective.hpp"

namespace lcvar {

struct GpConfig {
  double armijo_sigma = 0.1;  // sufficient-decrease fraction, in (0,1)
  double armijo_beta = 0.5;   // backtracking factor, in (0,1)
  double initial_step = 1.0;
  int max_backtracks = 50;
  int max_iters = 5000;
  double tol_step = 1e-5;  // on the full-step fixed-point residual ||X - P(X - s grad)||
};

enum class GpStatus { converged, max_iters, line_search_failed };
std::string to_string(GpStatus status);

struct GpIterate {
  int iter = 0;
  double f_value = 0.0;
  double step_size = 0.0;
  int backtracks = 0;
  long projections_cum = 0;
};

struct GpReport {
  Eigen::MatrixXd estimate;
  GpStatus status = GpStatus::max_iters;
  std::vector<GpIterate> trace;
  int iters = 0;
  double final_f = 0.0;
  long projections_total = 0;
  double wall_time_s = 0.0;
};

// Gradient projection with the Armijo rule along the projection arc:
// X^{k+1} = P(X^k - alpha_k grad F(X^k)), alpha_k = initial_step * beta^m for
// the smallest m with F(X^k) - F(X^{k+1}) >= sigma <grad F(X^k), X^k - X^{k+1}>.
// Only the convex constraints (l1 ball, nuclear ball) are accepted; projected
// gradient has no descent guarantee on the nonconvex sets. When init is
// omitted, X^0 is the projection of the ridge least-squares solution.
GpReport gp_solve(const ProblemSpec& spec, const Constraint& constraint,
                  const GpConfig& config = {},
                  const std::optional<Eigen::MatrixXd>& init = std::nullopt);

// Total projections performed, including backtracking trials and the initial
// stationarity test. PALM needs exactly one projection per iteration; this
// counter backs the efficiency comparison.
long projection_count(const GpReport& report);

// Trace CSV with header iter,f_value,step_size,backtracks,projections_cum.
void write_gp_trace_csv(const std::string& path, const GpReport& report);

}  // namespace lcvar
