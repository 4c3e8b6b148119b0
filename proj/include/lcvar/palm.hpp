#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcvar/constraint.hpp"
#include "lcvar/objective.hpp"

namespace lcvar {

struct PalmConfig {
  double gamma1 = 2.0;       // c_k = gamma1 * L1(Y^k), must be > 1
  double gamma2 = 2.0;       // d_k = gamma2 * L2(X^{k+1}), must be > 1
  int max_iters = 5000;
  double tol_step = 1e-5;    // stop when max(e_x, e_y) <= tol_step
  double tol_couple = 1e-7;  // advisory only: e_xy is reported, not enforced
  bool assert_monotone = true;
};

enum class SolveStatus { converged, max_iters, monotonicity_violation };
std::string to_string(SolveStatus status);

// One row of the solver trace, describing completed step k -> k+1:
// phi is evaluated at the new pair, e_x = ||X^{k+1} - X^k||_F,
// e_y = ||Y^{k+1} - Y^k||_F, e_xy = ||X^{k+1} - Y^{k+1}||_F, and c_k, d_k
// are the proximal coefficients used in the step. iter counts completed
// steps (first row has iter = 1).
struct IterateState {
  int iter = 0;
  double phi = 0.0;
  double e_x = 0.0;
  double e_y = 0.0;
  double e_xy = 0.0;
  double c_k = 0.0;
  double d_k = 0.0;
};

struct SolveReport {
  Eigen::MatrixXd estimate;  // final Y block (feasible by construction)
  Eigen::MatrixXd x_final;   // final X block, for diagnostics
  SolveStatus status = SolveStatus::max_iters;
  std::vector<IterateState> trace;
  int iters = 0;             // completed steps
  double initial_phi = 0.0;
  double final_phi = 0.0;
  double delta_min = 0.0;    // smallest observed sufficient-decrease margin
  double wall_time_s = 0.0;

  const IterateState& last() const { return trace.back(); }
};

// Algorithm: alternate the closed-form least-squares X-update (direct form
// when p <= n-1, Woodbury otherwise) with the constraint projection Y-update,
// using per-step coefficients c_k = gamma1 L1(Y^k) and d_k = gamma2 L2(X^{k+1}).
//
// When init is omitted, X^0 is the ridge least-squares solution
// D C^T (C C^T + eps I)^{-1} with eps = 1e-6 tr(C C^T)/p and Y^0 its
// projection onto the constraint set.
//
// Phi must decrease at every step; a violation beyond 1e-9 relative slack
// stops the solve with status monotonicity_violation (it signals an
// implementation bug and is never ignored). Non-finite iterates throw.
SolveReport palm_solve(const ProblemSpec& spec, const Constraint& constraint,
                       const PalmConfig& config = {},
                       const std::optional<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& init =
                           std::nullopt);

// Sufficient-decrease margin between two consecutive trace rows:
//   Phi(Z^k) - Phi(Z^{k+1}) - delta/2 ||Z^{k+1} - Z^k||_F^2
// with delta = min{(gamma1-1) q1_minus, (gamma2-1) q2_minus} built from
// running minima of the observed Lipschitz constants. Nonnegative (within
// 1e-9 relative slack) for a correct solver.
double sufficient_decrease_margin(const IterateState& prev, const IterateState& next,
                                  double q1_minus, double q2_minus, const PalmConfig& config);

// Trace CSV with header iter,phi,e_x,e_y,e_xy,c_k,d_k; values carry enough
// digits to round-trip exactly.
void write_trace_csv(const std::string& path, const SolveReport& report);

}  // namespace lcvar
