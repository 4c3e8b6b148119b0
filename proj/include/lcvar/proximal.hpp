#pragma once

#include <Eigen/Core>

#include "lcvar/constraint.hpp"
#include "lcvar/objective.hpp"

namespace lcvar {

// Minimizer of 1/2 ||X C - D||_F^2 + c_k/2 ||X - U||_F^2:
//   X = (D C^T + c_k U)(C C^T + c_k I)^{-1}
Eigen::MatrixXd prox_x_direct(const ProblemSpec& spec, const Eigen::MatrixXd& u_k, double c_k);

// Same minimizer through the Woodbury identity, inverting the
// (n-1) x (n-1) system instead; preferable when p > n-1:
//   X = (c_k^{-1} D C^T + U)(I - C (c_k I + C^T C)^{-1} C^T)
Eigen::MatrixXd prox_x_woodbury(const ProblemSpec& spec, const Eigen::MatrixXd& u_k, double c_k);

// Keeps the s entries of largest magnitude, zeroes the rest. Ties at the
// s-th magnitude are broken toward the smallest row-major linear index, so
// the output is deterministic and has at most s nonzeros.
Eigen::MatrixXd project_cardinality(const Eigen::MatrixXd& v, int s);

// Best rank-r approximation (truncated SVD).
Eigen::MatrixXd project_rank(const Eigen::MatrixXd& v, int r);

// Euclidean projection onto { Y : sum_ij |Y_ij| <= l } by the exact
// sort-based threshold method. If a threshold was applied, *theta_out
// receives it (0 when v was already feasible).
Eigen::MatrixXd project_l1_ball(const Eigen::MatrixXd& v, double l, double* theta_out = nullptr);

// Projection onto { Y : ||Y||_* <= u }: SVD, then project the singular
// values onto the l1 ball of radius u.
Eigen::MatrixXd project_nuclear_ball(const Eigen::MatrixXd& v, double u);

// The PALM Y-update: dispatches V^k to the projection matching the
// constraint. The proximal coefficient d_k does not change the minimizer of
// a projection, so it is accepted only for interface symmetry.
Eigen::MatrixXd prox_y(const Eigen::MatrixXd& v_k, double d_k, const Constraint& constraint);

namespace detail {
// Soft threshold theta such that sum_i max(w_i - theta, 0) = l for a
// nonnegative weight vector with sum > l; the core of both ball projections.
double l1_threshold(const Eigen::VectorXd& abs_values, double l);
}  // namespace detail

}  // namespace lcvar
