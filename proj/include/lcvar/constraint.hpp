#pragma once

#include <Eigen/Core>
#include <string>

namespace lcvar {

enum class ConstraintKind { cardinality, rank, l1_ball, nuclear_ball };

// One of the four low-complexity constraint sets on the transition matrix:
//   cardinality(s)   card(Y) <= s
//   rank(r)          rank(Y) <= r
//   l1_ball(l)       sum_ij |Y_ij| <= l
//   nuclear_ball(u)  sum_i sigma_i(Y) <= u
struct Constraint {
  ConstraintKind kind;
  int int_bound = 0;       // s or r
  double real_bound = 0.0; // l or u

  static Constraint cardinality(int s);
  static Constraint rank(int r);
  static Constraint l1_ball(double l);
  static Constraint nuclear_ball(double u);

  bool is_convex() const {
    return kind == ConstraintKind::l1_ball || kind == ConstraintKind::nuclear_ball;
  }

  // Membership test. Cardinality counts exact nonzeros; rank uses numerical
  // rank with tolerance 1e-10 * sigma_max; the two ball constraints allow a
  // 1e-12 relative slack for roundoff.
  bool is_feasible(const Eigen::MatrixXd& y) const;

  // Checks the bound against the matrix dimension (1 <= s <= p^2, 1 <= r <= p).
  void validate_for_dimension(int p) const;

  std::string describe() const;
};

std::string to_string(ConstraintKind kind);
ConstraintKind constraint_kind_from_string(const std::string& s);

// Entrywise l1 norm, accumulated in extended precision.
double l1_norm(const Eigen::MatrixXd& m);

// Sum of singular values.
double nuclear_norm(const Eigen::MatrixXd& m);

// Numerical rank: number of singular values above 1e-10 * sigma_max.
int numerical_rank(const Eigen::MatrixXd& m);

}  // namespace lcvar
