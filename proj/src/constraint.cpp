#include "lcvar/constraint.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace lcvar {

Constraint Constraint::cardinality(int s) {
  if (s < 1) throw std::invalid_argument("Constraint::cardinality: need s >= 1");
  return {ConstraintKind::cardinality, s, 0.0};
}

Constraint Constraint::rank(int r) {
  if (r < 1) throw std::invalid_argument("Constraint::rank: need r >= 1");
  return {ConstraintKind::rank, r, 0.0};
}

Constraint Constraint::l1_ball(double l) {
  if (!(l > 0.0)) throw std::invalid_argument("Constraint::l1_ball: need l > 0");
  return {ConstraintKind::l1_ball, 0, l};
}

Constraint Constraint::nuclear_ball(double u) {
  if (!(u > 0.0)) throw std::invalid_argument("Constraint::nuclear_ball: need u > 0");
  return {ConstraintKind::nuclear_ball, 0, u};
}

double l1_norm(const Eigen::MatrixXd& m) {
  long double acc = 0.0L;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) acc += std::abs(static_cast<long double>(m(i, j)));
  return static_cast<double>(acc);
}

namespace {
Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  if (m.rows() >= 16) {
    return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues();
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}
}  // namespace

double nuclear_norm(const Eigen::MatrixXd& m) {
  return singular_values(m).sum();
}

int numerical_rank(const Eigen::MatrixXd& m) {
  Eigen::VectorXd sv = singular_values(m);
  if (sv.size() == 0) return 0;
  double tol = 1e-10 * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

bool Constraint::is_feasible(const Eigen::MatrixXd& y) const {
  switch (kind) {
    case ConstraintKind::cardinality: {
      int nnz = 0;
      for (int j = 0; j < y.cols(); ++j)
        for (int i = 0; i < y.rows(); ++i)
          if (y(i, j) != 0.0) ++nnz;
      return nnz <= int_bound;
    }
    case ConstraintKind::rank:
      return numerical_rank(y) <= int_bound;
    case ConstraintKind::l1_ball:
      return l1_norm(y) <= real_bound * (1.0 + 1e-12) + 1e-15;
    case ConstraintKind::nuclear_ball:
      return nuclear_norm(y) <= real_bound * (1.0 + 1e-12) + 1e-15;
  }
  throw std::logic_error("Constraint::is_feasible: bad kind");
}

void Constraint::validate_for_dimension(int p) const {
  const long pp = static_cast<long>(p) * p;
  switch (kind) {
    case ConstraintKind::cardinality:
      if (int_bound < 1 || int_bound > pp) {
        throw std::invalid_argument("Constraint: cardinality bound " +
                                    std::to_string(int_bound) + " outside [1, p^2]");
      }
      return;
    case ConstraintKind::rank:
      if (int_bound < 1 || int_bound > p) {
        throw std::invalid_argument("Constraint: rank bound " + std::to_string(int_bound) +
                                    " outside [1, p]");
      }
      return;
    case ConstraintKind::l1_ball:
    case ConstraintKind::nuclear_ball:
      if (!(real_bound > 0.0)) {
        throw std::invalid_argument("Constraint: ball radius must be positive");
      }
      return;
  }
  throw std::logic_error("Constraint::validate_for_dimension: bad kind");
}

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::cardinality: return "cardinality";
    case ConstraintKind::rank: return "rank";
    case ConstraintKind::l1_ball: return "l1_ball";
    case ConstraintKind::nuclear_ball: return "nuclear_ball";
  }
  return "?";
}

ConstraintKind constraint_kind_from_string(const std::string& s) {
  if (s == "cardinality") return ConstraintKind::cardinality;
  if (s == "rank") return ConstraintKind::rank;
  if (s == "l1_ball") return ConstraintKind::l1_ball;
  if (s == "nuclear_ball") return ConstraintKind::nuclear_ball;
  throw std::invalid_argument("unknown constraint kind '" + s + "'");
}

std::string Constraint::describe() const {
  switch (kind) {
    case ConstraintKind::cardinality: return "cardinality(" + std::to_string(int_bound) + ")";
    case ConstraintKind::rank: return "rank(" + std::to_string(int_bound) + ")";
    case ConstraintKind::l1_ball: return "l1_ball(" + std::to_string(real_bound) + ")";
    case ConstraintKind::nuclear_ball:
      return "nuclear_ball(" + std::to_string(real_bound) + ")";
  }
  return "?";
}

}  // namespace lcvar
