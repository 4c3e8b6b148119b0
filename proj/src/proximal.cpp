#include "lcvar/proximal.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace lcvar {

namespace {

void require_ck(double c_k, const char* who) {
  if (!(c_k > 0.0)) throw std::invalid_argument(std::string(who) + ": need c_k > 0");
}

struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};

ThinSvd thin_svd(const Eigen::MatrixXd& m) {
  if (m.rows() >= 16) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace

Eigen::MatrixXd prox_x_direct(const ProblemSpec& spec, const Eigen::MatrixXd& u_k, double c_k) {
  require_ck(c_k, "prox_x_direct");
  Eigen::MatrixXd lhs = spec.c * spec.c.transpose();
  lhs.diagonal().array() += c_k;
  Eigen::MatrixXd rhs = spec.d * spec.c.transpose() + c_k * u_k;
  // X (C C^T + c I) = rhs with an SPD system; solve for X^T and transpose.
  return lhs.llt().solve(rhs.transpose()).transpose();
}

Eigen::MatrixXd prox_x_woodbury(const ProblemSpec& spec, const Eigen::MatrixXd& u_k, double c_k) {
  require_ck(c_k, "prox_x_woodbury");
  Eigen::MatrixXd gram = spec.c.transpose() * spec.c;  // (n-1) x (n-1)
  gram.diagonal().array() += c_k;
  Eigen::MatrixXd m = spec.d * spec.c.transpose() / c_k + u_k;
  Eigen::MatrixXd w = gram.llt().solve(spec.c.transpose());  // (n-1) x p
  return m - (m * spec.c) * w;
}

Eigen::MatrixXd project_cardinality(const Eigen::MatrixXd& v, int s) {
  if (s < 1) throw std::invalid_argument("project_cardinality: need s >= 1");
  const int rows = static_cast<int>(v.rows());
  const int cols = static_cast<int>(v.cols());
  const int total = rows * cols;
  if (s >= total) return v;

  // Row-major linear indices; ties at the s-th magnitude go to the smaller
  // index so the kept support is deterministic.
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  auto mag = [&](int k) { return std::abs(v(k / cols, k % cols)); };
  std::nth_element(order.begin(), order.begin() + s, order.end(), [&](int a, int b) {
    double ma = mag(a), mb = mag(b);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < s; ++i) {
    int k = order[i];
    out(k / cols, k % cols) = v(k / cols, k % cols);
  }
  return out;
}

Eigen::MatrixXd project_rank(const Eigen::MatrixXd& v, int r) {
  if (r < 1) throw std::invalid_argument("project_rank: need r >= 1");
  if (r >= std::min(v.rows(), v.cols())) return v;
  ThinSvd svd = thin_svd(v);
  return svd.u.leftCols(r) * svd.sigma.head(r).asDiagonal() * svd.v.leftCols(r).transpose();
}

namespace detail {

double l1_threshold(const Eigen::VectorXd& abs_values, double l) {
  std::vector<double> w(abs_values.data(), abs_values.data() + abs_values.size());
  std::sort(w.begin(), w.end(), std::greater<double>());
  long double cum = 0.0L;
  double theta = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    cum += w[k];
    double candidate = static_cast<double>((cum - static_cast<long double>(l)) /
                                           static_cast<long double>(k + 1));
    if (w[k] - candidate > 0.0) {
      theta = candidate;
    } else {
      break;
    }
  }
  return theta;
}

}  // namespace detail

Eigen::MatrixXd project_l1_ball(const Eigen::MatrixXd& v, double l, double* theta_out) {
  if (!(l > 0.0)) throw std::invalid_argument("project_l1_ball: need l > 0");
  if (theta_out) *theta_out = 0.0;
  if (l1_norm(v) <= l) return v;

  Eigen::VectorXd abs_flat(v.size());
  {
    int k = 0;
    for (int i = 0; i < v.rows(); ++i)
      for (int j = 0; j < v.cols(); ++j) abs_flat(k++) = std::abs(v(i, j));
  }
  double theta = detail::l1_threshold(abs_flat, l);
  if (theta_out) *theta_out = theta;

  Eigen::MatrixXd out(v.rows(), v.cols());
  for (int i = 0; i < v.rows(); ++i) {
    for (int j = 0; j < v.cols(); ++j) {
      double m = std::abs(v(i, j)) - theta;
      out(i, j) = m > 0.0 ? (v(i, j) > 0.0 ? m : -m) : 0.0;
    }
  }
  return out;
}

Eigen::MatrixXd project_nuclear_ball(const Eigen::MatrixXd& v, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("project_nuclear_ball: need u > 0");
  ThinSvd svd = thin_svd(v);
  if (svd.sigma.sum() <= u) return v;
  double theta = detail::l1_threshold(svd.sigma, u);
  Eigen::VectorXd clipped = (svd.sigma.array() - theta).max(0.0);
  return svd.u * clipped.asDiagonal() * svd.v.transpose();
}

Eigen::MatrixXd prox_y(const Eigen::MatrixXd& v_k, double d_k, const Constraint& constraint) {
  if (!(d_k > 0.0)) throw std::invalid_argument("prox_y: need d_k > 0");
  switch (constraint.kind) {
    case ConstraintKind::cardinality:
      return project_cardinality(v_k, constraint.int_bound);
    case ConstraintKind::rank:
      return project_rank(v_k, constraint.int_bound);
    case ConstraintKind::l1_ball:
      return project_l1_ball(v_k, constraint.real_bound);
    case ConstraintKind::nuclear_ball:
      return project_nuclear_ball(v_k, constraint.real_bound);
  }
  throw std::logic_error("prox_y: bad constraint kind");
}

}  // namespace lcvar
