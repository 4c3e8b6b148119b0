#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace lcvar {

// Largest eigenvalue modulus of a (general, square) real matrix.
double spectral_radius(const Eigen::MatrixXd& a);

// A first-order vector autoregression x(t+1) = A x(t) + eps(t) with
// eps ~ N(0, Q). Immutable after construction; construction validates that
// q is symmetric and has no meaningfully negative eigenvalue.
struct VarModel {
  Eigen::MatrixXd a;  // p x p state transition
  Eigen::MatrixXd q;  // p x p noise covariance, symmetric PSD
  int p;

  VarModel(Eigen::MatrixXd a_in, Eigen::MatrixXd q_in);

  double spectral_radius() const;
  bool stable() const;  // tau(a) < 1
};

// A recorded state trajectory. Columns are x(1) ... x(n) in time order.
struct TimeSeriesData {
  Eigen::MatrixXd states;  // p x n

  explicit TimeSeriesData(Eigen::MatrixXd states_in);

  int p() const { return static_cast<int>(states.rows()); }
  int n() const { return static_cast<int>(states.cols()); }

  // Regression blocks: C = [x(1) ... x(n-1)], D = [x(2) ... x(n)].
  Eigen::MatrixXd lagged() const { return states.leftCols(n() - 1); }
  Eigen::MatrixXd led() const { return states.rightCols(n() - 1); }
};

// Nonsequence draws from the steady-state distribution, one per column.
struct SteadyStateData {
  Eigen::MatrixXd samples;  // p x N

  explicit SteadyStateData(Eigen::MatrixXd samples_in);

  int p() const { return static_cast<int>(samples.rows()); }
  int count() const { return static_cast<int>(samples.cols()); }
};

// Draws M with `nnz` standard-normal entries at uniformly random positions
// (without replacement) and scales it so the spectral radius equals
// target_radius. Positions use row-major linear indices. The returned model
// has Q = I. Redraws a bounded number of times if the support happens to be
// nilpotent (tau(M) = 0).
VarModel generate_sparse_stable(int p, int nnz, double target_radius, std::uint64_t seed);

// A = U * Sigma * V with U (p x r) and V (r x p) orthonormal (QR of Gaussian
// matrices) and Sigma diagonal with entries uniform on [0,1). All singular
// values are below one, so the model is stable. Q = I.
VarModel generate_lowrank_stable(int p, int r, std::uint64_t seed);

// a / (factor * tau(a)); the result has spectral radius 1/factor.
// Throws if tau(a) is numerically zero.
Eigen::MatrixXd rescale_to_stable(const Eigen::MatrixXd& a, double factor = 2.0);

// Matrix exponential exp(a_c * dt) by scaling-and-squaring with a truncated
// Taylor series (scaled norm <= 0.5 before the series is summed).
Eigen::MatrixXd discretize(const Eigen::MatrixXd& a_c, double dt = 1.0);

// Simulates x(t+1) = A x(t) + eps(t), eps ~ N(0, sigma^2 I). The first
// column of the result is x0 and `steps` columns are returned in total.
TimeSeriesData simulate(const VarModel& model, const Eigen::VectorXd& x0, int steps,
                        double sigma, std::uint64_t seed);

struct SteadyStateOptions {
  int burn_in = -1;  // < 0 picks the default 10*p
  int spacing = -1;  // < 0 picks the default p
};

// N approximately independent draws from the stationary distribution,
// obtained by subsampling one long trajectory driven by the model's own Q:
// discard `burn_in` steps, then record every `spacing`-th state.
// Requires a stable model.
SteadyStateData sample_steady_state(const VarModel& model, int count, std::uint64_t seed,
                                    const SteadyStateOptions& opts = {});

// S = 1/(N-1) sum_i (z_i - zbar)(z_i - zbar)^T, symmetrized so downstream
// code may assume exact symmetry.
Eigen::MatrixXd sample_covariance(const SteadyStateData& data);

// Solves A P A^T + Q = P for P. Uses the p^2 x p^2 vectorized linear system
// at small sizes and a doubling fixed-point iteration for larger p.
// Requires tau(a) < 1.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

namespace detail {
Eigen::MatrixXd solve_lyapunov_kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);
Eigen::MatrixXd solve_lyapunov_doubling(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);
// Symmetric PSD square root via eigendecomposition (negative eigenvalues
// are clipped at zero).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& q);
}  // namespace detail

}  // namespace lcvar
