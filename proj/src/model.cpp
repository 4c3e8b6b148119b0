#include "lcvar/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lcvar {

namespace {

void require_square(const Eigen::MatrixXd& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square and nonempty");
  }
}

double sym_violation(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).norm() / std::max(1.0, m.norm());
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& a) {
  require_square(a, "spectral_radius");
  if (a.rows() == 1) return std::abs(a(0, 0));
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("spectral_radius: eigenvalue computation failed");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

VarModel::VarModel(Eigen::MatrixXd a_in, Eigen::MatrixXd q_in)
    : a(std::move(a_in)), q(std::move(q_in)), p(static_cast<int>(a.rows())) {
  require_square(a, "VarModel");
  if (q.rows() != p || q.cols() != p) {
    throw std::invalid_argument("VarModel: Q must be p x p");
  }
  if (sym_violation(q) > 1e-12) {
    throw std::invalid_argument("VarModel: Q is not symmetric within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10 * std::max(1.0, q.norm())) {
    throw std::invalid_argument("VarModel: Q has negative eigenvalue " +
                                std::to_string(min_eig));
  }
}

double VarModel::spectral_radius() const { return lcvar::spectral_radius(a); }

bool VarModel::stable() const { return spectral_radius() < 1.0; }

TimeSeriesData::TimeSeriesData(Eigen::MatrixXd states_in) : states(std::move(states_in)) {
  if (states.cols() < 2) {
    throw std::invalid_argument("TimeSeriesData: need at least 2 time points, got " +
                                std::to_string(states.cols()));
  }
  if (states.rows() < 1) {
    throw std::invalid_argument("TimeSeriesData: empty state dimension");
  }
}

SteadyStateData::SteadyStateData(Eigen::MatrixXd samples_in) : samples(std::move(samples_in)) {
  if (samples.cols() < 2) {
    throw std::invalid_argument("SteadyStateData: need at least 2 samples, got " +
                                std::to_string(samples.cols()));
  }
  if (samples.rows() < 1) {
    throw std::invalid_argument("SteadyStateData: empty state dimension");
  }
}

VarModel generate_sparse_stable(int p, int nnz, double target_radius, std::uint64_t seed) {
  if (p < 1) throw std::invalid_argument("generate_sparse_stable: p must be positive");
  if (nnz < 1 || static_cast<long>(nnz) > static_cast<long>(p) * p) {
    throw std::invalid_argument("generate_sparse_stable: need 1 <= nnz <= p^2");
  }
  if (!(target_radius > 0.0 && target_radius < 1.0)) {
    throw std::invalid_argument("generate_sparse_stable: target_radius must be in (0,1)");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int total = p * p;
  constexpr int kMaxRetries = 16;

  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    // nnz distinct positions, uniform over all p^2 entries (partial
    // Fisher-Yates); linear indices are row-major.
    std::vector<int> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < nnz; ++i) {
      std::uniform_int_distribution<int> pick(i, total - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < nnz; ++i) {
      m(idx[i] / p, idx[i] % p) = gauss(rng);
    }
    double tau = spectral_radius(m);
    if (tau > 1e-12 * (1.0 + m.norm())) {
      return VarModel(m * (target_radius / tau), Eigen::MatrixXd::Identity(p, p));
    }
  }
  throw std::runtime_error(
      "generate_sparse_stable: drew a nilpotent support " + std::to_string(kMaxRetries) +
      " times (p=" + std::to_string(p) + ", nnz=" + std::to_string(nnz) +
      "); the requested pattern cannot be rescaled to a target spectral radius");
}

VarModel generate_lowrank_stable(int p, int r, std::uint64_t seed) {
  if (p < 1) throw std::invalid_argument("generate_lowrank_stable: p must be positive");
  if (r < 1 || r > p) {
    throw std::invalid_argument("generate_lowrank_stable: need 1 <= r <= p");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto gaussian = [&](int rows, int cols) {
    Eigen::MatrixXd g(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) g(i, j) = gauss(rng);
    return g;
  };
  auto thin_q = [](const Eigen::MatrixXd& g, int cols) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return Eigen::MatrixXd(qr.householderQ() *
                           Eigen::MatrixXd::Identity(g.rows(), cols));
  };

  Eigen::MatrixXd u = thin_q(gaussian(p, r), r);              // p x r, orthonormal columns
  Eigen::MatrixXd v = thin_q(gaussian(p, r), r).transpose();  // r x p, orthonormal rows
  Eigen::VectorXd sigma(r);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < r; ++i) sigma(i) = unif(rng);

  Eigen::MatrixXd a = u * sigma.asDiagonal() * v;
  return VarModel(a, Eigen::MatrixXd::Identity(p, p));
}

Eigen::MatrixXd rescale_to_stable(const Eigen::MatrixXd& a, double factor) {
  require_square(a, "rescale_to_stable");
  if (!(factor > 0.0)) {
    throw std::invalid_argument("rescale_to_stable: factor must be positive");
  }
  double tau = spectral_radius(a);
  if (tau <= 1e-14 * (1.0 + a.norm())) {
    throw std::runtime_error(
        "rescale_to_stable: spectral radius is numerically zero (tau=" + std::to_string(tau) +
        "); a nilpotent matrix cannot be rescaled to a target radius");
  }
  return a / (factor * tau);
}

Eigen::MatrixXd discretize(const Eigen::MatrixXd& a_c, double dt) {
  require_square(a_c, "discretize");
  if (!(dt > 0.0)) throw std::invalid_argument("discretize: dt must be positive");

  const int p = static_cast<int>(a_c.rows());
  Eigen::MatrixXd b = a_c * dt;
  double norm = b.norm();
  if (norm == 0.0) return Eigen::MatrixXd::Identity(p, p);

  // Scale so ||B/2^s|| <= 0.5, sum the Taylor series, then square s times.
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  b /= std::pow(2.0, s);

  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
    if (term.norm() <= 1e-17 * sum.norm()) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

TimeSeriesData simulate(const VarModel& model, const Eigen::VectorXd& x0, int steps,
                        double sigma, std::uint64_t seed) {
  if (steps < 2) throw std::invalid_argument("simulate: need steps >= 2");
  if (x0.size() != model.p) throw std::invalid_argument("simulate: x0 has wrong dimension");
  if (sigma < 0.0) throw std::invalid_argument("simulate: sigma must be nonnegative");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd states(model.p, steps);
  states.col(0) = x0;
  for (int t = 1; t < steps; ++t) {
    states.col(t) = model.a * states.col(t - 1);
    if (sigma > 0.0) {
      for (int i = 0; i < model.p; ++i) states(i, t) += sigma * gauss(rng);
    }
  }
  return TimeSeriesData(std::move(states));
}

SteadyStateData sample_steady_state(const VarModel& model, int count, std::uint64_t seed,
                                    const SteadyStateOptions& opts) {
  if (count < 2) throw std::invalid_argument("sample_steady_state: need count >= 2");
  double tau = model.spectral_radius();
  if (tau >= 1.0) {
    throw std::invalid_argument("sample_steady_state: model is unstable (spectral radius " +
                                std::to_string(tau) + " >= 1)");
  }
  const int p = model.p;
  const int burn_in = opts.burn_in >= 0 ? opts.burn_in : 10 * p;
  const int spacing = opts.spacing >= 1 ? opts.spacing : p;

  Eigen::MatrixXd q_sqrt = detail::psd_sqrt(model.q);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd z(p);
  auto advance = [&] {
    for (int i = 0; i < p; ++i) z(i) = gauss(rng);
    x = model.a * x + q_sqrt * z;
  };

  for (int t = 0; t < burn_in; ++t) advance();
  Eigen::MatrixXd samples(p, count);
  for (int i = 0; i < count; ++i) {
    for (int t = 0; t < spacing; ++t) advance();
    samples.col(i) = x;
  }
  return SteadyStateData(std::move(samples));
}

Eigen::MatrixXd sample_covariance(const SteadyStateData& data) {
  const int n = data.count();
  Eigen::VectorXd mean = data.samples.rowwise().mean();
  Eigen::MatrixXd centered = data.samples.colwise() - mean;
  Eigen::MatrixXd s = (centered * centered.transpose()) / static_cast<double>(n - 1);
  return ((s + s.transpose()) / 2.0).eval();
}

namespace detail {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  }
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd solve_lyapunov_kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const int p = static_cast<int>(a.rows());
  const int pp = p * p;
  // vec(A P A^T) = (A kron A) vec(P) with column-major vec.
  Eigen::MatrixXd k(pp, pp);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) {
      k.block(i * p, j * p, p, p) = a(i, j) * a;
    }
  }
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(pp, pp) - k;
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(q.data(), pp);
  Eigen::VectorXd x = lhs.partialPivLu().solve(rhs);
  Eigen::MatrixXd pmat = Eigen::Map<const Eigen::MatrixXd>(x.data(), p, p);
  return ((pmat + pmat.transpose()) / 2.0).eval();
}

Eigen::MatrixXd solve_lyapunov_doubling(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  // P = sum_j A^j Q (A^j)^T accumulated with doubling: after k rounds the
  // partial sum covers 2^k terms, so convergence is quadratic in tau(A).
  Eigen::MatrixXd pmat = q;
  Eigen::MatrixXd ak = a;
  for (int it = 0; it < 200; ++it) {
    Eigen::MatrixXd next = pmat + ak * pmat * ak.transpose();
    double delta = (next - pmat).norm();
    pmat = next;
    if (delta <= 1e-15 * std::max(1.0, pmat.norm())) break;
    ak = ak * ak;
  }
  return ((pmat + pmat.transpose()) / 2.0).eval();
}

}  // namespace detail

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  require_square(a, "solve_lyapunov");
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw std::invalid_argument("solve_lyapunov: A and Q must have equal size");
  }
  double tau = spectral_radius(a);
  if (tau >= 1.0) {
    throw std::invalid_argument("solve_lyapunov: matrix is not stable (spectral radius " +
                                std::to_string(tau) + " >= 1)");
  }
  Eigen::MatrixXd pmat = a.rows() <= 25 ? detail::solve_lyapunov_kron(a, q)
                                        : detail::solve_lyapunov_doubling(a, q);
  double residual = (a * pmat * a.transpose() + q - pmat).norm();
  if (residual > 1e-10 * std::max(1.0, pmat.norm())) {
    throw std::runtime_error("solve_lyapunov: residual " + std::to_string(residual) +
                             " exceeds tolerance; solution rejected");
  }
  return pmat;
}

}  // namespace lcvar
