#include "lcvar/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "lcvar/csv.hpp"

namespace lcvar {

EvalResult evaluate(const Eigen::MatrixXd& estimate, const TimeSeriesData& test) {
  const int p = test.p();
  if (estimate.rows() != p || estimate.cols() != p) {
    throw std::invalid_argument("evaluate: estimate must be p x p matching the test data");
  }
  const int m = test.n();
  EvalResult res;
  res.test_length = m;

  long double err_sum = 0.0L;
  long double cos_sum = 0.0L;
  int err_terms = 0;
  int cos_terms = 0;
  for (int t = 0; t + 1 < m; ++t) {
    Eigen::VectorXd change = test.states.col(t + 1) - test.states.col(t);
    Eigen::VectorXd pred_err = test.states.col(t + 1) - estimate * test.states.col(t);
    Eigen::VectorXd resid = test.states.col(t) - estimate * test.states.col(t);
    double den = change.norm();
    if (den == 0.0) {
      ++res.skipped_error_terms;
    } else {
      err_sum += pred_err.norm() / den;
      ++err_terms;
    }
    double resid_norm = resid.norm();
    if (den == 0.0 || resid_norm == 0.0) {
      ++res.skipped_cosine_terms;
    } else {
      cos_sum += std::abs(change.dot(resid)) / (den * resid_norm);
      ++cos_terms;
    }
  }
  if (res.skipped_error_terms > 0 || res.skipped_cosine_terms > 0) {
    std::cerr << "evaluate: skipped " << res.skipped_error_terms << " error / "
              << res.skipped_cosine_terms
              << " cosine terms with zero denominators (degenerate test steps)\n";
  }
  // A metric with no valid terms is undefined, not an error: the other one
  // may still be meaningful (e.g. the identity estimate zeroes every cosine
  // residual while the normalized error is exactly 1).
  res.normalized_error = err_terms > 0 ? static_cast<double>(err_sum / err_terms)
                                       : std::numeric_limits<double>::quiet_NaN();
  res.cosine_score = cos_terms > 0 ? static_cast<double>(cos_sum / cos_terms)
                                   : std::numeric_limits<double>::quiet_NaN();
  return res;
}

double normalized_error(const Eigen::MatrixXd& estimate, const TimeSeriesData& test) {
  double v = evaluate(estimate, test).normalized_error;
  if (std::isnan(v)) {
    throw std::runtime_error("normalized_error: every test step is degenerate");
  }
  return v;
}

double cosine_score(const Eigen::MatrixXd& estimate, const TimeSeriesData& test) {
  double v = evaluate(estimate, test).cosine_score;
  if (std::isnan(v)) {
    throw std::runtime_error("cosine_score: every term is degenerate");
  }
  return v;
}

int count_nonzeros(const Eigen::MatrixXd& m) {
  double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  double tol = 1e-8 * scale;
  int nnz = 0;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) > tol) ++nnz;
  return nnz;
}

BisectResult bisect_l1_threshold(const ProblemSpec& spec, int target_nnz, double l_low,
                                 double l_up, int tol_nnz, int max_rounds,
                                 const PalmConfig& config) {
  if (!(l_low > 0.0) || !(l_low < l_up)) {
    throw std::invalid_argument("bisect_l1_threshold: need 0 < l_low < l_up");
  }
  if (target_nnz < 1 || tol_nnz < 0 || max_rounds < 1) {
    throw std::invalid_argument("bisect_l1_threshold: bad target/tolerance/rounds");
  }

  BisectResult best;
  int best_gap = -1;
  int rounds = 0;
  auto solve_at = [&](double l) {
    ++rounds;
    SolveReport rep = palm_solve(spec, Constraint::l1_ball(l), config);
    int nnz = count_nonzeros(rep.estimate);
    int gap = std::abs(nnz - target_nnz);
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      best.l = l;
      best.achieved_nnz = nnz;
      best.report = std::move(rep);
    }
    return nnz;
  };

  // Validate the bracket: count(l_low) <= target <= count(l_up); widen
  // geometrically when an endpoint is on the wrong side.
  int count_low = solve_at(l_low);
  for (int w = 0; count_low > target_nnz; ++w) {
    if (w >= 60) {
      throw std::runtime_error(
          "bisect_l1_threshold: could not bracket the target from below (count at l_low=" +
          std::to_string(l_low) + " is " + std::to_string(count_low) + ")");
    }
    l_low /= 2.0;
    count_low = solve_at(l_low);
  }
  int count_up = solve_at(l_up);
  for (int w = 0; count_up < target_nnz; ++w) {
    if (w >= 60) {
      throw std::runtime_error(
          "bisect_l1_threshold: could not bracket the target from above (count at l_up=" +
          std::to_string(l_up) + " is " + std::to_string(count_up) + ")");
    }
    l_up *= 2.0;
    count_up = solve_at(l_up);
  }

  while (best_gap > tol_nnz && rounds < max_rounds) {
    double mid = 0.5 * (l_low + l_up);
    int count_mid = solve_at(mid);
    if (count_mid > target_nnz) {
      l_up = mid;
    } else {
      l_low = mid;
    }
  }

  best.rounds = rounds;
  best.converged = best_gap <= tol_nnz;
  best.bracket_low = l_low;
  best.bracket_high = l_up;
  return best;
}

std::string to_string(Metric metric) {
  return metric == Metric::normalized_error ? "normalized_error" : "cosine_score";
}

CrossValResult cross_validate(const TimeSeriesData& train, const Eigen::MatrixXd& s_cov,
                              const std::vector<double>& rho1_grid,
                              const std::vector<double>& sigma_grid,
                              const CrossValOptions& options) {
  if (rho1_grid.empty() || sigma_grid.empty()) {
    throw std::invalid_argument("cross_validate: grids must be nonempty");
  }
  if (!(options.split_fraction > 0.0 && options.split_fraction < 1.0)) {
    throw std::invalid_argument("cross_validate: split_fraction must be in (0,1)");
  }
  const int n = train.n();
  const int n_fit = std::max(2, static_cast<int>(options.split_fraction * n));
  if (n - n_fit < 2) {
    throw std::invalid_argument("cross_validate: series too short to split (n=" +
                                std::to_string(n) + ", fit=" + std::to_string(n_fit) + ")");
  }
  TimeSeriesData fit_series(train.states.leftCols(n_fit));
  TimeSeriesData val_series(train.states.rightCols(n - n_fit));
  const int p = train.p();

  CrossValResult result;
  bool have_best = false;
  for (double rho1 : rho1_grid) {
    for (double sigma : sigma_grid) {
      CrossValCell cell;
      cell.rho1 = rho1;
      cell.sigma = sigma;
      try {
        ProblemSpec spec;
        spec.c = fit_series.lagged();
        spec.d = fit_series.led();
        spec.s_cov = s_cov;
        spec.q = sigma * sigma * Eigen::MatrixXd::Identity(p, p);
        spec.rho1 = rho1;
        spec.rho2 =
            options.rho2_override > 0.0 ? options.rho2_override : default_rho2(rho1, s_cov);
        spec.mu = options.mu;
        SolveReport rep = palm_solve(spec, options.constraint, options.palm);
        EvalResult ev = evaluate(rep.estimate, val_series);
        cell.value = options.metric == Metric::normalized_error ? ev.normalized_error
                                                                : ev.cosine_score;
        if (std::isnan(cell.value)) {
          throw std::runtime_error("validation metric is undefined on this split");
        }
        cell.ok = true;
      } catch (const std::exception& e) {
        std::cerr << "cross_validate: cell (rho1=" << rho1 << ", sigma=" << sigma
                  << ") failed: " << e.what() << '\n';
        cell.ok = false;
      }
      if (cell.ok) {
        bool better = !have_best ||
                      (options.metric == Metric::normalized_error
                           ? cell.value < result.best_value
                           : cell.value > result.best_value);
        if (better) {
          result.best_rho1 = cell.rho1;
          result.best_sigma = cell.sigma;
          result.best_value = cell.value;
          have_best = true;
        }
      }
      result.table.push_back(cell);
    }
  }
  if (!have_best) {
    throw std::runtime_error("cross_validate: every grid cell failed");
  }
  return result;
}

void write_score_table_csv(const std::string& path, const CrossValResult& result,
                           Metric metric) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_score_table_csv: cannot open '" + path + "'");
  out << "rho1,sigma,metric,value,status\n";
  for (const CrossValCell& cell : result.table) {
    out << format_double(cell.rho1) << ',' << format_double(cell.sigma) << ','
        << to_string(metric) << ',' << (cell.ok ? format_double(cell.value) : "nan") << ','
        << (cell.ok ? "ok" : "failed") << '\n';
  }
  if (!out) throw std::runtime_error("write_score_table_csv: write failed");
}

}  // namespace lcvar
