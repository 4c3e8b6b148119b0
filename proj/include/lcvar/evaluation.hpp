#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "lcvar/constraint.hpp"
#include "lcvar/model.hpp"
#include "lcvar/objective.hpp"
#include "lcvar/palm.hpp"

namespace lcvar {

// Test-set metrics over the m-1 transitions of a held-out series:
//   normalized error: mean of ||x(t+1) - A_hat x(t)|| / ||x(t+1) - x(t)||
//     (smaller is better, >= 0)
//   cosine score: mean of |(x(t+1)-x(t))^T (x(t) - A_hat x(t))| /
//     (||x(t+1)-x(t)|| ||x(t) - A_hat x(t)||)  (higher is better, <= 1)
// Terms with a zero denominator factor are skipped, counted, and reported.
struct EvalResult {
  double normalized_error = 0.0;
  double cosine_score = 0.0;
  int test_length = 0;           // m
  int skipped_error_terms = 0;
  int skipped_cosine_terms = 0;
};

EvalResult evaluate(const Eigen::MatrixXd& estimate, const TimeSeriesData& test);
double normalized_error(const Eigen::MatrixXd& estimate, const TimeSeriesData& test);
double cosine_score(const Eigen::MatrixXd& estimate, const TimeSeriesData& test);

// Nonzero count with threshold 1e-8 * max|entry| (soft-thresholded entries
// are exact zeros, but X-block leakage motivates a tolerance).
int count_nonzeros(const Eigen::MatrixXd& m);

struct BisectResult {
  double l = 0.0;           // selected l1 bound
  int achieved_nnz = 0;     // nonzero count of the solution at l
  bool converged = false;   // within tol_nnz of the target
  int rounds = 0;           // PALM solves performed
  double bracket_low = 0.0; // final bracket endpoints
  double bracket_high = 0.0;
  SolveReport report;       // solve at the returned l
};

// Finds the l1-ball radius whose PALM solution has (close to) target_nnz
// nonzeros by bisection on [l_low, l_up]. The bracket is validated first
// (count at l_low must be <= target, count at l_up >= target) and widened
// geometrically when it does not hold; an impossible bracket throws.
BisectResult bisect_l1_threshold(const ProblemSpec& spec, int target_nnz, double l_low,
                                 double l_up, int tol_nnz, int max_rounds,
                                 const PalmConfig& config = {});

enum class Metric { normalized_error, cosine_score };
std::string to_string(Metric metric);

struct CrossValCell {
  double rho1 = 0.0;
  double sigma = 0.0;
  double value = 0.0;
  bool ok = false;
};

struct CrossValResult {
  double best_rho1 = 0.0;
  double best_sigma = 0.0;
  double best_value = 0.0;
  std::vector<CrossValCell> table;  // grid order: rho1 outer, sigma inner
};

struct CrossValOptions {
  Constraint constraint = Constraint::cardinality(1);
  PalmConfig palm;
  double mu = 0.0;
  double split_fraction = 0.75;  // chronological split, no shuffling
  Metric metric = Metric::normalized_error;
  double rho2_override = -1.0;   // < 0 uses the default rho1 * ||S||_F^2
};

// Grid search over (rho1, sigma): fit PALM on the chronological training
// split of `train`, score the chosen metric on the remaining columns, and
// return the extremal cell (argmin for normalized error, argmax for cosine
// score; ties keep the first cell in grid order). Failed fits are recorded
// in the table and excluded from selection.
CrossValResult cross_validate(const TimeSeriesData& train, const Eigen::MatrixXd& s_cov,
                              const std::vector<double>& rho1_grid,
                              const std::vector<double>& sigma_grid,
                              const CrossValOptions& options);

// Score table CSV with header rho1,sigma,metric,value,status.
void write_score_table_csv(const std::string& path, const CrossValResult& result, Metric metric);

}  // namespace lcvar
