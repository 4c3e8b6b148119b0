#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lcvar/constraint.hpp"
#include "lcvar/evaluation.hpp"
#include "lcvar/gp.hpp"
#include "lcvar/palm.hpp"

namespace lcvar {

// Configuration or IO problem; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotConverged = 1;
inline constexpr int kExitConfigError = 2;

struct ModelSection {
  std::string kind;  // "sparse" | "lowrank" | "import"
  int p = 0;
  int nnz = 0;
  double spectral_radius = 0.95;
  int rank = 0;
  std::string a_csv;
  std::string q_csv;
};

struct DataSection {
  int n = 0;        // training series length
  int m = 0;        // test series length
  int n_steady = 0; // steady-state sample count N
  double noise_sigma = 1.0;
  int burn_in = -1;
  int spacing = -1;
};

struct ProblemSection {
  double rho1 = 1.0;
  double rho2 = -1.0;  // < 0 picks the default rho1 * ||S||_F^2
  double mu = 0.0;
  double sigma = 1.0;  // Q = sigma^2 I for the fit
};

struct SolverSection {
  std::string kind = "palm";  // "palm" | "gp"
  PalmConfig palm;
  GpConfig gp;
};

struct FitSection {
  std::string data_dir;  // where train.csv / steady.csv live; empty = out_dir
};

struct EvalSection {
  std::string estimate_csv;
  std::string test_csv;
};

struct CompareSection {
  int count = 40;
  int p_min = 3;
  int p_max = 40;
  std::vector<double> alphas = {0.5, 0.25, 0.125};  // sparsity fractions s/p^2
  double noise_sigma = 1.0;
  int bisect_max_rounds = 30;
  std::vector<std::string> import_a_csvs;  // optional continuous-time matrices
};

struct SweepSection {
  std::string data_dir;
  std::vector<double> rho1_grid;
  std::vector<double> sigma_grid;
  double split_fraction = 0.75;
  std::string metric = "normalized_error";
};

// One strict-parsed configuration document. Unknown keys anywhere are
// rejected; each subcommand validates that the sections it needs are present.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string out_dir;
  std::optional<ModelSection> model;
  std::optional<DataSection> data;
  std::optional<ProblemSection> problem;
  std::optional<Constraint> constraint;
  std::optional<SolverSection> solver;
  std::optional<FitSection> fit;
  std::optional<EvalSection> eval;
  std::optional<CompareSection> compare;
  std::optional<SweepSection> sweep;
  nlohmann::json resolved;  // echoed into every report.json
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const nlohmann::json& j);

// Subcommands. Each writes its outputs plus a report.json echoing the
// resolved config into out_dir and returns an exit code.
int cmd_generate(const ExperimentConfig& config);
int cmd_fit(const ExperimentConfig& config);
int cmd_eval(const ExperimentConfig& config);
int cmd_compare(const ExperimentConfig& config);
int cmd_sweep(const ExperimentConfig& config);

}  // namespace lcvar
