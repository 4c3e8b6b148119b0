#include "lcvar/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "lcvar/csv.hpp"
#include "lcvar/model.hpp"
#include "lcvar/proximal.hpp"

namespace lcvar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
T get_required(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T get_optional(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

ModelSection parse_model(const json& j) {
  check_keys(j, {"kind", "p", "nnz", "spectral_radius", "rank", "a_csv", "q_csv"}, "model");
  ModelSection m;
  m.kind = get_required<std::string>(j, "kind", "model");
  if (m.kind == "sparse") {
    m.p = get_required<int>(j, "p", "model");
    m.nnz = get_required<int>(j, "nnz", "model");
    m.spectral_radius = get_optional<double>(j, "spectral_radius", 0.95, "model");
  } else if (m.kind == "lowrank") {
    m.p = get_required<int>(j, "p", "model");
    m.rank = get_required<int>(j, "rank", "model");
  } else if (m.kind == "import") {
    m.a_csv = get_required<std::string>(j, "a_csv", "model");
    m.q_csv = get_optional<std::string>(j, "q_csv", "", "model");
  } else {
    throw ConfigError("model: kind must be sparse, lowrank, or import");
  }
  return m;
}

DataSection parse_data(const json& j) {
  check_keys(j, {"n", "m", "N", "noise_sigma", "burn_in", "spacing"}, "data");
  DataSection d;
  d.n = get_required<int>(j, "n", "data");
  d.m = get_required<int>(j, "m", "data");
  d.n_steady = get_required<int>(j, "N", "data");
  d.noise_sigma = get_optional<double>(j, "noise_sigma", 1.0, "data");
  d.burn_in = get_optional<int>(j, "burn_in", -1, "data");
  d.spacing = get_optional<int>(j, "spacing", -1, "data");
  if (d.n < 2 || d.m < 2 || d.n_steady < 2) {
    throw ConfigError("data: n, m, and N must all be >= 2");
  }
  return d;
}

ProblemSection parse_problem(const json& j) {
  check_keys(j, {"rho1", "rho2", "mu", "sigma"}, "problem");
  ProblemSection p;
  p.rho1 = get_required<double>(j, "rho1", "problem");
  p.rho2 = get_optional<double>(j, "rho2", -1.0, "problem");
  p.mu = get_optional<double>(j, "mu", 0.0, "problem");
  p.sigma = get_required<double>(j, "sigma", "problem");
  return p;
}

Constraint parse_constraint(const json& j) {
  check_keys(j, {"kind", "bound"}, "constraint");
  ConstraintKind kind;
  try {
    kind = constraint_kind_from_string(get_required<std::string>(j, "kind", "constraint"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("constraint: ") + e.what());
  }
  switch (kind) {
    case ConstraintKind::cardinality:
      return Constraint::cardinality(get_required<int>(j, "bound", "constraint"));
    case ConstraintKind::rank:
      return Constraint::rank(get_required<int>(j, "bound", "constraint"));
    case ConstraintKind::l1_ball:
      return Constraint::l1_ball(get_required<double>(j, "bound", "constraint"));
    case ConstraintKind::nuclear_ball:
      return Constraint::nuclear_ball(get_required<double>(j, "bound", "constraint"));
  }
  throw ConfigError("constraint: bad kind");
}

SolverSection parse_solver(const json& j) {
  SolverSection s;
  s.kind = get_required<std::string>(j, "kind", "solver");
  if (s.kind == "palm") {
    check_keys(j, {"kind", "gamma1", "gamma2", "max_iters", "tol_step", "tol_couple",
                   "assert_monotone"},
               "solver");
    s.palm.gamma1 = get_optional<double>(j, "gamma1", 2.0, "solver");
    s.palm.gamma2 = get_optional<double>(j, "gamma2", 2.0, "solver");
    s.palm.max_iters = get_optional<int>(j, "max_iters", 5000, "solver");
    s.palm.tol_step = get_optional<double>(j, "tol_step", 1e-5, "solver");
    s.palm.tol_couple = get_optional<double>(j, "tol_couple", 1e-7, "solver");
    s.palm.assert_monotone = get_optional<bool>(j, "assert_monotone", true, "solver");
  } else if (s.kind == "gp") {
    check_keys(j, {"kind", "armijo_sigma", "armijo_beta", "initial_step", "max_backtracks",
                   "max_iters", "tol_step"},
               "solver");
    s.gp.armijo_sigma = get_optional<double>(j, "armijo_sigma", 0.1, "solver");
    s.gp.armijo_beta = get_optional<double>(j, "armijo_beta", 0.5, "solver");
    s.gp.initial_step = get_optional<double>(j, "initial_step", 1.0, "solver");
    s.gp.max_backtracks = get_optional<int>(j, "max_backtracks", 50, "solver");
    s.gp.max_iters = get_optional<int>(j, "max_iters", 5000, "solver");
    s.gp.tol_step = get_optional<double>(j, "tol_step", 1e-5, "solver");
  } else {
    throw ConfigError("solver: kind must be palm or gp");
  }
  return s;
}

CompareSection parse_compare(const json& j) {
  check_keys(j, {"count", "p_min", "p_max", "alphas", "noise_sigma", "bisect_max_rounds",
                 "import_a_csvs"},
             "compare");
  CompareSection c;
  c.count = get_optional<int>(j, "count", 40, "compare");
  c.p_min = get_optional<int>(j, "p_min", 3, "compare");
  c.p_max = get_optional<int>(j, "p_max", 40, "compare");
  c.alphas = get_optional<std::vector<double>>(j, "alphas", {0.5, 0.25, 0.125}, "compare");
  c.noise_sigma = get_optional<double>(j, "noise_sigma", 1.0, "compare");
  c.bisect_max_rounds = get_optional<int>(j, "bisect_max_rounds", 30, "compare");
  c.import_a_csvs =
      get_optional<std::vector<std::string>>(j, "import_a_csvs", {}, "compare");
  if (c.import_a_csvs.empty()) {
    if (c.count < 2) throw ConfigError("compare: need a suite of at least 2 systems");
    if (c.p_min < 3 || c.p_max < c.p_min) throw ConfigError("compare: bad p range");
  }
  if (c.alphas.empty()) throw ConfigError("compare: alphas must be nonempty");
  for (double a : c.alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("compare: alphas must lie in (0,1]");
  }
  return c;
}

SweepSection parse_sweep(const json& j) {
  check_keys(j, {"data_dir", "rho1_grid", "sigma_grid", "split_fraction", "metric"}, "sweep");
  SweepSection s;
  s.data_dir = get_required<std::string>(j, "data_dir", "sweep");
  s.rho1_grid = get_required<std::vector<double>>(j, "rho1_grid", "sweep");
  s.sigma_grid = get_required<std::vector<double>>(j, "sigma_grid", "sweep");
  s.split_fraction = get_optional<double>(j, "split_fraction", 0.75, "sweep");
  s.metric = get_optional<std::string>(j, "metric", "normalized_error", "sweep");
  if (s.metric != "normalized_error" && s.metric != "cosine_score") {
    throw ConfigError("sweep: metric must be normalized_error or cosine_score");
  }
  return s;
}

std::uint64_t substream(std::uint64_t seed, std::uint64_t k) {
  // Cheap deterministic stream split; not cryptographic.
  return seed ^ (0x9e3779b97f4a7c15ULL * (k + 1));
}

fs::path prepare_out_dir(const ExperimentConfig& config) {
  if (config.out_dir.empty()) throw ConfigError("out_dir is required");
  fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create out_dir '" + config.out_dir + "': " + ec.message());
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError("write to '" + path.string() + "' failed");
}

void write_report(const fs::path& dir, const std::string& command,
                  const ExperimentConfig& config, json extra) {
  extra["command"] = command;
  extra["config"] = config.resolved;
  write_json(dir / "report.json", extra);
}

// Builds the problem data (C, D, S, Q) from a generated bundle directory.
struct LoadedProblem {
  TimeSeriesData train;
  Eigen::MatrixXd s_cov;
  ProblemSpec spec;
};

LoadedProblem load_problem(const fs::path& data_dir, const ProblemSection& prob) {
  fs::path train_path = data_dir / "train.csv";
  fs::path steady_path = data_dir / "steady.csv";
  Eigen::MatrixXd train_mat, steady_mat;
  try {
    train_mat = read_matrix_csv(train_path.string());
    steady_mat = read_matrix_csv(steady_path.string());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("fit: ") + e.what());
  }
  TimeSeriesData train(train_mat);
  SteadyStateData steady(steady_mat);
  if (steady.p() != train.p()) {
    throw ConfigError("fit: train.csv and steady.csv disagree on the state dimension");
  }
  const int p = train.p();
  LoadedProblem out{std::move(train), sample_covariance(steady), ProblemSpec{}};
  out.spec.c = out.train.lagged();
  out.spec.d = out.train.led();
  out.spec.s_cov = out.s_cov;
  out.spec.q = prob.sigma * prob.sigma * Eigen::MatrixXd::Identity(p, p);
  out.spec.rho1 = prob.rho1;
  out.spec.rho2 = prob.rho2 > 0.0 ? prob.rho2 : default_rho2(prob.rho1, out.s_cov);
  out.spec.mu = prob.mu;
  return out;
}

json constraint_json(const Constraint& c) {
  json j;
  j["kind"] = to_string(c.kind);
  if (c.kind == ConstraintKind::cardinality || c.kind == ConstraintKind::rank) {
    j["bound"] = c.int_bound;
  } else {
    j["bound"] = c.real_bound;
  }
  return j;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  check_keys(j,
             {"seed", "out_dir", "model", "data", "problem", "constraint", "solver", "fit",
              "eval", "compare", "sweep"},
             "config");
  ExperimentConfig c;
  c.seed = get_optional<std::uint64_t>(j, "seed", 0, "config");
  c.out_dir = get_optional<std::string>(j, "out_dir", "", "config");
  if (j.contains("model")) c.model = parse_model(j.at("model"));
  if (j.contains("data")) c.data = parse_data(j.at("data"));
  if (j.contains("problem")) c.problem = parse_problem(j.at("problem"));
  if (j.contains("constraint")) {
    try {
      c.constraint = parse_constraint(j.at("constraint"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("constraint: ") + e.what());
    }
  }
  if (j.contains("solver")) c.solver = parse_solver(j.at("solver"));
  if (j.contains("fit")) {
    check_keys(j.at("fit"), {"data_dir"}, "fit");
    c.fit = FitSection{get_optional<std::string>(j.at("fit"), "data_dir", "", "fit")};
  }
  if (j.contains("eval")) {
    check_keys(j.at("eval"), {"estimate_csv", "test_csv"}, "eval");
    c.eval = EvalSection{get_required<std::string>(j.at("eval"), "estimate_csv", "eval"),
                         get_required<std::string>(j.at("eval"), "test_csv", "eval")};
  }
  if (j.contains("compare")) c.compare = parse_compare(j.at("compare"));
  if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep"));
  c.resolved = j;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

int cmd_generate(const ExperimentConfig& config) {
  if (!config.model || !config.data) {
    throw ConfigError("generate: config needs 'model' and 'data' sections");
  }
  fs::path dir = prepare_out_dir(config);
  const ModelSection& ms = *config.model;
  const DataSection& ds = *config.data;

  json meta;
  Eigen::MatrixXd a;
  Eigen::MatrixXd q;
  if (ms.kind == "sparse") {
    VarModel m = generate_sparse_stable(ms.p, ms.nnz, ms.spectral_radius, config.seed);
    a = m.a;
    meta["nnz"] = ms.nnz;
  } else if (ms.kind == "lowrank") {
    VarModel m = generate_lowrank_stable(ms.p, ms.rank, config.seed);
    a = m.a;
    meta["rank"] = ms.rank;
  } else {
    try {
      a = read_matrix_csv(ms.a_csv);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("generate: ") + e.what());
    }
  }
  const int p = static_cast<int>(a.rows());
  if (!ms.q_csv.empty()) {
    try {
      q = read_matrix_csv(ms.q_csv);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("generate: ") + e.what());
    }
  } else {
    q = ds.noise_sigma * ds.noise_sigma * Eigen::MatrixXd::Identity(p, p);
  }
  VarModel model(a, q);
  meta["p"] = p;
  meta["seed"] = config.seed;
  meta["kind"] = ms.kind == "import" ? "imported" : ms.kind;
  meta["spectral_radius"] = model.spectral_radius();

  const int burn = ds.burn_in >= 0 ? ds.burn_in : 10 * p;
  auto sim_tail = [&](int len, std::uint64_t seed) {
    TimeSeriesData full = simulate(model, Eigen::VectorXd::Zero(p), burn + len,
                                   ds.noise_sigma, seed);
    return Eigen::MatrixXd(full.states.rightCols(len));
  };
  Eigen::MatrixXd train = sim_tail(ds.n, substream(config.seed, 1));
  Eigen::MatrixXd test = sim_tail(ds.m, substream(config.seed, 2));
  SteadyStateData steady = sample_steady_state(
      model, ds.n_steady, substream(config.seed, 3), {ds.burn_in, ds.spacing});

  write_matrix_csv((dir / "A.csv").string(), model.a);
  write_matrix_csv((dir / "Q.csv").string(), model.q);
  write_matrix_csv((dir / "train.csv").string(), train);
  write_matrix_csv((dir / "test.csv").string(), test);
  write_matrix_csv((dir / "steady.csv").string(), steady.samples);
  write_json(dir / "meta.json", meta);

  json extra;
  extra["outputs"] = {"A.csv", "Q.csv", "train.csv", "test.csv", "steady.csv", "meta.json"};
  write_report(dir, "generate", config, extra);
  return kExitOk;
}

int cmd_fit(const ExperimentConfig& config) {
  if (!config.problem || !config.constraint || !config.solver) {
    throw ConfigError("fit: config needs 'problem', 'constraint', and 'solver' sections");
  }
  fs::path dir = prepare_out_dir(config);
  fs::path data_dir = (config.fit && !config.fit->data_dir.empty())
                          ? fs::path(config.fit->data_dir)
                          : dir;
  LoadedProblem lp = load_problem(data_dir, *config.problem);
  try {
    config.constraint->validate_for_dimension(lp.spec.p());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("fit: ") + e.what());
  }

  json extra;
  extra["constraint"] = constraint_json(*config.constraint);
  extra["solver"] = config.solver->kind;
  extra["rho2_effective"] = lp.spec.rho2;
  int exit_code = kExitOk;
  if (config.solver->kind == "palm") {
    SolveReport rep = palm_solve(lp.spec, *config.constraint, config.solver->palm);
    write_matrix_csv((dir / "estimate.csv").string(), rep.estimate);
    write_trace_csv((dir / "trace.csv").string(), rep);
    extra["status"] = to_string(rep.status);
    extra["iters"] = rep.iters;
    extra["final_phi"] = rep.final_phi;
    extra["e_x"] = rep.trace.empty() ? 0.0 : rep.last().e_x;
    extra["e_y"] = rep.trace.empty() ? 0.0 : rep.last().e_y;
    extra["e_xy"] = rep.trace.empty() ? 0.0 : rep.last().e_xy;
    extra["delta_min"] = rep.delta_min;
    extra["wall_time_s"] = rep.wall_time_s;
    extra["estimate_nnz"] = count_nonzeros(rep.estimate);
    extra["estimate_rank"] = numerical_rank(rep.estimate);
    if (rep.status != SolveStatus::converged) exit_code = kExitNotConverged;
  } else {
    GpReport rep = gp_solve(lp.spec, *config.constraint, config.solver->gp);
    write_matrix_csv((dir / "estimate.csv").string(), rep.estimate);
    write_gp_trace_csv((dir / "trace.csv").string(), rep);
    extra["status"] = to_string(rep.status);
    extra["iters"] = rep.iters;
    extra["final_f"] = rep.final_f;
    extra["projections_total"] = rep.projections_total;
    extra["wall_time_s"] = rep.wall_time_s;
    extra["estimate_nnz"] = count_nonzeros(rep.estimate);
    if (rep.status != GpStatus::converged) exit_code = kExitNotConverged;
  }
  write_report(dir, "fit", config, extra);
  return exit_code;
}

int cmd_eval(const ExperimentConfig& config) {
  if (!config.eval) throw ConfigError("eval: config needs an 'eval' section");
  fs::path dir = prepare_out_dir(config);
  Eigen::MatrixXd estimate, test_mat;
  try {
    estimate = read_matrix_csv(config.eval->estimate_csv);
    test_mat = read_matrix_csv(config.eval->test_csv);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("eval: ") + e.what());
  }
  if (estimate.rows() != test_mat.rows()) {
    throw ConfigError("eval: estimate and test data disagree on the state dimension");
  }
  TimeSeriesData test(test_mat);
  EvalResult res = evaluate(estimate, test);

  json metrics;
  metrics["normalized_error"] = res.normalized_error;
  metrics["cosine_score"] = res.cosine_score;
  metrics["m"] = res.test_length;
  metrics["skipped_terms"] = {{"normalized_error", res.skipped_error_terms},
                              {"cosine_score", res.skipped_cosine_terms}};
  write_json(dir / "metrics.json", metrics);
  json extra;
  extra["metrics"] = metrics;
  write_report(dir, "eval", config, extra);
  return kExitOk;
}

namespace {

struct MethodOutcome {
  std::string name;
  double normalized_error = 0.0;
  double cosine_score = 0.0;
  int nnz = 0;
  std::string status;
};

}  // namespace

int cmd_compare(const ExperimentConfig& config) {
  if (!config.compare || !config.problem) {
    throw ConfigError("compare: config needs 'compare' and 'problem' sections");
  }
  fs::path dir = prepare_out_dir(config);
  const CompareSection& cs = *config.compare;
  const ProblemSection& prob = *config.problem;
  PalmConfig palm_cfg = config.solver ? config.solver->palm : PalmConfig{};
  GpConfig gp_cfg = config.solver ? config.solver->gp : GpConfig{};

  const bool imported = !cs.import_a_csvs.empty();
  const int count = imported ? static_cast<int>(cs.import_a_csvs.size()) : cs.count;

  std::ofstream systems_out(dir / "systems.csv");
  if (!systems_out) throw ConfigError("compare: cannot open systems.csv");
  systems_out << "system,p,alpha,method,normalized_error,cosine_score,nnz,status\n";

  // wins[alpha][metric][method]
  std::map<double, std::array<std::array<int, 3>, 2>> wins;
  std::map<double, int> solved;
  for (double alpha : cs.alphas) {
    wins[alpha] = {{{0, 0, 0}, {0, 0, 0}}};
    solved[alpha] = 0;
  }
  std::vector<std::string> failures;

  for (int sys = 0; sys < count; ++sys) {
    try {
      Eigen::MatrixXd a_c;
      if (imported) {
        a_c = read_matrix_csv(cs.import_a_csvs[sys]);
      } else {
        // Synthetic stand-ins: random continuous-time matrices with p swept
        // across [p_min, p_max].
        int p_sys = cs.p_min + static_cast<int>(std::lround(
                                   double(sys) * (cs.p_max - cs.p_min) /
                                   std::max(1, count - 1)));
        std::mt19937_64 rng(substream(config.seed, 100 + sys));
        std::normal_distribution<double> gauss(0.0, 1.0);
        a_c.resize(p_sys, p_sys);
        for (int i = 0; i < p_sys; ++i)
          for (int j = 0; j < p_sys; ++j) a_c(i, j) = gauss(rng) / std::sqrt(double(p_sys));
      }
      const int p = static_cast<int>(a_c.rows());
      Eigen::MatrixXd a = rescale_to_stable(discretize(a_c, 1.0), 2.0);
      VarModel model(a, cs.noise_sigma * cs.noise_sigma * Eigen::MatrixXd::Identity(p, p));

      const int n = std::max(2, p / 2);
      const int m = std::max(2, p);
      const int n_steady = 5 * n;
      const int burn = 10 * p;
      auto sim_tail = [&](int len, std::uint64_t seed) {
        TimeSeriesData full =
            simulate(model, Eigen::VectorXd::Zero(p), burn + len, cs.noise_sigma, seed);
        return Eigen::MatrixXd(full.states.rightCols(len));
      };
      TimeSeriesData train(sim_tail(n, substream(config.seed, 1000 + sys)));
      TimeSeriesData test(sim_tail(m, substream(config.seed, 2000 + sys)));
      SteadyStateData steady =
          sample_steady_state(model, n_steady, substream(config.seed, 3000 + sys));

      ProblemSpec spec;
      spec.c = train.lagged();
      spec.d = train.led();
      spec.s_cov = sample_covariance(steady);
      spec.q = prob.sigma * prob.sigma * Eigen::MatrixXd::Identity(p, p);
      spec.rho1 = prob.rho1;
      spec.rho2 = prob.rho2 > 0.0 ? prob.rho2 : default_rho2(prob.rho1, spec.s_cov);
      spec.mu = prob.mu;

      for (double alpha : cs.alphas) {
        int s = std::clamp(static_cast<int>(std::lround(alpha * p * p)), 1, p * p);

        SolveReport card = palm_solve(spec, Constraint::cardinality(s), palm_cfg);
        EvalResult card_ev = evaluate(card.estimate, test);

        double base = l1_norm(card.estimate);
        if (!(base > 0.0)) base = 1.0;
        int tol_nnz = std::max(1, static_cast<int>(std::lround(0.02 * s)));
        BisectResult bis = bisect_l1_threshold(spec, s, base / 16.0, base * 16.0, tol_nnz,
                                               cs.bisect_max_rounds, palm_cfg);
        EvalResult l1_ev = evaluate(bis.report.estimate, test);

        GpReport gp = gp_solve(spec, Constraint::l1_ball(bis.l), gp_cfg);
        EvalResult gp_ev = evaluate(gp.estimate, test);

        MethodOutcome outcomes[3] = {
            {"palm_card", card_ev.normalized_error, card_ev.cosine_score,
             count_nonzeros(card.estimate), to_string(card.status)},
            {"palm_l1", l1_ev.normalized_error, l1_ev.cosine_score, bis.achieved_nnz,
             to_string(bis.report.status)},
            {"gp_l1", gp_ev.normalized_error, gp_ev.cosine_score,
             count_nonzeros(gp.estimate), to_string(gp.status)},
        };
        for (const MethodOutcome& o : outcomes) {
          systems_out << sys << ',' << p << ',' << format_double(alpha) << ',' << o.name
                      << ',' << format_double(o.normalized_error) << ','
                      << format_double(o.cosine_score) << ',' << o.nnz << ',' << o.status
                      << '\n';
        }
        // Exactly one winner per metric; ties keep the earlier method.
        int best_ne = 0, best_cs = 0;
        for (int i = 1; i < 3; ++i) {
          if (outcomes[i].normalized_error < outcomes[best_ne].normalized_error) best_ne = i;
          if (outcomes[i].cosine_score > outcomes[best_cs].cosine_score) best_cs = i;
        }
        wins[alpha][0][best_ne] += 1;
        wins[alpha][1][best_cs] += 1;
        solved[alpha] += 1;
      }
    } catch (const std::exception& e) {
      failures.push_back("system " + std::to_string(sys) + ": " + e.what());
      std::cerr << "compare: " << failures.back() << '\n';
    }
  }
  systems_out.close();

  std::ofstream summary_out(dir / "summary.csv");
  if (!summary_out) throw ConfigError("compare: cannot open summary.csv");
  summary_out << "alpha,metric,palm_card,palm_l1,gp_l1,solved\n";
  json summary_json = json::array();
  const char* metric_names[2] = {"normalized_error", "cosine_score"};
  for (double alpha : cs.alphas) {
    for (int metric = 0; metric < 2; ++metric) {
      const auto& w = wins[alpha][metric];
      summary_out << format_double(alpha) << ',' << metric_names[metric] << ',' << w[0]
                  << ',' << w[1] << ',' << w[2] << ',' << solved[alpha] << '\n';
      summary_json.push_back({{"alpha", alpha},
                              {"metric", metric_names[metric]},
                              {"palm_card", w[0]},
                              {"palm_l1", w[1]},
                              {"gp_l1", w[2]},
                              {"solved", solved[alpha]}});
    }
  }
  summary_out.close();

  json extra;
  extra["summary"] = summary_json;
  extra["failures"] = failures;
  write_report(dir, "compare", config, extra);
  return failures.empty() ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const ExperimentConfig& config) {
  if (!config.sweep || !config.constraint) {
    throw ConfigError("sweep: config needs 'sweep' and 'constraint' sections");
  }
  fs::path dir = prepare_out_dir(config);
  const SweepSection& sw = *config.sweep;

  Eigen::MatrixXd train_mat, steady_mat;
  try {
    train_mat = read_matrix_csv((fs::path(sw.data_dir) / "train.csv").string());
    steady_mat = read_matrix_csv((fs::path(sw.data_dir) / "steady.csv").string());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  TimeSeriesData train(train_mat);
  SteadyStateData steady(steady_mat);
  Eigen::MatrixXd s_cov = sample_covariance(steady);

  CrossValOptions options;
  options.constraint = *config.constraint;
  options.palm = config.solver ? config.solver->palm : PalmConfig{};
  options.mu = config.problem ? config.problem->mu : 0.0;
  options.rho2_override = config.problem ? config.problem->rho2 : -1.0;
  options.split_fraction = sw.split_fraction;
  options.metric =
      sw.metric == "cosine_score" ? Metric::cosine_score : Metric::normalized_error;

  CrossValResult result;
  try {
    result = cross_validate(train, s_cov, sw.rho1_grid, sw.sigma_grid, options);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  write_score_table_csv((dir / "score_table.csv").string(), result, options.metric);

  json extra;
  extra["best_rho1"] = result.best_rho1;
  extra["best_sigma"] = result.best_sigma;
  extra["best_value"] = result.best_value;
  extra["metric"] = sw.metric;
  write_report(dir, "sweep", config, extra);
  return kExitOk;
}

}  // namespace lcvar
