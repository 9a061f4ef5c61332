#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wrobust/training.hpp"

namespace wrobust {

enum class Task {
  Location,
  SparseLocation,
  Covariance,
  BandedCov,
  SparseCov,
  EllipticalLocation,
  EllipticalCov,
  Regression,
};

enum class ModelKind { M1, M2, M3, Shift, RegressionCauchy };

std::string task_name(Task t);
std::string model_name(ModelKind m);
Task task_from_name(const std::string& s);
ModelKind model_from_name(const std::string& s);

struct ExperimentConfig {
  Task task = Task::Location;
  std::vector<ModelKind> models = {ModelKind::M2};
  std::vector<int> p_grid = {10};
  std::vector<int> n_grid = {1024};
  /// Mixture weight for M1/M2/M3 and regression models; W1 shift size for
  /// the `shift` model.
  std::vector<double> alpha_grid = {0.1};
  int repeats = 10;
  TrainConfig train;
  double budget = 0.0;  // 0 -> per-task default (1, or 1/m1 for covariance)
  double m1 = 0.25;     // covariance parameter-space bounds
  double m2 = 4.0;
  double b1 = 1.0;  // regression coefficient ball
  int k = 0;        // sparsity / half-bandwidth for structured tasks
  bool cov_center_sample_mean = false;  // baseline centering mode
  bool project_beta = false;
  std::uint64_t seed = 0;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
/// Throws InvalidInputError naming the offending field.
void validate_config(const ExperimentConfig& cfg);

struct ResultRow {
  std::string task;
  std::string model;
  int p = 0;
  int n = 0;
  double alpha = 0.0;
  int seed_index = 0;
  double wgan_loss = 0.0;
  double baseline_loss = 0.0;
  int iters = 0;
  bool failed = false;
  std::string error;
  double wall_time = 0.0;  // written to timing.csv, not rows.csv
};

struct CellSummary {
  std::string task;
  std::string model;
  int p = 0;
  int n = 0;
  double alpha = 0.0;
  int repeats = 0;
  double wgan_mean = 0.0, wgan_std = 0.0, wgan_median = 0.0;
  double baseline_mean = 0.0, baseline_std = 0.0, baseline_median = 0.0;
};

struct RunOptions {
  bool smoke = false;  // restrict to p <= 20 and n <= 1024
  int jobs = 1;
  std::string out_dir;  // empty -> no files written
};

/// Runs the full (model, p, n, alpha, repeat) grid. Each cell-seed job draws
/// its data, trains, and scores against the non-robust baseline. When out_dir
/// is set, writes rows.csv, summary.csv, summary.json and timing.csv; rows.csv
/// and the summaries are byte-deterministic for a fixed config and seed.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      const RunOptions& opts);

std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows);

void write_rows_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_timing_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_summary_csv(const std::vector<CellSummary>& cells, std::ostream& out);
void write_summary_json(const std::vector<CellSummary>& cells, std::ostream& out);

/// Paper-style mean(std) cell text, e.g. "0.0853(0.0119)".
std::string format_cell(double mean, double std);

enum class BoundFamily { Dense, Sparse, Banded };

/// CSV of theory-rate values over the (p, n, eps) grid for overlay plots.
void emit_theory_curves(const std::vector<int>& p_grid,
                        const std::vector<int>& n_grid, int L,
                        const std::vector<double>& eps_grid, double C,
                        BoundFamily family, int k, std::ostream& out);

/// True regression coefficients used by the experiments: the base pattern
/// (-0.05, -0.05, 0, 0.05, 0.05) cycled to length p.
Vector experiment_beta(int p);

}  // namespace wrobust
