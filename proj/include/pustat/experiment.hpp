#ifndef PUSTAT_EXPERIMENT_HPP_
#define PUSTAT_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pustat/kernels.hpp"
#include "pustat/process.hpp"

namespace pustat {

enum class ExperimentKind {
  moments,
  clt_rate,
  regimes,
  concentration,
  fourth_moment,
  chaos_identity
};
const char* kind_name(ExperimentKind kind);

enum class WindowShape { box, ball, growing_box };

struct WindowConfig {
  WindowShape shape = WindowShape::box;
  int dim = 2;
  /// Box half-width or ball radius (unused for growing boxes).
  double extent = 0.5;
  std::vector<double> center;  // empty: origin
};

/// Kernel description as written in the config file.
struct KernelConfig {
  std::string family = "gilbert";
  double delta = 0.1;
  std::optional<double> torus_period;
  int face_dim = 1;
  int k = 2;
  std::string domain = "points";
  /// product_degenerate: g(x) = x_0 - center, |g| <= half_width.
  double center = 0.5;
  double half_width = 0.5;
};

/// An experiment read from a JSON file. Every key is optional except
/// "kind"; see README for the dialect.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::moments;
  KernelConfig kernel;
  WindowConfig window;
  IntensityForm form = IntensityForm::scaled;
  ReferenceMeasure reference = ReferenceMeasure::lebesgue_on_window;
  std::optional<MarkLaw> marks;
  std::vector<double> t;
  /// Optional v_t schedule (regime classification). When `alpha` is absent
  /// the kernel is rescaled by alpha_t = v_t^{-1/d}.
  std::vector<double> v_t;
  std::vector<double> alpha;
  std::size_t replicates = 100;
  std::size_t mc_samples = 20000;
  std::size_t inner_samples = 64;
  std::uint64_t seed = 1;
  /// "auto" (grid for local kernels), "naive" or "grid".
  std::string mode = "auto";
  bool theory = true;
  bool bounds = false;
  bool plot = false;
  bool abort_on_instability = true;
  std::vector<double> u_grid;
};

/// Parses and validates; throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Key-sorted JSON rendering with every field present; parse_config of the
/// result reproduces the config.
std::string canonical_json(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical rendering, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct ResultRow {
  std::string kind;
  double t = 0.0;
  std::optional<double> v_t;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::optional<double> emp_mean, emp_mean_se, emp_var, emp_var_se;
  std::optional<double> theory_mean, theory_var;
  std::optional<double> ks, w1, fourth_gap, B, B_prime;
  std::string regime;
  std::optional<std::int64_t> bound_violations;

  bool operator==(const ResultRow&) const = default;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<ResultRow> rows;
  /// Raw U-statistic values per schedule entry (not written to the CSV).
  std::vector<std::vector<double>> samples;
  double wall_clock_seconds = 0.0;
};

/// Runs the experiment with `workers` threads. Results do not depend on the
/// worker count.
ExperimentResult run_experiment(const ExperimentConfig& config, int workers = 1);

enum class OutputFormat { csv, jsonl };

/// Fixed column order of the CSV schema.
const std::vector<std::string>& csv_columns();
std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_jsonl(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_jsonl(const std::string& text);
std::vector<ResultRow> parse_csv(const std::string& text);

/// Writes results.{csv,jsonl} and meta.json into `dir`; with `plot_data`
/// also per-column (t, y) series files and a log-log SVG chart. Throws
/// std::runtime_error when the directory is not writable.
void write_results(const ExperimentResult& result, const std::filesystem::path& dir,
                   OutputFormat format, bool plot_data);

/// Plain-text summary of a results file (CSV or JSON lines).
std::string report_summary(const std::vector<ResultRow>& rows);

}  // namespace pustat

#endif  // PUSTAT_EXPERIMENT_HPP_
