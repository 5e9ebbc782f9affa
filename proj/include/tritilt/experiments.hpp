#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tritilt/estimator.hpp"
#include "tritilt/glauber.hpp"
#include "tritilt/rates.hpp"

namespace tritilt {

/// Bad user input: unknown key, malformed value, or an unresolvable tilt.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TiltKind { mc, edge, triangle, hybrid };
std::string_view to_string(TiltKind kind);
TiltKind parse_tilt_kind(std::string_view text);

struct ExperimentConfig {
  ProblemSpec spec{0.35, 0.4, ThresholdMode::binomial};
  std::vector<Vertex> n{16};
  TiltKind tilt = TiltKind::triangle;
  double alpha = 1.0;
  double q = 0.35;
  /// A_r cap; "auto" in files resolves to the separating minimum of V.
  std::optional<double> r;
  bool r_auto = false;
  /// Optional triangle-density interval J.
  std::optional<std::pair<double, double>> tau_interval;
  double steps_coeff = 5e4;
  double burnin_coeff = 10.0;
  double budget_frac = 1.0;
  std::uint64_t seed = 1;
  unsigned replicas = 1;
  bool exact_psi = false;
  bool full = false;
  std::string out;

  /// Sets one key from text. Keys match the CLI long flags without dashes.
  /// Throws ConfigError.
  void apply(std::string_view key, std::string_view value);
  /// Flat `key = value` lines; '#' starts a comment.
  static ExperimentConfig parse(std::string_view text, ExperimentConfig base);
  static ExperimentConfig parse(std::string_view text);
  std::string serialize() const;
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Concrete Gibbs parameters of the configured tilt. Throws ConfigError.
TiltParams resolve_tilt(const ExperimentConfig& config);
std::optional<ConstraintSet> resolve_constraint(const ExperimentConfig& config);

struct Budget {
  std::uint64_t observed = 0;  // per replica, after burn-in
  std::uint64_t burnin = 0;    // per replica
  std::uint64_t total() const { return observed + burnin; }
};
/// budget_frac * steps_coeff * n^2 ln n observed steps split across replicas,
/// each replica adding its own burn-in of burnin_coeff * n^2 ln n.
Budget resolve_budget(const ExperimentConfig& config, Vertex n);

struct RunOutput {
  EstimateReport report;
  TiltParams params;
  std::optional<ConstraintSet> constraint;
  Budget budget;
  std::vector<std::uint64_t> edge_histogram;  // filled on request
};

/// Runs `replicas` chains on threads and merges them in replica order.
RunOutput run_estimate(const ExperimentConfig& config, Vertex n,
                       bool with_histogram = false);

/// One flat JSON object: provenance header plus the report fields.
nlohmann::json run_json(const ExperimentConfig& config, Vertex n,
                        const RunOutput& run);

/// Scientific notation below 1e-3 in magnitude, plain otherwise.
std::string format_number(double x);

/// Provenance lines ("# key=value") for CSV outputs.
std::string csv_header_comment(const ExperimentConfig& config);

struct TableColumn {
  std::string label;
  ExperimentConfig config;
  /// Largest n at which the column is run; larger rows print "---".
  Vertex max_n = 0;
};

/// The runs behind t1..t4, before execution.
std::vector<TableColumn> table_columns(std::string_view name,
                                       const ExperimentConfig& base);
std::vector<Vertex> table_sizes(std::string_view name, bool full);

/// Runs a table and returns its CSV; `progress` receives one line per cell.
std::string run_table(std::string_view name, const ExperimentConfig& base,
                      std::ostream* progress = nullptr);

/// Stationary branches of V(.; h_p, beta, alpha) on beta in [0, beta_max].
std::string curve_phase_csv(const ExperimentConfig& config, double beta_max,
                            int points);
/// Asymptotic second moment of (h_p, beta, alpha) with and without the cap.
std::string curve_second_moment_csv(const ExperimentConfig& config,
                                    double beta_max, int points);

nlohmann::json phase_json(const ExperimentConfig& config,
                          const std::vector<double>& alphas);
nlohmann::json oracle_json(const ExperimentConfig& config, Vertex n,
                           bool allow_eight);

}  // namespace tritilt
