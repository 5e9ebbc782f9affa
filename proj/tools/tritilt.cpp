// Command-line driver: phase, estimate, table, curve, oracle, hist-edges.
//
// Exit codes: 0 ok, 2 configuration error, 3 runtime failure.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tritilt/experiments.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

const std::vector<std::string> kCommonKeys = {
    "p",         "t",           "n",            "tilt",     "alpha",
    "q",         "r",           "j",            "steps-coeff",
    "burnin-coeff", "seed",     "replicas",     "threshold-mode",
    "out",       "budget-frac", "estimator"};

struct CommonFlags {
  std::map<std::string, std::string> values;
  std::string config_path;
  bool full = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  for (const auto& key : kCommonKeys) {
    cmd->add_option("--" + key, flags.values[key]);
  }
  cmd->add_option("--config", flags.config_path, "key = value file; flags win");
  cmd->add_flag("--full", flags.full, "include the large table rows");
}

tritilt::ExperimentConfig build_config(const CLI::App* cmd,
                                       const CommonFlags& flags) {
  tritilt::ExperimentConfig config;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) {
      throw tritilt::ConfigError("cannot read config file " + flags.config_path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    config = tritilt::ExperimentConfig::parse(buf.str(), config);
  }
  for (const auto& key : kCommonKeys) {
    if (cmd->count("--" + key) > 0) config.apply(key, flags.values.at(key));
  }
  if (flags.full) config.full = true;
  config.validate();
  return config;
}

void emit(const tritilt::ExperimentConfig& config, const std::string& text) {
  if (config.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(config.out);
  if (!out) throw std::runtime_error("cannot write " + config.out);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Importance sampling for triangle-count rare events"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TRITILT_VERSION);

  CommonFlags flags;

  auto* phase = app.add_subcommand("phase", "phase diagnostics as JSON");
  add_common(phase, flags);
  std::vector<double> alphas{2.0 / 3.0, 1.0};
  phase->add_option("--alphas", alphas, "exponents to test");

  auto* estimate = app.add_subcommand("estimate", "run the sampler, JSON lines");
  add_common(estimate, flags);
  std::string hist_out;
  estimate->add_option("--hist-out", hist_out, "also write the edge histogram");

  auto* table = app.add_subcommand("table", "reproduce a results table as CSV");
  add_common(table, flags);
  std::string table_name;
  table->add_option("name", table_name, "t1, t2, t3 or t4")->required();
  bool quiet = false;
  table->add_flag("--quiet", quiet, "no per-cell progress on stderr");

  auto* curve = app.add_subcommand("curve", "analytic curves as CSV");
  add_common(curve, flags);
  std::string curve_name;
  curve->add_option("name", curve_name, "phase or second_moment")->required();
  double beta_max = 8.0;
  int points = 401;
  curve->add_option("--beta-max", beta_max);
  curve->add_option("--points", points);

  auto* oracle = app.add_subcommand("oracle", "exact enumeration results as JSON");
  add_common(oracle, flags);
  bool allow_eight = false;
  oracle->add_flag("--allow-eight", allow_eight, "permit the n = 8 enumeration");

  auto* hist = app.add_subcommand("hist-edges", "edge counts among hits as CSV");
  add_common(hist, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (phase->parsed()) {
      const auto config = build_config(phase, flags);
      emit(config, tritilt::phase_json(config, alphas).dump(2) + "\n");
    } else if (estimate->parsed()) {
      const auto config = build_config(estimate, flags);
      std::string text;
      for (auto n : config.n) {
        const auto run = tritilt::run_estimate(config, n, !hist_out.empty());
        text += tritilt::run_json(config, n, run).dump() + "\n";
        if (!hist_out.empty()) {
          std::ofstream h(config.n.size() > 1 ? fmt::format("{}.n{}", hist_out, n)
                                              : hist_out);
          std::string csv = "edge_count,frequency\n";
          for (std::size_t e = 0; e < run.edge_histogram.size(); ++e) {
            if (run.edge_histogram[e] > 0) {
              csv += fmt::format("{},{}\n", e, run.edge_histogram[e]);
            }
          }
          h << csv;
        }
      }
      emit(config, text);
    } else if (table->parsed()) {
      const auto config = build_config(table, flags);
      emit(config, tritilt::run_table(table_name, config, quiet ? nullptr : &std::cerr));
    } else if (curve->parsed()) {
      const auto config = build_config(curve, flags);
      if (curve_name == "phase") {
        emit(config, tritilt::curve_phase_csv(config, beta_max, points));
      } else if (curve_name == "second_moment") {
        emit(config, tritilt::curve_second_moment_csv(config, beta_max, points));
      } else {
        throw tritilt::ConfigError("curve: unknown name '" + curve_name + "'");
      }
    } else if (oracle->parsed()) {
      const auto config = build_config(oracle, flags);
      std::string text;
      for (auto n : config.n) {
        text += tritilt::oracle_json(config, n, allow_eight).dump() + "\n";
      }
      emit(config, text);
    } else if (hist->parsed()) {
      const auto config = build_config(hist, flags);
      std::string text = tritilt::csv_header_comment(config);
      if (config.n.size() != 1) {
        throw tritilt::ConfigError("hist-edges: give exactly one n");
      }
      const auto run = tritilt::run_estimate(config, config.n.front(), true);
      text += "edge_count,frequency\n";
      std::uint64_t total = 0;
      for (std::size_t e = 0; e < run.edge_histogram.size(); ++e) {
        total += run.edge_histogram[e];
        if (run.edge_histogram[e] > 0) {
          text += fmt::format("{},{}\n", e, run.edge_histogram[e]);
        }
      }
      if (total == 0) throw std::runtime_error("no samples hit the rare event");
      emit(config, text);
    }
  } catch (const tritilt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
