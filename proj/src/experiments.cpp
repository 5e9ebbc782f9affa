#include "tritilt/experiments.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "tritilt/exact.hpp"
#include "tritilt/phase.hpp"

namespace tritilt {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(out)) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, text));
  }
  return out;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(
        fmt::format("{}: expected a non-negative integer, got '{}'", key, text));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, text));
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string alpha_label(double alpha) { return fmt::format("{:.4g}", alpha); }

nlohmann::json nullable(std::optional<double> x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view to_string(TiltKind kind) {
  switch (kind) {
    case TiltKind::mc:
      return "mc";
    case TiltKind::edge:
      return "edge";
    case TiltKind::triangle:
      return "triangle";
    case TiltKind::hybrid:
      return "hybrid";
  }
  return "mc";
}

TiltKind parse_tilt_kind(std::string_view text) {
  text = trim(text);
  if (text == "mc") return TiltKind::mc;
  if (text == "edge") return TiltKind::edge;
  if (text == "triangle") return TiltKind::triangle;
  if (text == "hybrid") return TiltKind::hybrid;
  throw ConfigError(fmt::format("tilt: unknown kind '{}'", text));
}

void ExperimentConfig::apply(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "p") {
    spec.p = parse_double(key, value);
  } else if (key == "t") {
    spec.t = parse_double(key, value);
  } else if (key == "n") {
    n.clear();
    for (auto part : split(value, ',')) {
      const auto v = parse_unsigned(key, part);
      if (v < 2 || v > 4096) throw ConfigError("n: each size must be in [2, 4096]");
      n.push_back(static_cast<Vertex>(v));
    }
  } else if (key == "tilt") {
    tilt = parse_tilt_kind(value);
  } else if (key == "alpha") {
    alpha = parse_double(key, value);
  } else if (key == "q") {
    q = parse_double(key, value);
  } else if (key == "r") {
    r_auto = value == "auto";
    if (value == "none" || value == "auto") {
      r.reset();
    } else {
      r = parse_double(key, value);
    }
  } else if (key == "j") {
    if (value == "none") {
      tau_interval.reset();
    } else {
      const auto parts = split(value, ':');
      if (parts.size() != 2) throw ConfigError("j: expected lo:hi");
      tau_interval = {parse_double(key, parts[0]), parse_double(key, parts[1])};
    }
  } else if (key == "steps-coeff") {
    steps_coeff = parse_double(key, value);
  } else if (key == "burnin-coeff") {
    burnin_coeff = parse_double(key, value);
  } else if (key == "budget-frac") {
    budget_frac = parse_double(key, value);
  } else if (key == "seed") {
    seed = parse_unsigned(key, value);
  } else if (key == "replicas") {
    const auto v = parse_unsigned(key, value);
    if (v < 1 || v > 1024) throw ConfigError("replicas: must be in [1, 1024]");
    replicas = static_cast<unsigned>(v);
  } else if (key == "threshold-mode") {
    try {
      spec.mode = parse_threshold_mode(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("threshold-mode: ") + e.what());
    }
  } else if (key == "estimator") {
    if (value == "exact_psi") {
      exact_psi = true;
    } else if (value == "self_normalized") {
      exact_psi = false;
    } else {
      throw ConfigError(fmt::format("estimator: unknown '{}'", value));
    }
  } else if (key == "full") {
    full = parse_bool(key, value);
  } else if (key == "out") {
    out = std::string(value);
  } else {
    throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
}

ExperimentConfig ExperimentConfig::parse(std::string_view text,
                                         ExperimentConfig base) {
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
    }
    base.apply(line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  return parse(text, ExperimentConfig{});
}

std::string ExperimentConfig::serialize() const {
  std::string sizes;
  for (std::size_t k = 0; k < n.size(); ++k) {
    sizes += fmt::format("{}{}", k ? "," : "", n[k]);
  }
  std::string text;
  text += fmt::format("p = {}\n", spec.p);
  text += fmt::format("t = {}\n", spec.t);
  text += fmt::format("threshold-mode = {}\n", to_string(spec.mode));
  text += fmt::format("n = {}\n", sizes);
  text += fmt::format("tilt = {}\n", to_string(tilt));
  text += fmt::format("alpha = {}\n", alpha);
  text += fmt::format("q = {}\n", q);
  text += fmt::format("r = {}\n", r_auto ? std::string("auto")
                                        : r ? fmt::format("{}", *r)
                                            : std::string("none"));
  text += fmt::format("j = {}\n",
                     tau_interval ? fmt::format("{}:{}", tau_interval->first,
                                                tau_interval->second)
                                  : std::string("none"));
  text += fmt::format("steps-coeff = {}\n", steps_coeff);
  text += fmt::format("burnin-coeff = {}\n", burnin_coeff);
  text += fmt::format("budget-frac = {}\n", budget_frac);
  text += fmt::format("seed = {}\n", seed);
  text += fmt::format("replicas = {}\n", replicas);
  text += fmt::format("estimator = {}\n", exact_psi ? "exact_psi" : "self_normalized");
  text += fmt::format("full = {}\n", full);
  if (!out.empty()) text += fmt::format("out = {}\n", out);
  return text;
}

void ExperimentConfig::validate() const {
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n.empty()) throw ConfigError("n: at least one size is required");
  if (!(alpha > 0.0)) throw ConfigError("alpha: must be positive");
  if (tilt == TiltKind::hybrid && !(q > 0.0 && q <= spec.t)) {
    throw ConfigError("q: hybrid tilts need 0 < q <= t");
  }
  if (r && !(*r >= spec.t && *r <= 1.0)) {
    throw ConfigError("r: the cap must lie in [t, 1]");
  }
  if (tau_interval) {
    const auto [lo, hi] = *tau_interval;
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) {
      throw ConfigError("j: need 0 <= lo <= hi <= 1");
    }
  }
  if (!(steps_coeff > 0.0)) throw ConfigError("steps-coeff: must be positive");
  if (!(burnin_coeff >= 0.0)) throw ConfigError("burnin-coeff: must be >= 0");
  if (!(budget_frac > 0.0)) throw ConfigError("budget-frac: must be positive");
}

TiltParams resolve_tilt(const ExperimentConfig& config) {
  config.validate();
  switch (config.tilt) {
    case TiltKind::mc:
      return TiltParams::source(config.spec.p);
    case TiltKind::edge:
      return TiltParams::edge(config.spec.t);
    case TiltKind::hybrid:
      return TiltParams::hybrid(config.q, config.spec.t);
    case TiltKind::triangle:
      TiltParams params;
      try {
        params = TiltParams::triangle(config.spec, config.alpha);
      } catch (const std::domain_error& e) {
        throw ConfigError(std::string("tilt: ") + e.what());
      }
      // Without a constraint the tilt must put its unique maximiser at t.
      const bool constrained =
          config.r.has_value() || config.r_auto || config.tau_interval.has_value();
      if (!constrained && !in_s_alpha(config.spec, config.alpha).member) {
        throw ConfigError(fmt::format(
            "tilt: (p,t) = ({}, {}) is outside S_alpha for alpha = {}; set r to "
            "condition the tilt",
            config.spec.p, config.spec.t, config.alpha));
      }
      return params;
  }
  throw ConfigError("tilt: unresolvable");
}

std::optional<ConstraintSet> resolve_constraint(const ExperimentConfig& config) {
  std::optional<double> cap = config.r;
  if (config.r_auto) {
    cap = separating_minimum(resolve_tilt(config));
    if (!cap) {
      throw ConfigError("r: auto needs a potential with two local maxima");
    }
  }
  if (!cap && !config.tau_interval) return std::nullopt;
  ConstraintSet c;
  if (cap) c = ConstraintSet::cap(*cap);
  if (config.tau_interval) {
    c.tau_lo = std::max(c.tau_lo, config.tau_interval->first);
    c.tau_hi = std::min(c.tau_hi, config.tau_interval->second);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Budget resolve_budget(const ExperimentConfig& config, Vertex n) {
  const double total =
      config.budget_frac * static_cast<double>(step_budget(n, config.steps_coeff));
  Budget b;
  b.observed = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::llround(total / config.replicas)));
  b.burnin = step_budget(n, config.burnin_coeff);
  return b;
}

RunOutput run_estimate(const ExperimentConfig& config, Vertex n,
                       bool with_histogram) {
  RunOutput out;
  out.params = resolve_tilt(config);
  out.constraint = resolve_constraint(config);
  out.budget = resolve_budget(config, n);

  const WeightModel model(n, config.spec, out.params);
  const std::uint64_t batch = std::max<std::uint64_t>(1, out.budget.observed / 64);

  struct Slot {
    std::optional<ImportanceAccumulator> acc;
    std::optional<EdgeHistogram> hist;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(config.replicas);
  auto work = [&](unsigned k) {
    try {
      ChainConfig cc;
      cc.n = n;
      cc.params = out.params;
      cc.constraint = out.constraint;
      cc.burnin = out.budget.burnin;
      cc.total_steps = out.budget.total();
      cc.seed = replica_seed(config.seed, k);
      ImportanceAccumulator acc(model, batch);
      if (with_histogram) {
        EdgeHistogram hist(model);
        run_chain(cc, [&](Count e, Count t) {
          acc(e, t);
          hist(e, t);
        });
        slots[k].hist.emplace(std::move(hist));
      } else {
        run_chain(cc, acc);
      }
      slots[k].acc.emplace(std::move(acc));
    } catch (...) {
      slots[k].error = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  for (unsigned k = 1; k < config.replicas; ++k) threads.emplace_back(work, k);
  work(0);
  for (auto& th : threads) th.join();
  for (auto& s : slots) {
    if (s.error) std::rethrow_exception(s.error);
  }

  ImportanceAccumulator merged = std::move(*slots[0].acc);
  for (unsigned k = 1; k < config.replicas; ++k) merged.merge(std::move(*slots[k].acc));
  if (with_histogram) {
    EdgeHistogram h = std::move(*slots[0].hist);
    for (unsigned k = 1; k < config.replicas; ++k) h.merge(*slots[k].hist);
    out.edge_histogram = h.counts();
  }

  if (config.exact_psi) {
    double psi_tilt = 0.0;
    double psi_source = 0.0;
    if (out.params.beta == 0.0 && !out.constraint) {
      psi_tilt = psi_er_exact(n, logistic(out.params.h));
      psi_source = psi_er_exact(n, config.spec.p);
    } else if (n <= 7) {
      const auto joint = enumerate_joint(n);
      psi_tilt = exact_psi(joint, out.params, out.constraint);
      psi_source = exact_psi(joint, TiltParams::source(config.spec.p), out.constraint);
    } else {
      throw ConfigError("estimator: exact_psi needs beta = 0 or n <= 7");
    }
    out.report = merged.report_exact_psi(n, psi_tilt, psi_source);
  } else {
    out.report = merged.report(out.constraint ? EstimatorMode::conditioned
                                              : EstimatorMode::self_normalized,
                               n);
  }
  out.report.seed = config.seed;
  out.report.steps = out.budget.total() * config.replicas;
  return out;
}

nlohmann::json run_json(const ExperimentConfig& config, Vertex n,
                        const RunOutput& run) {
  nlohmann::json j = to_json(run.report);
  j["version"] = TRITILT_VERSION;
  j["n"] = n;
  j["p"] = config.spec.p;
  j["t"] = config.spec.t;
  j["threshold_mode"] = std::string(to_string(config.spec.mode));
  j["tilt"] = std::string(to_string(config.tilt));
  j["h"] = run.params.h;
  j["beta"] = run.params.beta;
  j["alpha"] = run.params.alpha;
  j["r"] = run.constraint && run.constraint->epsilon_cap
               ? nlohmann::json(*run.constraint->epsilon_cap)
               : nlohmann::json(nullptr);
  j["replicas"] = config.replicas;
  j["burnin_per_replica"] = run.budget.burnin;
  j["observed_per_replica"] = run.budget.observed;
  j["steps_coeff"] = config.steps_coeff;
  j["budget_frac"] = config.budget_frac;
  return j;
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return "nan";
  if (x != 0.0 && std::abs(x) < 1e-3) return fmt::format("{:.5e}", x);
  return fmt::format("{:.6g}", x);
}

std::string csv_header_comment(const ExperimentConfig& config) {
  return fmt::format(
      "# version={} seed={} p={} t={} threshold_mode={} steps_coeff={} "
      "burnin_coeff={} budget_frac={} replicas={}\n",
      TRITILT_VERSION, config.seed, config.spec.p, config.spec.t,
      to_string(config.spec.mode), config.steps_coeff, config.burnin_coeff,
      config.budget_frac, config.replicas);
}

std::vector<Vertex> table_sizes(std::string_view name, bool full) {
  if (name == "t1" || name == "t2") {
    return full ? std::vector<Vertex>{16, 32, 64, 96} : std::vector<Vertex>{16, 32};
  }
  if (name == "t3" || name == "t4") {
    return full ? std::vector<Vertex>{16, 32, 48, 64} : std::vector<Vertex>{16, 32};
  }
  throw ConfigError(fmt::format("table: unknown name '{}'", name));
}

std::vector<TableColumn> table_columns(std::string_view name,
                                       const ExperimentConfig& base) {
  std::vector<TableColumn> cols;
  if (name == "t1" || name == "t2") {
    ExperimentConfig c = base;
    c.spec.p = 0.35;
    c.spec.t = 0.4;
    c.tilt = TiltKind::hybrid;
    c.r.reset();
    c.r_auto = false;
    c.tau_interval.reset();
    for (double q : {0.35, 0.36, 0.37, 0.38, 0.39, 0.40}) {
      c.q = q;
      cols.push_back({fmt::format("q={:.2f}", q), c, 4096});
    }
    return cols;
  }
  if (name == "t3" || name == "t4") {
    ExperimentConfig c = base;
    c.spec.p = 0.2;
    c.spec.t = 0.3;
    c.r.reset();
    c.r_auto = false;
    c.tau_interval.reset();

    ExperimentConfig tri = c;
    tri.tilt = TiltKind::triangle;
    tri.alpha = 2.0 / 3.0;
    cols.push_back({"triangle_a2/3", tri, 4096});

    ExperimentConfig cond = c;
    cond.tilt = TiltKind::triangle;
    cond.alpha = 1.0;
    if (base.r) {
      cond.r = base.r;
    } else {
      cond.r_auto = true;
    }
    cols.push_back({"conditioned_triangle", cond, 4096});

    ExperimentConfig edge = c;
    edge.tilt = TiltKind::edge;
    cols.push_back({"edge", edge, 4096});

    ExperimentConfig mc = c;
    mc.tilt = TiltKind::mc;
    cols.push_back({"mc", mc, 32});
    return cols;
  }
  throw ConfigError(fmt::format("table: unknown name '{}'", name));
}

std::string run_table(std::string_view name, const ExperimentConfig& base,
                      std::ostream* progress) {
  const auto sizes = table_sizes(name, base.full);
  const auto cols = table_columns(name, base);
  const bool variance = name == "t2" || name == "t4";

  std::string out = csv_header_comment(cols.front().config);
  for (const auto& col : cols) {
    out += fmt::format("# column {}: tilt={} alpha={} q={} r={}\n", col.label,
                       to_string(col.config.tilt), col.config.alpha, col.config.q,
                       col.config.r_auto ? "auto"
                       : col.config.r    ? fmt::format("{}", *col.config.r)
                                         : "none");
  }
  out += "n";
  for (const auto& col : cols) out += fmt::format(",{0},{0}:log", col.label);
  out += "\n";

  for (Vertex n : sizes) {
    out += fmt::format("{}", n);
    for (const auto& col : cols) {
      if (n > col.max_n) {
        out += ",---,---";
        continue;
      }
      ExperimentConfig c = col.config;
      // 1e5 n^2 ln n at the largest size instead of 5e4.
      if (n >= 96) c.steps_coeff *= 2.0;
      const auto run = run_estimate(c, n);
      const double value = variance ? run.report.sample_variance : run.report.mu_hat;
      const double logv =
          variance ? run.report.log_second_moment : run.report.log_prob;
      out += fmt::format(",{},{}", format_number(value), format_number(logv));
      if (progress) {
        *progress << fmt::format("{} n={} {}: mu={} log={} hits={} ess={:.1f}\n",
                                 name, n, col.label, run.report.mu_hat,
                                 run.report.log_prob, run.report.hits,
                                 run.report.ess);
      }
    }
    out += "\n";
  }
  return out;
}

std::string curve_phase_csv(const ExperimentConfig& config, double beta_max,
                            int points) {
  if (points < 2 || !(beta_max > 0.0)) {
    throw ConfigError("curve: need beta-max > 0 and at least two points");
  }
  const double h = log_odds(config.spec.p);
  std::vector<double> betas;
  for (int k = 0; k < points; ++k) betas.push_back(beta_max * k / (points - 1));
  std::string out = fmt::format("# version={} p={} alpha={} h={}\n",
                                TRITILT_VERSION, config.spec.p, config.alpha, h);
  if (const auto tr = find_transition(h, config.alpha, 0.0, beta_max)) {
    out += fmt::format("# transition beta={} u_left={} u_right={}\n", tr->beta,
                       tr->u_left, tr->u_right);
  }
  out += "beta,u,kind,value\n";
  for (const auto& row : phase_curve(h, config.alpha, betas)) {
    for (const auto& s : row.points) {
      std::string kind(to_string(s.kind));
      if (s.kind == StationaryKind::maximum) {
        kind = std::abs(s.u - row.global_argmax) <= 1e-9 ? "global_max" : "local_max";
      } else if (s.kind == StationaryKind::minimum) {
        kind = "local_min";
      }
      out += fmt::format("{},{},{},{}\n", format_number(row.beta),
                         format_number(s.u), kind, format_number(s.value));
    }
  }
  return out;
}

std::string curve_second_moment_csv(const ExperimentConfig& config,
                                    double beta_max, int points) {
  if (points < 2 || !(beta_max > 0.0)) {
    throw ConfigError("curve: need beta-max > 0 and at least two points");
  }
  config.validate();
  const double h = log_odds(config.spec.p);
  std::optional<double> cap = config.r;
  if (!cap) {
    cap = separating_minimum(
        {h, beta_star_formula(config.spec.p, config.spec.t, config.alpha),
         config.alpha});
  }
  if (!cap) throw ConfigError("r: no cap given and V has a single well");
  std::string out = fmt::format(
      "# version={} p={} t={} alpha={} r={} beta_star={} minus_2I={}\n",
      TRITILT_VERSION, config.spec.p, config.spec.t, config.alpha, *cap,
      beta_star_formula(config.spec.p, config.spec.t, config.alpha),
      -2.0 * rate_function(config.spec.t, config.spec.p));
  out += "beta,conditioned,unconditioned\n";
  for (int k = 0; k < points; ++k) {
    const double beta = beta_max * k / (points - 1);
    const TiltParams params{h, beta, config.alpha};
    const double with = asymptotic_second_moment_unchecked(config.spec, params, cap);
    const double without =
        asymptotic_second_moment_unchecked(config.spec, params, std::nullopt);
    out += fmt::format("{},{},{}\n", format_number(beta), format_number(with),
                       format_number(without));
  }
  return out;
}

nlohmann::json phase_json(const ExperimentConfig& config,
                          const std::vector<double>& alphas) {
  try {
    config.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto rep = phase_report(config.spec, alphas);
  nlohmann::json j;
  j["version"] = TRITILT_VERSION;
  j["p"] = rep.p;
  j["t"] = rep.t;
  j["replica_symmetric"] = rep.replica_symmetric;
  for (const auto& [a, s] : rep.s_alpha) {
    const auto label = alpha_label(a);
    j["in_s_alpha_" + label] = s.member;
    j["beta_interval_" + label] = {s.beta_lo, s.beta_hi};
    j["beta_star_" + label] = rep.beta_star.at(a);
  }
  j["p_tilde"] = rep.p_tilde;
  j["t_tilde"] = nullable(rep.t_tilde);
  j["edge_tilt_non_optimal"] = rep.edge_tilt_non_optimal;
  j["edge_tilt_lower_bound"] = edge_tilt_second_moment_lower_bound(config.spec);
  j["minus_2I"] = -2.0 * rate_function(config.spec.t, config.spec.p);
  return j;
}

nlohmann::json oracle_json(const ExperimentConfig& config, Vertex n,
                           bool allow_eight) {
  config.validate();
  JointDistribution joint(2);
  try {
    joint = enumerate_joint(n, allow_eight);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto& spec = config.spec;
  nlohmann::json j;
  j["version"] = TRITILT_VERSION;
  j["n"] = n;
  j["p"] = spec.p;
  j["t"] = spec.t;
  j["threshold_mode"] = std::string(to_string(spec.mode));
  j["graphs"] = joint.total();
  j["mu"] = exact_mu(joint, spec.p, spec.t, spec.mode);
  if (n <= 5) j["mu_direct"] = exact_mu_direct(n, spec.p, spec.t, spec.mode);
  j["psi_source"] = exact_psi(joint, TiltParams::source(spec.p));
  j["psi_source_closed_form"] = psi_er_exact(n, spec.p);

  const auto params = resolve_tilt(config);
  const auto constraint = resolve_constraint(config);
  const auto m = exact_estimator_moments(joint, spec, params, constraint);
  j["tilt"] = std::string(to_string(config.tilt));
  j["h"] = params.h;
  j["beta"] = params.beta;
  j["alpha"] = params.alpha;
  j["psi_tilt"] = exact_psi(joint, params, constraint);
  j["qhat_mean"] = m.mean;
  j["qhat_second_moment"] = m.second;
  j["qhat_variance"] = m.variance;
  j["reference"] = m.reference;
  j["log_second_moment"] = finite_or_null(std::log(m.second) / (double(n) * n));

  const auto edge = exact_estimator_moments(joint, spec, TiltParams::edge(spec.t));
  j["edge_tilt_variance"] = edge.variance;
  for (double alpha : {2.0 / 3.0, 1.0}) {
    if (!in_s_alpha(spec, alpha).member) continue;
    const auto tri =
        exact_estimator_moments(joint, spec, TiltParams::triangle(spec, alpha));
    j["triangle_tilt_variance_a" + alpha_label(alpha)] = tri.variance;
  }
  return j;
}

}  // namespace tritilt
