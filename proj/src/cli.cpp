#include "fdrcurve/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdrcurve/distributions.hpp"
#include "fdrcurve/errors.hpp"
#include "fdrcurve/fdr_curve.hpp"
#include "fdrcurve/ingest.hpp"
#include "fdrcurve/io.hpp"
#include "fdrcurve/simulation.hpp"
#include "fdrcurve/testing.hpp"

#ifndef FDRCURVE_VERSION
#define FDRCURVE_VERSION "0.0.0"
#endif

namespace fdrcurve::cli {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, delim)) out.push_back(item);
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw std::domain_error("cannot parse number `" + text + "` in " + what);
  return value;
}

long parse_count(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const long value = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || value < 1)
    throw std::domain_error("cannot parse count `" + text + "` in " + what);
  return value;
}

std::vector<Constraint> parse_constraints(const std::string& spec) {
  if (spec.empty())
    throw std::domain_error("missing --constraints (grammar: theta:q[,theta:q...])");
  std::vector<Constraint> constraints;
  for (const auto& token : split(spec, ',')) {
    const auto parts = split(token, ':');
    if (parts.size() != 2)
      throw std::domain_error("constraint `" + token +
                              "` does not match theta:q");
    constraints.push_back({parse_number(parts[0], "--constraints"),
                           parse_number(parts[1], "--constraints")});
  }
  return constraints;
}

std::vector<double> parse_grid_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3)
    throw std::domain_error("grid `" + spec +
                            "` does not match start:stop:count");
  const double start = parse_number(parts[0], "--grid");
  const double stop = parse_number(parts[1], "--grid");
  const long count = parse_count(parts[2], "--grid");
  if (stop < start)
    throw std::domain_error("grid stop must be >= start");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    grid.push_back(start);
    return grid;
  }
  for (long i = 0; i < count; ++i)
    grid.push_back(start + (stop - start) *
                               (static_cast<double>(i) /
                                static_cast<double>(count - 1)));
  return grid;
}

// "VALUE[xCOUNT],..." e.g. "0x25,-3x25" -> 25 zeros then 25 at -3.
std::vector<double> parse_value_list(const std::string& spec,
                                     const std::string& what) {
  if (spec.empty()) throw std::domain_error("missing " + what);
  std::vector<double> values;
  for (const auto& token : split(spec, ',')) {
    const auto parts = split(token, 'x');
    if (parts.size() == 1) {
      values.push_back(parse_number(parts[0], what));
    } else if (parts.size() == 2) {
      const double value = parse_number(parts[0], what);
      const long count = parse_count(parts[1], what);
      values.insert(values.end(), static_cast<std::size_t>(count), value);
    } else {
      throw std::domain_error("token `" + token + "` in " + what +
                              " does not match VALUE[xCOUNT]");
    }
  }
  return values;
}

LocationFamily parse_family(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw std::domain_error("empty --family");
  if (parts[0] == "gaussian" && parts.size() == 1)
    return LocationFamily::standard_gaussian();
  if (parts[0] == "scaled" && parts.size() == 2)
    return LocationFamily::scaled_gaussian(parse_number(parts[1], "--family"));
  if (parts[0] == "logistic" && parts.size() == 1)
    return LocationFamily::logistic();
  if (parts[0] == "tabulated" && (parts.size() == 2 || parts.size() == 3)) {
    const bool monotone = parts.size() == 3 && parts[2] == "monotone";
    if (parts.size() == 3 && !monotone)
      throw std::domain_error("unknown tabulated family option `" + parts[2] +
                              "`");
    return LocationFamily::tabulated_from_csv(parts[1], monotone);
  }
  throw std::domain_error(
      "family `" + spec +
      "` does not match gaussian | scaled:S | logistic | tabulated:PATH[:monotone]");
}

GeneSummary read_gene_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stats file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  GeneSummary summary;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3)
      throw DataError(path + ": line " + std::to_string(lineno) +
                      ": expected gene_id,x,sigma_hat");
    summary.gene_ids.push_back(fields[0]);
    summary.x.push_back(parse_number(fields[1], path));
    summary.sigma_hat.push_back(parse_number(fields[2], path));
    if (!(summary.sigma_hat.back() > 0.0))
      throw DataError(path + ": line " + std::to_string(lineno) +
                      ": sigma_hat must be positive");
  }
  if (summary.gene_ids.empty()) throw DataError(path + ": no genes");
  return summary;
}

GroupSpec group_spec_from(const RunConfig& config) {
  if (!config.groups.empty() && !config.groups_file.empty())
    throw std::domain_error("give either --groups or --groups-file, not both");
  if (!config.groups_file.empty())
    return GroupSpec::from_file(config.groups_file);
  if (!config.groups.empty())
    return GroupSpec::inline_list(parse_group_list(config.groups));
  throw std::domain_error("matrix input needs --groups or --groups-file");
}

TestMode parse_mode(const std::string& mode) {
  if (mode == "effect-size") return TestMode::EffectSize;
  if (mode == "snr") return TestMode::Snr;
  throw std::domain_error("mode `" + mode +
                          "` does not match effect-size | snr");
}

std::uint64_t resolve_seed(const RunConfig& config) {
  if (config.seed) return *config.seed;
  if (const char* env = std::getenv("FDRCURVE_SEED")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return value;
    throw std::domain_error("FDRCURVE_SEED is not an unsigned integer");
  }
  return 0;
}

// Gene summary for commands that consume a dataset, from either input kind.
GeneSummary summary_from_source(const RunConfig& config) {
  const bool has_input = !config.input.empty();
  const bool has_stats = !config.stats.empty();
  if (has_input == has_stats)
    throw std::domain_error(
        "need exactly one input source: --input MATRIX or --stats CSV");
  if (has_stats) return read_gene_summary_csv(config.stats);
  return group_summary(load_matrix(config.input, group_spec_from(config)));
}

// Analytical configuration only: the output prefix does not change what is
// computed, so it stays out of the hash.
json effective_config(const RunConfig& config, std::uint64_t seed) {
  return json{{"command", config.command},
              {"constraints", config.constraints},
              {"family", config.family},
              {"m", config.m},
              {"grid", config.grid},
              {"seed", seed},
              {"mode", config.mode},
              {"input", config.input},
              {"stats", config.stats},
              {"groups", config.groups},
              {"groups_file", config.groups_file},
              {"thetas", config.thetas},
              {"sigmas", config.sigmas},
              {"replications", config.replications},
              {"flip_sign", config.flip_sign},
              {"method", config.method},
              {"expected_rejections", config.expected_rejections}};
}

void write_manifest(const RunConfig& config, std::uint64_t seed,
                    std::vector<std::string> outputs, json extras) {
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(effective_config(config, seed).dump())));
  json manifest{{"command", config.command},
                {"version", FDRCURVE_VERSION},
                {"seed", seed},
                {"config_hash", hash_hex},
                {"outputs", outputs}};
  manifest.update(extras);
  write_text_file(config.out + ".manifest.json", manifest.dump(2) + "\n");
}

// Orientation: discoveries sit at small statistics, so by default the B-A
// effect is negated; --flip-sign keeps the raw sign.
std::vector<double> oriented_effects(const GeneSummary& summary,
                                     bool flip_sign) {
  std::vector<double> x = summary.x;
  if (!flip_sign)
    for (double& v : x) v = -v;
  return x;
}

HypothesisSet hypotheses_from(const GeneSummary& summary, TestMode mode,
                              bool flip_sign) {
  GeneSummary oriented = summary;
  oriented.x = oriented_effects(summary, flip_sign);
  return build_hypotheses(oriented, mode);
}

// Families for the data-free commands (qstar, select-constraints): only the
// sigma_hat column is consulted, never the statistics.
std::pair<FamilySet, long> families_for_selection(const RunConfig& config) {
  const bool has_data = !config.input.empty() || !config.stats.empty();
  if (has_data && parse_mode(config.mode.empty() ? "snr" : config.mode) ==
                      TestMode::EffectSize) {
    const GeneSummary summary = summary_from_source(config);
    std::vector<LocationFamily> families;
    families.reserve(summary.sigma_hat.size());
    for (double sigma : summary.sigma_hat)
      families.push_back(LocationFamily::scaled_gaussian(sigma));
    return {FamilySet::per_hypothesis(std::move(families)),
            static_cast<long>(summary.sigma_hat.size())};
  }
  long m = config.m;
  if (has_data) {
    const GeneSummary summary = summary_from_source(config);
    m = static_cast<long>(summary.sigma_hat.size());
  }
  if (m < 1)
    throw std::domain_error("need --m >= 1 (or a data source that sets it)");
  return {FamilySet::shared(parse_family(config.family)), m};
}

int run_qstar(const RunConfig& config, std::uint64_t seed) {
  const TargetCurve curve =
      TargetCurve::from_constraints(parse_constraints(config.constraints));
  auto [families, m] = families_for_selection(config);
  const QStarCurve star(curve, families, m);
  const std::vector<double> grid =
      config.grid.empty() ? default_grid(curve) : parse_grid_spec(config.grid);
  const CurveSamples samples = sample_curves(curve, star, grid);
  const std::string curve_path = config.out + ".curve.csv";
  write_curve_samples_csv(curve_path, samples);
  write_manifest(config, seed, {curve_path}, {{"m", m}});
  return 0;
}

int run_select(const RunConfig& config, std::uint64_t seed) {
  const TargetCurve curve =
      TargetCurve::from_constraints(parse_constraints(config.constraints));
  auto [families, m] = families_for_selection(config);
  std::vector<std::size_t> subset;
  if (config.method == "minimal") {
    subset = select_constraints_minimal(curve, families, m);
  } else if (config.method == "greedy") {
    subset = select_constraints_greedy(curve, families, m);
  } else {
    throw std::domain_error("method `" + config.method +
                            "` does not match minimal | greedy");
  }
  const QStarCurve star(curve, families, m, subset);
  json selected = json::array();
  for (std::size_t j : subset) {
    const auto& jump = curve.jumps()[j];
    selected.push_back({{"theta", jump.theta}, {"q", jump.level}});
  }
  json checks = json::array();
  for (const auto& jump : curve.jumps()) {
    checks.push_back({{"theta", jump.theta},
                      {"q", jump.level},
                      {"q_star", star.evaluate(jump.theta)}});
  }
  const json report{{"method", config.method},
                    {"selected", selected},
                    {"selected_indices", subset},
                    {"checks", checks}};
  const std::string subset_path = config.out + ".subset.json";
  write_text_file(subset_path, report.dump(2) + "\n");
  write_manifest(config, seed, {subset_path},
                 {{"m", m},
                  {"method", config.method},
                  {"selected_count", subset.size()}});
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_test(const RunConfig& config, std::uint64_t seed) {
  const TargetCurve curve =
      TargetCurve::from_constraints(parse_constraints(config.constraints));
  if (config.mode.empty())
    throw std::domain_error("test needs --mode effect-size|snr");
  const TestMode mode = parse_mode(config.mode);
  const GeneSummary summary = summary_from_source(config);
  const HypothesisSet data = hypotheses_from(summary, mode, config.flip_sign);
  const RejectionResult result = bh_generalized(data, curve);

  const QStarCurve star(curve, data.families,
                        static_cast<long>(data.size()));
  const std::vector<double> grid =
      config.grid.empty() ? default_grid(curve) : parse_grid_spec(config.grid);
  const CurveSamples samples = sample_curves(curve, star, grid);

  const std::string report_path = config.out + ".rejections.csv";
  const std::string summary_path = config.out + ".summary.json";
  const std::string curve_path = config.out + ".curve.csv";
  write_rejection_report_csv(report_path, data.statistics, result);
  write_text_file(summary_path,
                  rejection_summary_json(data.size(), result).dump(2) + "\n");
  write_curve_samples_csv(curve_path, samples);

  json extras{{"m", data.size()},
              {"rejections", result.selected.size()},
              {"cutoff_rank", result.cutoff_rank}};
  if (!config.expected_rejections.empty()) {
    const auto parts = split(config.expected_rejections, '-');
    const long lo = parse_count(parts[0], "--expected-rejections");
    const long hi = parts.size() > 1
                        ? parse_count(parts[1], "--expected-rejections")
                        : lo;
    const long got = static_cast<long>(result.selected.size());
    extras["expected_rejections"] = config.expected_rejections;
    extras["expected_match"] = got >= lo && got <= hi;
    if (got < lo || got > hi)
      extras["note"] = "rejection count " + std::to_string(got) +
                       " outside expected range; estimator or sign "
                       "conventions may differ";
  }
  write_manifest(config, seed, {report_path, summary_path, curve_path},
                 extras);
  std::cout << "rejections: " << result.selected.size() << " of "
            << data.size() << "\n";
  return 0;
}

int run_simulate(const RunConfig& config, std::uint64_t seed) {
  SimulationConfig sim;
  sim.curve =
      TargetCurve::from_constraints(parse_constraints(config.constraints));
  sim.true_thetas = parse_value_list(config.thetas, "--thetas");
  if (!config.sigmas.empty()) {
    const std::vector<double> scales =
        parse_value_list(config.sigmas, "--sigmas");
    if (scales.size() != sim.true_thetas.size())
      throw std::domain_error("--sigmas length must match --thetas length");
    std::vector<LocationFamily> families;
    families.reserve(scales.size());
    for (double s : scales)
      families.push_back(LocationFamily::scaled_gaussian(s));
    sim.families = FamilySet::per_hypothesis(std::move(families));
  } else {
    sim.families = FamilySet::shared(parse_family(config.family));
  }
  sim.replications = config.replications;
  sim.grid = config.grid.empty() ? default_grid(sim.curve)
                                 : parse_grid_spec(config.grid);
  sim.seed = seed;
  sim.threads = config.threads;

  const CurveEstimate estimate = simulate_fdr_curve(sim);
  const long m = static_cast<long>(sim.true_thetas.size());
  const QStarCurve star(sim.curve, sim.families, m);
  const CurveSamples samples = sample_curves(sim.curve, star, sim.grid);

  // Closed-form floor columns, meaningful below the first jump.
  std::vector<double> lower_exact, lower_exp;
  const double m_real = static_cast<double>(m);
  for (double qs : samples.q_star) {
    lower_exact.push_back(-std::expm1(m_real * std::log1p(-qs / m_real)));
    lower_exp.push_back(-std::expm1(-qs));
  }

  const std::string estimate_path = config.out + ".estimate.csv";
  write_estimate_csv(estimate_path, samples, estimate, lower_exact,
                     lower_exp);
  write_manifest(config, seed, {estimate_path},
                 {{"m", m},
                  {"replications", config.replications},
                  {"sup_ratio_mean", estimate.sup_ratio_mean},
                  {"sup_ratio_std_err", estimate.sup_ratio_std_err}});
  return 0;
}

int run_summarize(const RunConfig& config, std::uint64_t seed) {
  if (config.input.empty())
    throw std::domain_error("summarize needs --input MATRIX");
  const ExpressionMatrix matrix =
      load_matrix(config.input, group_spec_from(config));
  const GeneSummary summary = group_summary(matrix);
  const std::string summary_path = config.out + ".summary.csv";
  write_gene_summary_csv(summary_path, summary);
  write_manifest(config, seed, {summary_path},
                 {{"genes", summary.gene_ids.size()},
                  {"dropped_non_numeric", matrix.dropped_non_numeric},
                  {"dropped_zero_variance", summary.dropped_zero_variance}});
  if (matrix.dropped_non_numeric > 0)
    std::cerr << "warning: dropped " << matrix.dropped_non_numeric
              << " rows with non-numeric entries\n";
  if (summary.dropped_zero_variance > 0)
    std::cerr << "warning: dropped " << summary.dropped_zero_variance
              << " genes with zero variance in both groups\n";
  return 0;
}

const char* kUsage =
    "usage: fdrcurve COMMAND [flags]\n"
    "commands: test | qstar | simulate | select-constraints | summarize\n"
    "run `fdrcurve --help` for the flag reference\n";

}  // namespace

int run(const RunConfig& config) {
  try {
    const std::uint64_t seed = resolve_seed(config);
    if (config.command == "qstar") return run_qstar(config, seed);
    if (config.command == "select-constraints")
      return run_select(config, seed);
    if (config.command == "test") return run_test(config, seed);
    if (config.command == "simulate") return run_simulate(config, seed);
    if (config.command == "summarize") return run_summarize(config, seed);
    std::cerr << "unknown command `" << config.command << "`\n" << kUsage;
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_main(int argc, const char* const* argv) {
  RunConfig config;
  std::string config_path;
  std::uint64_t seed_value = 0;

  CLI::App app{
      "FDR curve control: generalized Benjamini-Hochberg testing, curve "
      "transforms, constraint selection, and Monte Carlo verification"};
  app.add_option("command", config.command,
                 "test | qstar | simulate | select-constraints | summarize");
  auto* opt_constraints = app.add_option(
      "--constraints", config.constraints, "theta:q[,theta:q...]");
  auto* opt_family = app.add_option(
      "--family", config.family,
      "gaussian | scaled:S | logistic | tabulated:PATH[:monotone]");
  auto* opt_m = app.add_option("--m", config.m, "hypothesis count");
  auto* opt_grid =
      app.add_option("--grid", config.grid, "start:stop:count");
  auto* opt_seed = app.add_option(
      "--seed", seed_value, "RNG seed (default: FDRCURVE_SEED env or 0)");
  auto* opt_mode =
      app.add_option("--mode", config.mode, "effect-size | snr");
  auto* opt_input =
      app.add_option("--input", config.input, "expression matrix file");
  auto* opt_stats = app.add_option(
      "--stats", config.stats, "gene summary CSV (gene_id,x,sigma_hat)");
  auto* opt_groups = app.add_option("--groups", config.groups,
                                    "inline sample labels, e.g. A,A,B,B");
  auto* opt_groups_file = app.add_option(
      "--groups-file", config.groups_file, "two-column sample,label file");
  auto* opt_thetas = app.add_option(
      "--thetas", config.thetas, "true locations VALUE[xCOUNT],...");
  auto* opt_sigmas = app.add_option(
      "--sigmas", config.sigmas, "per-hypothesis scales VALUE[xCOUNT],...");
  auto* opt_reps = app.add_option("--replications", config.replications,
                                  "Monte Carlo replications");
  auto* opt_out =
      app.add_option("--out", config.out, "output path prefix");
  auto* opt_threads =
      app.add_option("--threads", config.threads, "worker threads (0 = auto)");
  auto* opt_flip = app.add_flag(
      "--flip-sign", config.flip_sign,
      "keep the raw B-A effect sign (default negates it so larger B maps to "
      "the rejection side)");
  auto* opt_method = app.add_option("--method", config.method,
                                    "select-constraints: minimal | greedy");
  auto* opt_expected =
      app.add_option("--expected-rejections", config.expected_rejections,
                     "N or LO-HI; records a match check in the manifest");
  app.add_option("--config", config_path,
                 "JSON config file; explicit flags override its values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << kUsage;
    return 2;
  }

  if (opt_seed->count() > 0) config.seed = seed_value;

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "data error: cannot open config file: " << config_path
                << "\n";
      return 3;
    }
    json file;
    try {
      in >> file;
    } catch (const json::exception& e) {
      std::cerr << "data error: bad config JSON: " << e.what() << "\n";
      return 3;
    }
    try {
      const auto pull_string = [&](const CLI::Option* opt, const char* key,
                                   std::string& field) {
        if (opt->count() == 0 && file.contains(key))
          field = file.at(key).get<std::string>();
      };
      if (config.command.empty() && file.contains("command"))
        config.command = file.at("command").get<std::string>();
      if (opt_constraints->count() == 0 && file.contains("constraints")) {
        const auto& node = file.at("constraints");
        if (node.is_string()) {
          config.constraints = node.get<std::string>();
        } else {
          std::string spec;
          for (const auto& entry : node) {
            if (!spec.empty()) spec += ',';
            spec += format_number(entry.at("theta").get<double>()) + ":" +
                    format_number(entry.at("q").get<double>());
          }
          config.constraints = spec;
        }
      }
      pull_string(opt_family, "family", config.family);
      if (opt_m->count() == 0 && file.contains("m"))
        config.m = file.at("m").get<long>();
      pull_string(opt_grid, "grid", config.grid);
      if (opt_seed->count() == 0 && file.contains("seed"))
        config.seed = file.at("seed").get<std::uint64_t>();
      pull_string(opt_mode, "mode", config.mode);
      pull_string(opt_input, "input", config.input);
      pull_string(opt_stats, "stats", config.stats);
      pull_string(opt_groups, "groups", config.groups);
      pull_string(opt_groups_file, "groups_file", config.groups_file);
      pull_string(opt_thetas, "thetas", config.thetas);
      pull_string(opt_sigmas, "sigmas", config.sigmas);
      if (opt_reps->count() == 0 && file.contains("replications"))
        config.replications = file.at("replications").get<long>();
      pull_string(opt_out, "out", config.out);
      if (opt_threads->count() == 0 && file.contains("threads"))
        config.threads = file.at("threads").get<unsigned>();
      if (opt_flip->count() == 0 && file.contains("flip_sign"))
        config.flip_sign = file.at("flip_sign").get<bool>();
      pull_string(opt_method, "method", config.method);
      pull_string(opt_expected, "expected_rejections",
                  config.expected_rejections);
    } catch (const json::exception& e) {
      std::cerr << "data error: bad config value: " << e.what() << "\n";
      return 3;
    }
  }

  if (config.command.empty()) {
    std::cerr << kUsage;
    return 2;
  }
  return run(config);
}

}  // namespace fdrcurve::cli
