#include "sclust_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

#include "commands.hpp"
#include "sclust/csv.hpp"

namespace sclust::cli {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return kExitConfig;
    case ErrorKind::io:
      return kExitIo;
    case ErrorKind::data:
      return kExitData;
    case ErrorKind::computation:
      return kExitComputation;
  }
  return kExitInternal;
}

std::string_view version() { return SCLUST_VERSION; }

std::vector<double> parse_sigma_grid(std::string_view spec) {
  auto number = [&](std::string_view text) {
    double v = 0.0;
    if (!csv::parse_double(csv::trim(text), v) || !std::isfinite(v)) {
      throw ParameterError("bad sigma value '" + std::string(text) + "' in '" +
                           std::string(spec) + "'");
    }
    return v;
  };
  std::vector<double> grid;
  if (spec.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    for (;;) {
      const auto colon = spec.find(':', start);
      parts.push_back(number(spec.substr(start, colon - start)));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3) {
      throw ParameterError("sigma range must be 'start:stop:step', got '" + std::string(spec) + "'");
    }
    const double first = parts[0];
    const double last = parts[1];
    const double step = parts[2];
    if (!(step > 0.0) || last < first) {
      throw ParameterError("sigma range needs step > 0 and stop >= start");
    }
    const auto count = static_cast<long>(std::floor((last - first) / step + 1e-9)) + 1;
    if (count > 100000) throw ParameterError("sigma range has too many points");
    for (long i = 0; i < count; ++i) {
      grid.push_back(std::round((first + static_cast<double>(i) * step) * 1e10) / 1e10);
    }
  } else {
    for (const auto& field : csv::split_line(spec)) grid.push_back(number(field));
  }
  if (grid.empty()) throw ParameterError("empty sigma grid");
  for (double s : grid) {
    if (!(s > 0.0)) throw ParameterError("sigma values must be positive");
  }
  return grid;
}

std::vector<int> parse_int_list(std::string_view spec) {
  auto number = [&](std::string_view text) {
    int v = 0;
    if (!csv::parse_int(csv::trim(text), v)) {
      throw ParameterError("bad integer '" + std::string(text) + "'");
    }
    return v;
  };
  std::vector<int> values;
  if (const auto colon = spec.find(':'); colon != std::string_view::npos) {
    const int a = number(spec.substr(0, colon));
    const int b = number(spec.substr(colon + 1));
    if (b < a) throw ParameterError("integer range stop is below start");
    for (int v = a; v <= b; ++v) values.push_back(v);
  } else {
    for (const auto& field : csv::split_line(spec)) values.push_back(number(field));
  }
  return values;
}

namespace {

using Handler = void (*)(const RunOptions&, const std::string&, std::ostream&);

// Option names that never go into config.toml.
bool excluded_from_config(const std::string& name) {
  return name == "help" || name == "out" || name == "workers" || name == "config";
}

std::string quote(const std::string& value) {
  if (value.find('\'') == std::string::npos) return "'" + value + "'";
  std::string out = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// One `key = value` line for every option of the subcommand, using the
// effective value (given on the command line, from a config file, or the
// default).
std::string render_config(const CLI::App& sub) {
  std::ostringstream text;
  text << "# sclust " << version() << " run configuration\n[" << sub.get_name() << "]\n";
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || excluded_from_config(name)) continue;
    if (opt->get_expected_min() == 0) {
      const bool on = opt->count() > 0 && opt->as<bool>();
      text << name << " = " << (on ? "true" : "false") << '\n';
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      value = opt->as<std::string>();
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) continue;
    text << name << " = " << quote(value) << '\n';
  }
  return text.str();
}

struct Subcommand {
  CLI::App* app;
  Handler handler;
};

void add_input_options(CLI::App* sub, RunOptions& o, bool required) {
  auto* r = sub->add_option("--responses", o.responses, "Response CSV (header of item ids)");
  if (required) r->required();
  sub->add_option("--metadata", o.metadata,
                  "Item metadata CSV (item_id,domain_label,facet_label,keyed_direction)");
  sub->add_option("--scale-min", o.scale_min, "Lowest Likert level");
  sub->add_option("--scale-max", o.scale_max, "Highest Likert level");
  sub->add_option("--neutral", o.neutral, "Value imputed for missing cells (default: midpoint)");
  sub->add_option("--reverse-domains", o.reverse_domains,
                  "Comma list of domains whose items are reverse coded");
  sub->add_flag("--reverse-keyed", o.reverse_keyed,
                "Reverse code items with keyed_direction -1");
}

void add_graph_options(CLI::App* sub, RunOptions& o) {
  sub->add_option("--distance", o.distance, "paper_literal | chord");
  sub->add_option("--kernel", o.kernel, "ratio_squared | plain_ratio");
  sub->add_flag("--zero-diagonal", o.zero_diagonal, "Drop self-loops from the adjacency");
}

void add_embedding_options(CLI::App* sub, RunOptions& o) {
  sub->add_option("--l", o.l, "Embedding dimension")->check(CLI::PositiveNumber);
  sub->add_flag("--row-normalize", o.row_normalize, "Scale embedding rows to unit length");
  sub->add_option("--init", o.init, "k-means initialization: uniform | plus_plus");
}

void add_common_options(CLI::App* sub, RunOptions& o) {
  sub->add_option("--seed", o.seed, "Base random seed");
  sub->add_option("--out", o.out, "Output directory")->required();
  sub->add_option("--workers", o.workers, "Worker threads (0 = one per logical core)");
}

std::vector<Subcommand> build(CLI::App& app, RunOptions& o) {
  std::vector<Subcommand> subs;

  auto* cluster = app.add_subcommand("cluster", "Spectral clustering at one sigma and k");
  add_input_options(cluster, o, true);
  add_graph_options(cluster, o);
  add_embedding_options(cluster, o);
  cluster->add_option("--sigma", o.sigma, "Kernel scale")->check(CLI::PositiveNumber);
  cluster->add_option("--k", o.k, "Number of clusters")->check(CLI::PositiveNumber);
  cluster->add_option("--n-runs", o.n_runs, "k-means restarts")->check(CLI::PositiveNumber);
  cluster->add_flag("--save-matrices", o.save_matrices,
                    "Also write correlations.bin and adjacency.bin");
  add_common_options(cluster, o);
  subs.push_back({cluster, cmd_cluster});

  auto* spectrum = app.add_subcommand("spectrum", "Laplacian eigenvalues over a sigma grid");
  add_input_options(spectrum, o, true);
  add_graph_options(spectrum, o);
  spectrum->add_option("--sigma", o.spectrum_sigma, "Sigma grid: start:stop:step or a,b,c");
  spectrum->add_option("--l-probe", o.l_probe, "Gaps examined per sigma")
      ->check(CLI::PositiveNumber);
  add_common_options(spectrum, o);
  subs.push_back({spectrum, cmd_spectrum});

  auto* stability = app.add_subcommand("stability", "Subsample cluster-consistency analysis");
  add_input_options(stability, o, true);
  add_graph_options(stability, o);
  add_embedding_options(stability, o);
  stability->add_option("--sigma", o.stability_sigma, "Sigma grid: start:stop:step or a,b,c");
  stability->add_option("--k-min", o.k_min, "Smallest k of the grid");
  stability->add_option("--k-max", o.k_max, "Largest k of the grid or sweep");
  stability->add_option("--sweep-sigma", o.sweep_sigma,
                        "Run k = 2..k-max sweeps at these sigmas instead of the grid");
  stability->add_option("--n-trials", o.n_trials, "Trials per cell")->check(CLI::PositiveNumber);
  stability->add_option("--subsample-size", o.subsample_size, "Items per trial")
      ->check(CLI::PositiveNumber);
  stability->add_option("--restarts", o.restarts, "k-means restarts per trial")
      ->check(CLI::PositiveNumber);
  stability->add_option("--reference-runs", o.reference_runs,
                        "k-means restarts for each full-data reference")
      ->check(CLI::PositiveNumber);
  stability->add_option("--max-attempts", o.max_attempts, "Draws per trial before giving up")
      ->check(CLI::PositiveNumber);
  stability->add_option("--alpha", o.alpha, "Welch test level for row-minimum ties")
      ->check(CLI::Range(0.0, 1.0));
  add_common_options(stability, o);
  subs.push_back({stability, cmd_stability});

  auto add_comparison = [&](CLI::App* sub) {
    sub->add_option("--partition-a", o.partition_a, "Row partition CSV (item_id,label)")
        ->required();
    sub->add_option("--partition-b", o.partition_b, "Column partition CSV");
    sub->add_option("--fa-k", o.fa_k, "Factor baseline with this many factors as columns");
    sub->add_option("--rule", o.rule, "Factor assignment: magnitude | signed");
    sub->add_flag("--no-rotation", o.no_rotation, "Skip the varimax rotation");
  };

  auto* compare = app.add_subcommand("compare", "Contingency table of two partitions");
  add_comparison(compare);
  add_input_options(compare, o, false);
  add_common_options(compare, o);
  subs.push_back({compare, cmd_compare});

  auto* report = app.add_subcommand("report", "Comparison annotated with item metadata");
  add_comparison(report);
  add_input_options(report, o, false);
  add_common_options(report, o);
  subs.push_back({report, cmd_report});

  auto* synth = app.add_subcommand("synth", "Generate planted-structure Likert data");
  synth->add_option("--spec", o.spec, "Planted spec file (key = value)");
  synth->add_option("--preset", o.preset, "paper-shape | tiny (used without --spec)");
  synth->add_option("--missing-fraction", o.missing_fraction, "Fraction of cells to mask");
  add_common_options(synth, o);
  subs.push_back({synth, cmd_synth});

  for (auto& s : subs) s.app->configurable();
  return subs;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunOptions o;
  CLI::App app{"Spectral clustering of questionnaire items", "sclust"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(version()));
  app.set_config("--config", "", "Read options from a key = value file");
  app.require_subcommand(1);
  const auto subs = build(app, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (const auto& s : subs) {
      if (!s.app->parsed()) continue;
      o.command = s.app->get_name();
      if (const auto* seed = s.app->get_option_no_throw("--seed")) o.seed_given = seed->count() > 0;
      s.handler(o, render_config(*s.app), out);
      return kExitOk;
    }
    err << "error: no subcommand given\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error (" << o.command << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error (" << o.command << "): " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error (" << o.command << "): " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace sclust::cli
