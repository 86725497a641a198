#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "sclust/compare.hpp"
#include "sclust/csv.hpp"
#include "sclust/error.hpp"
#include "sclust/fa_baseline.hpp"
#include "sclust/kmeans.hpp"
#include "sclust/matrix_io.hpp"
#include "sclust/parallel.hpp"
#include "sclust/rng.hpp"
#include "sclust/spectral.hpp"
#include "sclust/stability.hpp"
#include "sclust/synth.hpp"
#include "sclust_cli/cli.hpp"

namespace sclust::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr std::uint64_t kMissingStream = 0x4d495353;  // "MISS"

std::string sigma_label(double sigma) { return csv::format_double(sigma); }

void add_variants(ordered_json& prov, const RunOptions& o) {
  prov["transform_tag"] = transform_tag(o);
  prov["variants"] = {{"distance", o.distance},
                      {"kernel", o.kernel},
                      {"diagonal", o.zero_diagonal ? "zero" : "self_loops"},
                      {"row_normalize", o.row_normalize},
                      {"kmeans_init", std::string(to_string(parse_kmeans_init(o.init)))}};
}

void write_spectrum_csv(const fs::path& path, const LaplacianSpectrum& s) {
  auto out = csv::open_output(path);
  out << "index,eigenvalue,is_zero\n";
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out << (i + 1) << ',' << csv::format_double(s.eigenvalues(i)) << ','
        << (i < s.zero_count ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::string> numbered(const char* prefix, int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

Partition with_ids(Partition p, const std::vector<std::string>& ids) {
  p.item_ids = ids;
  return p;
}

std::string sizes_text(const Partition& p) {
  std::string s;
  for (int size : p.cluster_sizes()) s += (s.empty() ? "" : " ") + std::to_string(size);
  return s;
}

struct FactorSolution {
  LoadingMatrix loadings;
  FactorAssignment assignment;
};

FactorSolution factor_solution(const RunOptions& o, const LoadedData& data) {
  if (o.fa_k < 1) throw ParameterError("--fa-k must be at least 1");
  const auto corr = correlations(data.responses);
  LoadingMatrix loadings = extract_factors(corr, o.fa_k);
  if (!o.no_rotation) loadings = varimax(loadings);
  LoadingRule rule = LoadingRule::magnitude;
  if (o.rule == "signed") {
    rule = LoadingRule::signed_value;
  } else if (o.rule != "magnitude") {
    throw ParameterError("--rule must be 'magnitude' or 'signed', got '" + o.rule + "'");
  }
  FactorAssignment assignment = assign_by_loading(loadings, rule);
  assignment.partition.item_ids = data.responses.item_ids;
  return {std::move(loadings), std::move(assignment)};
}

// Shared by compare and report: partition A from file, B from file or from
// the factor baseline.
struct ComparisonInputs {
  Partition a;
  Partition b;
  std::vector<std::string> b_labels;
  std::optional<LoadedData> data;
  std::optional<FactorSolution> factors;
};

ComparisonInputs comparison_inputs(const RunOptions& o) {
  if (o.partition_a.empty()) throw ParameterError("--partition-a is required");
  const bool use_fa = o.fa_k > 0;
  if (use_fa == !o.partition_b.empty()) {
    throw ParameterError("give exactly one of --partition-b or --fa-k");
  }
  ComparisonInputs in;
  in.a = read_partition_csv(o.partition_a);
  if (use_fa) {
    in.data = load_data(o);
    in.factors = factor_solution(o, *in.data);
    in.b = in.factors->assignment.partition;
    in.b_labels = numbered("F", in.b.k);
  } else {
    in.b = read_partition_csv(o.partition_b);
    in.b_labels = numbered("B", in.b.k);
  }
  return in;
}

std::string column_total_name(const ComparisonInputs& in) {
  return in.factors ? "Factor size" : "Column size";
}

void write_factor_outputs(const fs::path& dir, const ComparisonInputs& in) {
  if (!in.factors) return;
  write_loadings_csv(dir / "loadings.csv", in.factors->loadings, in.data->responses.item_ids);
  write_partition_csv(dir / "factor_partition.csv", in.factors->assignment.partition);
  auto out = csv::open_output(dir / "factor_ties.csv");
  out << "item_id\n";
  for (int i : in.factors->assignment.tied_items) {
    out << csv::escape(in.data->responses.item_ids[static_cast<std::size_t>(i)]) << '\n';
  }
}

void add_comparison_provenance(ordered_json& prov, const RunOptions& o,
                               const ComparisonInputs& in) {
  prov["partition_a"] = o.partition_a;
  prov["partition_a_fnv1a64"] = file_digest(o.partition_a);
  if (in.factors) {
    add_input(prov, o, *in.data);
    prov["factor_baseline"] = {{"k", o.fa_k},
                               {"extraction", in.factors->loadings.extraction_tag},
                               {"rotation", o.no_rotation ? "none" : "varimax"},
                               {"rule", o.rule},
                               {"tied_items", in.factors->assignment.tied_items.size()}};
  } else {
    prov["partition_b"] = o.partition_b;
    prov["partition_b_fnv1a64"] = file_digest(o.partition_b);
  }
}

}  // namespace

void cmd_cluster(const RunOptions& o, const std::string& config_text, std::ostream& out) {
  const auto dir = prepare_output_dir(o);
  const auto data = load_data(o);
  const auto corr = correlations(data.responses);
  const auto dist = distances(corr, distance_variant(o));
  const auto graph = gaussian_adjacency(dist, o.sigma, kernel_variant(o), diagonal_policy(o));
  const auto spectrum = eigendecompose(laplacian(graph));
  const auto embedding = embed(spectrum, o.l, o.row_normalize);
  if (o.n_runs < 1) throw ParameterError("--n-runs must be at least 1");
  KMeansOptions km;
  km.init = parse_kmeans_init(o.init);
  const Partition partition =
      with_ids(kmeans_best(embedding.coords, o.k, o.n_runs, o.seed, km, o.workers),
               data.responses.item_ids);

  write_text(dir / "config.toml", config_text);
  write_partition_csv(dir / "partition.csv", partition);
  {
    ordered_json sidecar;
    sidecar["k"] = partition.k;
    sidecar["inertia"] = partition.inertia;
    sidecar["seed"] = partition.seed;
    sidecar["transform_tag"] = graph.transform_tag;
    sidecar["sigma"] = o.sigma;
    sidecar["l"] = embedding.l;
    sidecar["row_normalized"] = embedding.row_normalized;
    write_text(dir / "partition.json", sidecar.dump(2) + "\n");
  }
  write_spectrum_csv(dir / "spectrum.csv", spectrum);
  write_matrix_csv(dir / "embedding.csv", embedding.coords, data.responses.item_ids,
                   numbered("e", embedding.l));
  if (o.save_matrices) {
    write_matrix_binary(dir / "correlations.bin", corr.values, {"pearson", 0.0});
    write_matrix_binary(dir / "adjacency.bin", graph.adjacency, {graph.transform_tag, o.sigma});
  }

  auto prov = base_provenance(o);
  add_input(prov, o, data);
  add_variants(prov, o);
  prov["seeds"] = {{"seed", o.seed},
                   {"scheme", "k-means run r (0-based) uses seed + r; lowest inertia kept, "
                              "ties to the lower seed"}};
  prov["result"] = {{"k", partition.k},
                    {"inertia", partition.inertia},
                    {"best_seed", partition.seed},
                    {"cluster_sizes", partition.cluster_sizes()},
                    {"zero_eigenvalues", spectrum.zero_count},
                    {"zero_rows", embedding.zero_rows.size()}};
  write_provenance(dir, std::move(prov));

  out << "clustered " << partition.size() << " items into " << partition.k
      << " clusters (sizes " << sizes_text(partition) << "), inertia "
      << csv::format_double(partition.inertia) << "\n";
}

void cmd_spectrum(const RunOptions& o, const std::string& config_text, std::ostream& out) {
  const auto grid = parse_sigma_grid(o.spectrum_sigma);
  const auto dir = prepare_output_dir(o);
  const auto data = load_data(o);
  const auto dist = distances(correlations(data.responses), distance_variant(o));
  const auto rows =
      eigengap_scan(dist, grid, o.l_probe, kernel_variant(o), diagonal_policy(o), o.workers);

  write_text(dir / "config.toml", config_text);
  {
    auto f = csv::open_output(dir / "eigenvalues.csv");
    f << "sigma,index,eigenvalue\n";
    for (const auto& row : rows) {
      const std::size_t shown =
          std::min<std::size_t>(row.nonzero_eigenvalues.size(), static_cast<std::size_t>(o.l_probe) + 1);
      for (std::size_t i = 0; i < shown; ++i) {
        f << sigma_label(row.sigma) << ',' << (i + 1) << ','
          << csv::format_double(row.nonzero_eigenvalues[i]) << '\n';
      }
    }
  }
  for (const auto& row : rows) {
    auto f = csv::open_output(dir / ("eigenvalues_sigma_" + sigma_label(row.sigma) + ".csv"));
    f << "index,eigenvalue\n";
    for (std::size_t i = 0; i < row.nonzero_eigenvalues.size(); ++i) {
      f << (i + 1) << ',' << csv::format_double(row.nonzero_eigenvalues[i]) << '\n';
    }
  }
  {
    auto f = csv::open_output(dir / "gaps.csv");
    f << "sigma,after,gap,relative_gap\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.gaps.size(); ++i) {
        f << sigma_label(row.sigma) << ',' << (i + 1) << ',' << csv::format_double(row.gaps[i])
          << ',' << csv::format_double(row.relative_gaps[i]) << '\n';
      }
    }
  }
  {
    auto f = csv::open_output(dir / "summary.csv");
    f << "sigma,zero_count,largest_gap_after\n";
    for (const auto& row : rows) {
      f << sigma_label(row.sigma) << ',' << row.zero_count << ',' << row.largest_gap_after << '\n';
    }
  }

  auto prov = base_provenance(o);
  add_input(prov, o, data);
  add_variants(prov, o);
  prov["sigma_grid"] = grid;
  write_provenance(dir, std::move(prov));

  for (const auto& row : rows) {
    out << "sigma " << sigma_label(row.sigma) << ": largest relative gap after eigenvalue "
        << row.largest_gap_after << "\n";
  }
}

void cmd_stability(const RunOptions& o, const std::string& config_text, std::ostream& out) {
  StabilityConfig config;
  config.pipeline = pipeline_settings(o);
  config.trial.subsample_size = o.subsample_size;
  config.trial.restarts = o.restarts;
  config.trial.max_attempts = o.max_attempts;
  config.n_trials = o.n_trials;
  config.reference_runs = o.reference_runs;
  config.seed_base = o.seed;
  config.alpha = o.alpha;
  config.workers = o.workers;
  const bool sweep_mode = !o.sweep_sigma.empty();
  if (sweep_mode) {
    config.sigma_grid = parse_sigma_grid(o.sweep_sigma);
  } else {
    config.sigma_grid = parse_sigma_grid(o.stability_sigma);
    if (o.k_min < 2 || o.k_max < o.k_min) {
      throw ParameterError("need 2 <= --k-min <= --k-max");
    }
    for (int k = o.k_min; k <= o.k_max; ++k) config.k_values.push_back(k);
  }

  const auto dir = prepare_output_dir(o);
  const auto data = load_data(o);
  const auto dist = distances(correlations(data.responses), distance_variant(o));
  write_text(dir / "config.toml", config_text);

  auto prov = base_provenance(o);
  add_input(prov, o, data);
  add_variants(prov, o);
  prov["seeds"] = {{"seed_base", o.seed},
                   {"scheme", "reference and trial streams are derived from the seed base, "
                              "sigma, k and trial index"}};

  if (sweep_mode) {
    std::ostringstream md;
    md << "| sigma | argmin k | mean at argmin |\n|---|---|---|\n";
    ordered_json summary = ordered_json::array();
    for (double sigma : config.sigma_grid) {
      const auto sweep = k_sweep(dist, sigma, o.k_max, config);
      const auto stem = "sweep_sigma_" + sigma_label(sigma);
      write_sweep_csv(dir / (stem + ".csv"), sweep);
      write_sweep_trials_csv(dir / (stem + "_trials.csv"), sweep);
      double best_mean = 0.0;
      for (const auto& p : sweep.points) {
        if (p.k == sweep.argmin_k) best_mean = p.mean;
      }
      md << "| " << sigma_label(sigma) << " | " << sweep.argmin_k << " | "
         << csv::format_double(best_mean) << " |\n";
      summary.push_back({{"sigma", sigma}, {"argmin_k", sweep.argmin_k}});
      out << "sigma " << sigma_label(sigma) << ": minimum mean misclassification at k="
          << sweep.argmin_k << "\n";
    }
    write_text(dir / "sweep.md", md.str());
    prov["sweeps"] = summary;
  } else {
    const auto grid = stability_grid(dist, config);
    write_grid_long_csv(dir / "grid_long.csv", grid);
    write_grid_summary_csv(dir / "grid_summary.csv", grid);
    write_row_minima_csv(dir / "row_minima.csv", grid);
    write_text(dir / "grid.md", render_grid_markdown(grid));
    prov["row_min_k"] = grid.row_min_k;
    for (std::size_t s = 0; s < grid.sigma_values.size(); ++s) {
      out << "sigma " << sigma_label(grid.sigma_values[s]) << ": row minimum at k="
          << grid.row_min_k[s] << "\n";
    }
  }
  write_provenance(dir, std::move(prov));
}

void cmd_compare(const RunOptions& o, const std::string& config_text, std::ostream& out) {
  const auto dir = prepare_output_dir(o);
  const auto in = comparison_inputs(o);
  const auto table = crosstab(in.a, in.b, numbered("C", in.a.k), in.b_labels);

  write_text(dir / "config.toml", config_text);
  write_factor_outputs(dir, in);
  write_table_csv(dir / "table.csv", table);
  write_text(dir / "table.md", render_table_markdown(table, "Cluster size", column_total_name(in)));
  if (!o.metadata.empty()) {
    const auto report = annotate_with_metadata(table, load_metadata(o.metadata));
    write_text(dir / "annotation.md", render_annotation_markdown(table, report));
    write_reassignments_csv(dir / "reassignments.csv", report);
  }

  auto prov = base_provenance(o);
  add_comparison_provenance(prov, o, in);
  prov["result"] = {{"diagonal_agreement", table.diagonal_agreement},
                    {"n_items", table.n_items()},
                    {"off_diagonal", table.n_items() - table.diagonal_agreement}};
  write_provenance(dir, std::move(prov));

  out << "diagonal agreement " << table.diagonal_agreement << "/" << table.n_items() << " ("
      << (table.n_items() - table.diagonal_agreement) << " off-diagonal)\n";
}

void cmd_report(const RunOptions& o, const std::string& config_text, std::ostream& out) {
  if (o.metadata.empty()) throw ParameterError("report needs --metadata");
  const auto dir = prepare_output_dir(o);
  const auto in = comparison_inputs(o);
  const auto table = crosstab(in.a, in.b, numbered("C", in.a.k), in.b_labels);
  const auto annotation = annotate_with_metadata(table, load_metadata(o.metadata));

  std::ostringstream md;
  md << "# Partition comparison\n\n"
     << "Rows: `" << o.partition_a << "` (" << in.a.k << " clusters). Columns: "
     << (in.factors ? "factor baseline, k=" + std::to_string(o.fa_k)
                    : "`" + o.partition_b + "`")
     << ".\n\n## Contingency table\n\n"
     << render_table_markdown(table, "Cluster size", column_total_name(in)) << '\n'
     << render_annotation_markdown(table, annotation);

  write_text(dir / "config.toml", config_text);
  write_factor_outputs(dir, in);
  write_table_csv(dir / "table.csv", table);
  write_reassignments_csv(dir / "reassignments.csv", annotation);
  write_text(dir / "report.md", md.str());

  auto prov = base_provenance(o);
  add_comparison_provenance(prov, o, in);
  prov["metadata"] = o.metadata;
  write_provenance(dir, std::move(prov));

  out << "report written with " << annotation.reassignments.size()
      << " off-diagonal facet groups\n";
}

void cmd_synth(const RunOptions& o, const std::string& config_text, std::ostream& out) {
  PlantedSpec spec;
  if (!o.spec.empty()) {
    spec = load_planted_spec(o.spec);
  } else {
    spec = preset(o.preset);
  }
  if (o.seed_given || o.spec.empty()) spec.seed = o.seed;
  validate(spec);
  const auto dir = prepare_output_dir(o);

  auto data = generate(spec);
  std::uint64_t missing_seed = derive_seed(spec.seed, {kMissingStream});
  if (o.missing_fraction > 0.0) {
    data.responses = inject_missing(data.responses, o.missing_fraction, missing_seed);
  } else if (o.missing_fraction < 0.0) {
    throw ParameterError("--missing-fraction must lie in [0, 1)");
  }

  write_text(dir / "config.toml", config_text);
  save_responses(dir / "responses.csv", data.responses);
  save_metadata(dir / "metadata.csv", data.metadata);
  write_partition_csv(dir / "truth.csv", data.truth);

  auto prov = base_provenance(o);
  prov["planted"] = {{"block_sizes", spec.block_sizes},
                     {"n_subjects", spec.n_subjects},
                     {"within_r", spec.within_r},
                     {"between_r", spec.between_r},
                     {"scale", {spec.schema.scale_min, spec.schema.scale_max}},
                     {"seed", spec.seed},
                     {"correlation_targets", "latent Gaussian, before discretization"}};
  prov["missing"] = {{"fraction", o.missing_fraction},
                     {"masked_cells", data.responses.missing_count()},
                     {"seed", missing_seed}};
  write_provenance(dir, std::move(prov));

  out << "generated " << data.responses.n_subjects() << " subjects x "
      << data.responses.n_items() << " items in " << spec.block_sizes.size() << " blocks\n";
}

}  // namespace sclust::cli
