#include "sclust/stability.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "sclust/assignment.hpp"
#include "sclust/csv.hpp"
#include "sclust/error.hpp"
#include "sclust/parallel.hpp"
#include "sclust/rng.hpp"

namespace sclust {
namespace {

constexpr std::uint64_t kReferenceStream = 0x5245465f;  // "REF_"
constexpr std::uint64_t kTrialStream = 0x54524c5f;      // "TRL_"

std::uint64_t sigma_key(double sigma) { return std::bit_cast<std::uint64_t>(sigma); }

std::vector<int> draw_subsample(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void summarize(CellStats& cell) {
  const auto n = static_cast<double>(cell.fractions.size());
  cell.n_trials = static_cast<int>(cell.fractions.size());
  if (cell.fractions.empty()) return;
  double sum = 0.0;
  for (double f : cell.fractions) sum += f;
  cell.mean = sum / n;
  double ss = 0.0;
  for (double f : cell.fractions) ss += (f - cell.mean) * (f - cell.mean);
  cell.sd = cell.fractions.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  cell.se = cell.sd / std::sqrt(n);
}

void validate_config(const DistanceMatrix& d, const StabilityConfig& config) {
  if (config.sigma_grid.empty()) throw ParameterError("stability: sigma grid is empty");
  if (config.k_values.empty()) throw ParameterError("stability: k range is empty");
  for (double s : config.sigma_grid) {
    if (!(s > 0.0)) throw ParameterError("stability: sigma values must be positive");
  }
  for (int k : config.k_values) {
    if (k < 1) throw ParameterError("stability: k values must be at least 1");
    if (k > config.trial.subsample_size) {
      throw ParameterError("stability: k=" + std::to_string(k) + " exceeds the subsample size");
    }
  }
  if (config.n_trials < 2) throw ParameterError("stability: n_trials must be at least 2");
  if (config.reference_runs < 1) throw ParameterError("stability: reference_runs must be >= 1");
  if (config.trial.restarts < 1) throw ParameterError("stability: trial restarts must be >= 1");
  if (config.trial.max_attempts < 1) throw ParameterError("stability: max_attempts must be >= 1");
  if (config.trial.subsample_size < 2 || config.trial.subsample_size > d.size()) {
    throw ParameterError("stability: subsample size " +
                         std::to_string(config.trial.subsample_size) + " must lie in 2.." +
                         std::to_string(d.size()));
  }
  if (config.pipeline.l < 1) throw ParameterError("stability: l must be at least 1");
}

}  // namespace

SpectralEmbedding spectral_embedding(const DistanceMatrix& d, double sigma,
                                     const PipelineSettings& settings) {
  const auto spectrum = graph_spectrum(d, sigma, settings.kernel, settings.diagonal,
                                       settings.zero_tolerance);
  return embed(spectrum, settings.l, settings.row_normalize);
}

double misclassified_fraction(std::span<const int> reference, std::span<const int> trial,
                              int k) {
  if (reference.size() != trial.size()) {
    throw ParameterError("misclassified_fraction: label vectors differ in length");
  }
  if (reference.empty()) return 0.0;
  Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(k, k);
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const int a = reference[i];
    const int b = trial[i];
    if (a < 0 || a >= k || b < 0 || b >= k) {
      throw ParameterError("misclassified_fraction: label outside [0, k)");
    }
    ++confusion(a, b);
  }
  const auto n = static_cast<double>(reference.size());
  return (n - static_cast<double>(max_agreement(confusion))) / n;
}

std::optional<ConsistencyTrial> try_consistency_trial(const DistanceMatrix& d, double sigma,
                                                      const PipelineSettings& pipeline, int k,
                                                      const Partition& reference,
                                                      const TrialSettings& trial,
                                                      std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(d.size());
  const auto m = static_cast<std::size_t>(trial.subsample_size);
  if (m < 2 || m > n) throw ParameterError("consistency trial: subsample size out of range");
  if (reference.size() != n) {
    throw ParameterError("consistency trial: reference partition does not cover all items");
  }
  if (k < 1 || static_cast<std::size_t>(k) > m) {
    throw ParameterError("consistency trial: k out of range for the subsample");
  }

  Rng rng(seed);
  ConsistencyTrial result;
  result.seed = seed;
  result.subsample = draw_subsample(n, m, rng);

  const DistanceMatrix sub = restrict(d, result.subsample);
  const SimilarityGraph g = gaussian_adjacency(sub, sigma, pipeline.kernel, pipeline.diagonal);
  if ((g.degrees.array() <= 0.0).any()) return std::nullopt;
  const LaplacianSpectrum spectrum = eigendecompose(laplacian(g), pipeline.zero_tolerance);
  if (pipeline.l > static_cast<int>(spectrum.size()) - spectrum.zero_count) return std::nullopt;
  const SpectralEmbedding e = embed(spectrum, pipeline.l, pipeline.row_normalize);

  try {
    result.trial_partition = kmeans_best(e.coords, k, trial.restarts, seed, pipeline.kmeans);
  } catch (const DegenerateInputError&) {
    return std::nullopt;
  }

  std::vector<int> ref(m);
  for (std::size_t i = 0; i < m; ++i) {
    ref[i] = reference.labels[static_cast<std::size_t>(result.subsample[i])];
  }
  result.misclassified_fraction =
      misclassified_fraction(ref, result.trial_partition.labels, std::max(k, reference.k));
  return result;
}

ConsistencyTrial consistency_trial(const DistanceMatrix& d, double sigma,
                                   const PipelineSettings& pipeline, int k,
                                   const Partition& reference, const TrialSettings& trial,
                                   std::uint64_t seed) {
  for (int attempt = 0; attempt < trial.max_attempts; ++attempt) {
    const std::uint64_t s =
        attempt == 0 ? seed : derive_seed(seed, {static_cast<std::uint64_t>(attempt)});
    if (auto t = try_consistency_trial(d, sigma, pipeline, k, reference, trial, s)) {
      t->resamples = attempt;
      return std::move(*t);
    }
  }
  throw ComputationError("consistency trial: " + std::to_string(trial.max_attempts) +
                         " subsamples in a row were unusable (sigma=" +
                         csv::format_double(sigma) + ", k=" + std::to_string(k) + ")");
}

WelchResult welch_test(std::span<const double> a, std::span<const double> b) {
  auto moments = [](std::span<const double> x, double& mean, double& var) {
    const auto n = static_cast<double>(x.size());
    mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    var = x.size() > 1 ? ss / (n - 1.0) : 0.0;
  };
  WelchResult r;
  if (a.size() < 2 || b.size() < 2) return r;
  double ma = 0.0;
  double va = 0.0;
  double mb = 0.0;
  double vb = 0.0;
  moments(a, ma, va);
  moments(b, mb, vb);
  const double qa = va / static_cast<double>(a.size());
  const double qb = vb / static_cast<double>(b.size());
  const double se2 = qa + qb;
  if (!(se2 > 0.0)) {
    r.p_value = ma == mb ? 1.0 : 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 /
         (qa * qa / static_cast<double>(a.size() - 1) + qb * qb / static_cast<double>(b.size() - 1));
  const boost::math::students_t dist(r.df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  return r;
}

void mark_row_minima(StabilityGrid& grid, double alpha) {
  grid.alpha = alpha;
  grid.row_min_k.assign(grid.sigma_values.size(), 0);
  for (std::size_t s = 0; s < grid.sigma_values.size(); ++s) {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < grid.k_values.size(); ++j) {
      auto& cell = grid.at(s, j);
      cell.is_row_min = false;
      cell.tied_with_min = false;
      if (!cell.usable || cell.fractions.empty()) continue;
      if (!best || cell.mean < grid.at(s, *best).mean) best = j;
    }
    if (!best) continue;
    auto& min_cell = grid.at(s, *best);
    min_cell.is_row_min = true;
    min_cell.tied_with_min = true;
    grid.row_min_k[s] = min_cell.k;
    for (std::size_t j = 0; j < grid.k_values.size(); ++j) {
      auto& cell = grid.at(s, j);
      if (j == *best || !cell.usable || cell.fractions.empty()) continue;
      cell.tied_with_min = welch_test(cell.fractions, min_cell.fractions).p_value >= alpha;
    }
  }
}

StabilityGrid stability_grid(const DistanceMatrix& d, const StabilityConfig& config) {
  validate_config(d, config);
  const std::size_t n_sigma = config.sigma_grid.size();
  const std::size_t n_k = config.k_values.size();
  const auto n_trials = static_cast<std::size_t>(config.n_trials);

  std::vector<SpectralEmbedding> embeddings(n_sigma);
  parallel_for(n_sigma, config.workers, [&](std::size_t s) {
    embeddings[s] = spectral_embedding(d, config.sigma_grid[s], config.pipeline);
  });

  StabilityGrid grid;
  grid.sigma_values = config.sigma_grid;
  grid.k_values = config.k_values;
  grid.cells.resize(n_sigma * n_k);

  std::vector<std::optional<Partition>> references(n_sigma * n_k);
  parallel_for(n_sigma * n_k, config.workers, [&](std::size_t cell) {
    const std::size_t s = cell / n_k;
    const int k = config.k_values[cell % n_k];
    const std::uint64_t seed =
        derive_seed(config.seed_base, {kReferenceStream, sigma_key(config.sigma_grid[s]),
                                       static_cast<std::uint64_t>(k)});
    try {
      references[cell] = kmeans_best(embeddings[s].coords, k, config.reference_runs, seed,
                                     config.pipeline.kmeans);
    } catch (const DegenerateInputError&) {
      references[cell].reset();
    }
  });

  struct TrialOutcome {
    double fraction = 0.0;
    int resamples = 0;
    bool ok = false;
  };
  std::vector<TrialOutcome> outcomes(n_sigma * n_k * n_trials);
  parallel_for(outcomes.size(), config.workers, [&](std::size_t job) {
    const std::size_t cell = job / n_trials;
    const std::size_t t = job % n_trials;
    if (!references[cell]) return;
    const double sigma = config.sigma_grid[cell / n_k];
    const int k = config.k_values[cell % n_k];
    const std::uint64_t seed =
        derive_seed(config.seed_base,
                    {kTrialStream, sigma_key(sigma), static_cast<std::uint64_t>(k), t});
    try {
      const auto trial =
          consistency_trial(d, sigma, config.pipeline, k, *references[cell], config.trial, seed);
      outcomes[job] = {trial.misclassified_fraction, trial.resamples, true};
    } catch (const ComputationError&) {
      outcomes[job] = {0.0, config.trial.max_attempts, false};
    }
  });

  for (std::size_t cell = 0; cell < grid.cells.size(); ++cell) {
    CellStats& stats = grid.cells[cell];
    stats.sigma = config.sigma_grid[cell / n_k];
    stats.k = config.k_values[cell % n_k];
    stats.usable = references[cell].has_value();
    for (std::size_t t = 0; t < n_trials && stats.usable; ++t) {
      const auto& o = outcomes[cell * n_trials + t];
      stats.resamples += o.resamples;
      if (o.ok) {
        stats.fractions.push_back(o.fraction);
      } else {
        stats.usable = false;
      }
    }
    summarize(stats);
  }
  mark_row_minima(grid, config.alpha);
  return grid;
}

KSweep k_sweep(const DistanceMatrix& d, double sigma, int k_max,
               const StabilityConfig& config) {
  if (k_max < 2) throw ParameterError("k_sweep: k_max must be at least 2");
  StabilityConfig sweep_config = config;
  sweep_config.sigma_grid = {sigma};
  sweep_config.k_values.clear();
  for (int k = 2; k <= k_max; ++k) sweep_config.k_values.push_back(k);
  StabilityGrid grid = stability_grid(d, sweep_config);

  KSweep sweep;
  sweep.sigma = sigma;
  sweep.points = std::move(grid.cells);
  sweep.argmin_k = grid.row_min_k.front();
  return sweep;
}

void write_grid_long_csv(const std::filesystem::path& path, const StabilityGrid& grid) {
  auto out = csv::open_output(path);
  out << "sigma,k,trial,fraction\n";
  for (const auto& cell : grid.cells) {
    for (std::size_t t = 0; t < cell.fractions.size(); ++t) {
      out << csv::format_double(cell.sigma) << ',' << cell.k << ',' << t << ','
          << csv::format_double(cell.fractions[t]) << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_grid_summary_csv(const std::filesystem::path& path, const StabilityGrid& grid) {
  auto out = csv::open_output(path);
  out << "sigma,k,mean,sd,se,n,is_row_min,tied_with_min\n";
  for (const auto& cell : grid.cells) {
    out << csv::format_double(cell.sigma) << ',' << cell.k << ',';
    if (cell.usable) {
      out << csv::format_double(cell.mean) << ',' << csv::format_double(cell.sd) << ','
          << csv::format_double(cell.se);
    } else {
      out << ",,";
    }
    out << ',' << cell.n_trials << ',' << (cell.is_row_min ? 1 : 0) << ','
        << (cell.tied_with_min ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_row_minima_csv(const std::filesystem::path& path, const StabilityGrid& grid) {
  auto out = csv::open_output(path);
  out << "sigma,k,mean,sd,se\n";
  for (std::size_t s = 0; s < grid.sigma_values.size(); ++s) {
    for (std::size_t j = 0; j < grid.k_values.size(); ++j) {
      const auto& cell = grid.at(s, j);
      if (!cell.is_row_min) continue;
      out << csv::format_double(cell.sigma) << ',' << cell.k << ','
          << csv::format_double(cell.mean) << ',' << csv::format_double(cell.sd) << ','
          << csv::format_double(cell.se) << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string render_grid_markdown(const StabilityGrid& grid) {
  std::ostringstream md;
  md << "| sigma |";
  for (int k : grid.k_values) md << " k=" << k << " |";
  md << "\n|---|";
  for (std::size_t j = 0; j < grid.k_values.size(); ++j) md << "---|";
  md << '\n';
  char buf[32];
  for (std::size_t s = 0; s < grid.sigma_values.size(); ++s) {
    md << "| " << csv::format_double(grid.sigma_values[s]) << " |";
    for (std::size_t j = 0; j < grid.k_values.size(); ++j) {
      const auto& cell = grid.at(s, j);
      if (!cell.usable) {
        md << " n/a |";
        continue;
      }
      std::snprintf(buf, sizeof buf, "%.3f", cell.mean);
      md << ' ' << buf << (cell.tied_with_min ? "*" : "") << " |";
    }
    md << '\n';
  }
  md << "\nCells marked * are the row minimum or not significantly above it "
        "(Welch two-sample t-test, alpha = "
     << csv::format_double(grid.alpha) << ").\n";
  return md.str();
}

void write_sweep_csv(const std::filesystem::path& path, const KSweep& sweep) {
  auto out = csv::open_output(path);
  out << "k,mean,sd,se,n,mean_minus_sd,mean_plus_sd\n";
  for (const auto& p : sweep.points) {
    out << p.k << ',' << csv::format_double(p.mean) << ',' << csv::format_double(p.sd) << ','
        << csv::format_double(p.se) << ',' << p.n_trials << ','
        << csv::format_double(p.mean - p.sd) << ',' << csv::format_double(p.mean + p.sd) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_sweep_trials_csv(const std::filesystem::path& path, const KSweep& sweep) {
  auto out = csv::open_output(path);
  out << "k,trial,fraction\n";
  for (const auto& p : sweep.points) {
    for (std::size_t t = 0; t < p.fractions.size(); ++t) {
      out << p.k << ',' << t << ',' << csv::format_double(p.fractions[t]) << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace sclust
