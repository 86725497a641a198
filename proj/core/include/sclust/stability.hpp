#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sclust/kmeans.hpp"
#include "sclust/simgraph.hpp"
#include "sclust/spectral.hpp"

namespace sclust {

/// Everything between a distance matrix and a clustering, except sigma and k.
struct PipelineSettings {
  int l = 4;
  KernelVariant kernel = KernelVariant::ratio_squared;
  DiagonalPolicy diagonal = DiagonalPolicy::self_loops;
  bool row_normalize = false;
  double zero_tolerance = 1e-8;
  KMeansOptions kmeans;
};

/// distance matrix -> adjacency(sigma) -> Laplacian -> l-dimensional embedding.
SpectralEmbedding spectral_embedding(const DistanceMatrix& d, double sigma,
                                     const PipelineSettings& settings);

struct TrialSettings {
  int subsample_size = 150;
  int restarts = 10;      ///< k-means runs per trial (best inertia kept)
  int max_attempts = 10;  ///< draws per trial before the cell is declared unusable
};

/// One cluster-consistency trial: re-cluster a random item subsample and
/// score it against the reference partition.
struct ConsistencyTrial {
  std::vector<int> subsample;  ///< ascending item indices
  Partition trial_partition;   ///< over the subsample, in subsample order
  double misclassified_fraction = 0.0;
  std::uint64_t seed = 0;      ///< seed of the accepted draw
  int resamples = 0;           ///< rejected draws before this one
};

/// Fraction of items whose trial label differs from the reference label
/// under the label matching that minimizes disagreement.
double misclassified_fraction(std::span<const int> reference, std::span<const int> trial,
                              int k);

/// A single draw. Returns nullopt when the subsample graph leaves fewer than
/// l usable eigenvectors or k-means cannot fill k clusters.
std::optional<ConsistencyTrial> try_consistency_trial(const DistanceMatrix& d, double sigma,
                                                      const PipelineSettings& pipeline, int k,
                                                      const Partition& reference,
                                                      const TrialSettings& trial,
                                                      std::uint64_t seed);

/// Draws until a valid trial is obtained (attempt 0 uses `seed` itself).
/// Throws ComputationError after trial.max_attempts invalid draws.
ConsistencyTrial consistency_trial(const DistanceMatrix& d, double sigma,
                                   const PipelineSettings& pipeline, int k,
                                   const Partition& reference, const TrialSettings& trial,
                                   std::uint64_t seed);

struct StabilityConfig {
  std::vector<double> sigma_grid;
  std::vector<int> k_values;
  PipelineSettings pipeline;
  TrialSettings trial;
  int n_trials = 100;
  int reference_runs = 100;  ///< kmeans_best restarts for each reference
  std::uint64_t seed_base = 0;
  double alpha = 0.05;       ///< Welch test level for row-minimum ties
  unsigned workers = 1;
};

struct CellStats {
  double sigma = 0.0;
  int k = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  int n_trials = 0;
  std::vector<double> fractions;
  int resamples = 0;
  bool usable = true;
  bool is_row_min = false;
  bool tied_with_min = false;  ///< not significantly above the row minimum
};

struct StabilityGrid {
  std::vector<double> sigma_values;
  std::vector<int> k_values;
  std::vector<CellStats> cells;  ///< sigma-major
  std::vector<int> row_min_k;    ///< per sigma; 0 when no usable cell
  double alpha = 0.05;

  const CellStats& at(std::size_t sigma_index, std::size_t k_index) const {
    return cells[sigma_index * k_values.size() + k_index];
  }
  CellStats& at(std::size_t sigma_index, std::size_t k_index) {
    return cells[sigma_index * k_values.size() + k_index];
  }
};

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

/// Two-sided Welch two-sample t-test.
WelchResult welch_test(std::span<const double> a, std::span<const double> b);

/// Fills is_row_min / tied_with_min / row_min_k from the cell statistics.
void mark_row_minima(StabilityGrid& grid, double alpha);

StabilityGrid stability_grid(const DistanceMatrix& d, const StabilityConfig& config);

/// k = 2..k_max consistency distributions at one sigma.
struct KSweep {
  double sigma = 0.0;
  std::vector<CellStats> points;
  int argmin_k = 0;
};

KSweep k_sweep(const DistanceMatrix& d, double sigma, int k_max,
               const StabilityConfig& config);

/// sigma,k,trial,fraction
void write_grid_long_csv(const std::filesystem::path& path, const StabilityGrid& grid);
/// sigma,k,mean,sd,se,n,is_row_min,tied_with_min
void write_grid_summary_csv(const std::filesystem::path& path, const StabilityGrid& grid);
/// sigma,k,mean,sd,se: the row-minimum series.
void write_row_minima_csv(const std::filesystem::path& path, const StabilityGrid& grid);
/// Mean misclassification table, sigma rows x k columns, '*' on cells tied
/// with the row minimum.
std::string render_grid_markdown(const StabilityGrid& grid);

/// k,mean,sd,se,n,mean_minus_sd,mean_plus_sd
void write_sweep_csv(const std::filesystem::path& path, const KSweep& sweep);
/// k,trial,fraction
void write_sweep_trials_csv(const std::filesystem::path& path, const KSweep& sweep);

}  // namespace sclust
