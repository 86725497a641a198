#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

#include "sclust/partition.hpp"

namespace sclust {

enum class KMeansInit {
  uniform,    ///< k distinct rows chosen uniformly at random
  plus_plus,  ///< k-means++ D^2 seeding
};

std::string_view to_string(KMeansInit init);
KMeansInit parse_kmeans_init(std::string_view s);

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-9;  ///< stop when no centroid moves farther than this
  KMeansInit init = KMeansInit::uniform;
};

/// One Lloyd run with its per-iteration objective trace.
struct KMeansRun {
  Partition partition;
  std::vector<double> inertia_history;
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm on the rows of `points`. An emptied cluster receives
/// the point farthest from its current centroid. The result is canonical.
/// Throws DegenerateInputError when k exceeds the number of distinct rows.
KMeansRun kmeans_run(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                     const KMeansOptions& options = {});

Partition kmeans_once(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                      const KMeansOptions& options = {});

/// Runs seeds seed_base .. seed_base + n_runs - 1 and keeps the lowest
/// inertia (ties: lowest seed). Independent of `workers`.
Partition kmeans_best(const Eigen::MatrixXd& points, int k, int n_runs,
                      std::uint64_t seed_base, const KMeansOptions& options = {},
                      unsigned workers = 1);

/// Sum of squared distances from each row to the mean of its cluster.
double partition_inertia(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                         int k);

/// Number of distinct rows (exact comparison).
int count_distinct_rows(const Eigen::MatrixXd& points);

}  // namespace sclust
