#include "sclust/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "sclust/error.hpp"
#include "sclust/parallel.hpp"
#include "sclust/rng.hpp"

namespace sclust {
namespace {

Eigen::MatrixXd init_uniform(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Eigen::MatrixXd centroids(k, points.cols());
  for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
    const std::size_t pick = c + rng.uniform_index(n - c);
    std::swap(idx[c], idx[pick]);
    centroids.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(idx[c]));
  }
  return centroids;
}

Eigen::MatrixXd init_plus_plus(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(n))));
  Eigen::VectorXd nearest = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double running = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        running += nearest(i);
        if (running > target && nearest(i) > 0.0) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(c) = points.row(pick);
    nearest = nearest.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace

std::string_view to_string(KMeansInit init) {
  return init == KMeansInit::uniform ? "uniform" : "plus_plus";
}

KMeansInit parse_kmeans_init(std::string_view s) {
  if (s == "uniform") return KMeansInit::uniform;
  if (s == "plus_plus" || s == "kmeans++") return KMeansInit::plus_plus;
  throw ParameterError("unknown k-means initialization '" + std::string(s) +
                       "' (expected uniform or plus_plus)");
}

int count_distinct_rows(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  if (n == 0) return 0;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (points(a, j) < points(b, j)) return true;
      if (points(b, j) < points(a, j)) return false;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  int distinct = 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (row_less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

double partition_inertia(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                         int k) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    sums.row(c) += points.row(i);
    ++counts[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) sums.row(c) /= counts[static_cast<std::size_t>(c)];
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - sums.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return total;
}

KMeansRun kmeans_run(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                     const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw ParameterError("k must be at least 1 (got " + std::to_string(k) + ")");
  if (k > n) {
    throw ParameterError("k=" + std::to_string(k) + " exceeds the number of points (" +
                         std::to_string(n) + ")");
  }
  if (options.max_iter < 1) throw ParameterError("max_iter must be at least 1");
  if (!(options.tol >= 0.0)) throw ParameterError("tol must be nonnegative");
  const int distinct = count_distinct_rows(points);
  if (k > distinct) {
    throw DegenerateInputError("k=" + std::to_string(k) + " exceeds the " +
                               std::to_string(distinct) + " distinct points");
  }

  Rng rng(seed);
  Eigen::MatrixXd centroids = options.init == KMeansInit::uniform
                                  ? init_uniform(points, k, rng)
                                  : init_plus_plus(points, k, rng);

  KMeansRun run;
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  Eigen::MatrixXd next(k, points.cols());

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[static_cast<std::size_t>(i)] = best;
      dist[static_cast<std::size_t>(i)] = best_d;
      ++counts[static_cast<std::size_t>(best)];
    }

    // Empty-cluster repair: hand the worst-fit point to each empty cluster.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& owner = counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        if (owner > 1 && dist[static_cast<std::size_t>(i)] > far_d) {
          far_d = dist[static_cast<std::size_t>(i)];
          far = i;
        }
      }
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      dist[static_cast<std::size_t>(far)] = 0.0;
      counts[static_cast<std::size_t>(c)] = 1;
    }

    next.setZero();
    for (Eigen::Index i = 0; i < n; ++i) next.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) next.row(c) /= counts[static_cast<std::size_t>(c)];

    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      inertia += (points.row(i) - next.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    run.inertia_history.push_back(inertia);

    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = next;
    run.iterations = iter;
    if (shift <= options.tol) {
      run.converged = true;
      break;
    }
  }

  run.partition.labels = std::move(labels);
  run.partition.k = k;
  run.partition.inertia = run.inertia_history.back();
  run.partition.seed = seed;
  run.partition = canonicalize(std::move(run.partition));
  return run;
}

Partition kmeans_once(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                      const KMeansOptions& options) {
  return kmeans_run(points, k, seed, options).partition;
}

Partition kmeans_best(const Eigen::MatrixXd& points, int k, int n_runs,
                      std::uint64_t seed_base, const KMeansOptions& options,
                      unsigned workers) {
  if (n_runs < 1) throw ParameterError("n_runs must be at least 1");
  std::vector<Partition> runs(static_cast<std::size_t>(n_runs));
  parallel_for(runs.size(), workers, [&](std::size_t r) {
    runs[r] = kmeans_once(points, k, seed_base + r, options);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  return std::move(runs[best]);
}

}  // namespace sclust
