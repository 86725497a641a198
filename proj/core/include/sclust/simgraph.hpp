#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sclust/ingest.hpp"

namespace sclust {

/// Items x items Pearson correlations with an exact unit diagonal.
struct CorrelationMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> item_ids;

  Eigen::Index size() const { return values.rows(); }
};

/// How a correlation c becomes a distance.
enum class DistanceVariant {
  paper_literal,  ///< ((1 - c) / 2)^2
  chord,          ///< ((1 - c) / 2)^(1/2)
};

/// How a distance d becomes an edge weight at scale sigma.
enum class KernelVariant {
  ratio_squared,  ///< exp(-(d / sigma)^2)
  plain_ratio,    ///< exp(-d / sigma)
};

/// Whether the adjacency keeps the unit self-loops the kernel produces.
enum class DiagonalPolicy {
  self_loops,
  zero,
};

std::string_view to_string(DistanceVariant v);
std::string_view to_string(KernelVariant v);
DistanceVariant parse_distance_variant(std::string_view s);
KernelVariant parse_kernel_variant(std::string_view s);

/// e.g. "paper_literal+ratio_squared" or "chord+plain_ratio+zero_diagonal".
std::string transform_tag(DistanceVariant distance, KernelVariant kernel,
                          DiagonalPolicy diagonal = DiagonalPolicy::self_loops);

struct DistanceMatrix {
  Eigen::MatrixXd values;
  DistanceVariant variant = DistanceVariant::paper_literal;
  std::vector<std::string> item_ids;

  Eigen::Index size() const { return values.rows(); }
};

/// Symmetric weighted adjacency with its degree vector.
struct SimilarityGraph {
  Eigen::MatrixXd adjacency;
  Eigen::VectorXd degrees;
  double sigma = 0.0;
  std::string transform_tag;

  Eigen::Index size() const { return adjacency.rows(); }
};

/// Adjacencies below this are stored as exactly zero.
inline constexpr double kAdjacencyUnderflow = 1e-300;

/// Pearson correlations between item columns. Requires a fully observed
/// matrix; a zero-variance item is a DataError naming it.
CorrelationMatrix correlations(const ResponseMatrix& r);

/// Same, for a subjects x items real-valued matrix.
CorrelationMatrix correlations(const Eigen::MatrixXd& data,
                               std::vector<std::string> item_ids = {});

double correlation_to_distance(double c, DistanceVariant variant);
double distance_to_weight(double d, double sigma, KernelVariant kernel);

DistanceMatrix distances(const CorrelationMatrix& c, DistanceVariant variant);

/// Principal submatrix on `items` (in the given order).
DistanceMatrix restrict(const DistanceMatrix& d, std::span<const int> items);

/// Gaussian adjacency a_ij = kernel(d_ij, sigma); diagonal exactly 1 (or 0
/// under DiagonalPolicy::zero); degrees are row sums.
SimilarityGraph gaussian_adjacency(const DistanceMatrix& d, double sigma,
                                   KernelVariant kernel = KernelVariant::ratio_squared,
                                   DiagonalPolicy diagonal = DiagonalPolicy::self_loops);

struct ComponentLabels {
  std::vector<int> labels;
  int count = 0;
};

/// Components of the graph whose edges are the pairs with a_ij > epsilon.
/// Component 0 contains node 0, component 1 the smallest node not in 0, etc.
ComponentLabels connected_components(const SimilarityGraph& g,
                                     double edge_epsilon = 1e-12);

}  // namespace sclust
