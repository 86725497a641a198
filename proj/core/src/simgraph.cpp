#include "sclust/simgraph.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sclust/error.hpp"

namespace sclust {

std::string_view to_string(DistanceVariant v) {
  return v == DistanceVariant::paper_literal ? "paper_literal" : "chord";
}

std::string_view to_string(KernelVariant v) {
  return v == KernelVariant::ratio_squared ? "ratio_squared" : "plain_ratio";
}

DistanceVariant parse_distance_variant(std::string_view s) {
  if (s == "paper_literal") return DistanceVariant::paper_literal;
  if (s == "chord") return DistanceVariant::chord;
  throw ParameterError("unknown distance variant '" + std::string(s) +
                       "' (expected paper_literal or chord)");
}

KernelVariant parse_kernel_variant(std::string_view s) {
  if (s == "ratio_squared") return KernelVariant::ratio_squared;
  if (s == "plain_ratio") return KernelVariant::plain_ratio;
  throw ParameterError("unknown kernel variant '" + std::string(s) +
                       "' (expected ratio_squared or plain_ratio)");
}

std::string transform_tag(DistanceVariant distance, KernelVariant kernel,
                          DiagonalPolicy diagonal) {
  std::string tag = std::string(to_string(distance)) + "+" + std::string(to_string(kernel));
  if (diagonal == DiagonalPolicy::zero) tag += "+zero_diagonal";
  return tag;
}

CorrelationMatrix correlations(const Eigen::MatrixXd& data,
                               std::vector<std::string> item_ids) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (item_ids.empty()) {
    for (Eigen::Index j = 0; j < p; ++j) item_ids.push_back(std::to_string(j));
  }
  if (n < 2) throw DataError("correlations need at least 2 subjects");

  Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  Eigen::VectorXd norms = centered.colwise().norm();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(norms(j) > 0.0)) {
      throw DataError("item '" + item_ids[static_cast<std::size_t>(j)] +
                      "' has zero variance; its correlations are undefined");
    }
    centered.col(j) /= norms(j);
  }

  CorrelationMatrix c;
  c.item_ids = std::move(item_ids);
  c.values.resize(p, p);
  c.values.triangularView<Eigen::Lower>() = centered.transpose() * centered;
  for (Eigen::Index j = 0; j < p; ++j) {
    c.values(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < p; ++i) {
      const double v = std::clamp(c.values(i, j), -1.0, 1.0);
      c.values(i, j) = v;
      c.values(j, i) = v;
    }
  }
  return c;
}

CorrelationMatrix correlations(const ResponseMatrix& r) {
  if (r.missing_count() > 0) {
    throw DataError("correlations require a fully observed matrix (" +
                    std::to_string(r.missing_count()) +
                    " missing cells remain; impute first)");
  }
  return correlations(Eigen::MatrixXd(r.values.cast<double>()), r.item_ids);
}

double correlation_to_distance(double c, DistanceVariant variant) {
  const double half = std::max(0.0, (1.0 - c) / 2.0);
  return variant == DistanceVariant::paper_literal ? half * half : std::sqrt(half);
}

double distance_to_weight(double d, double sigma, KernelVariant kernel) {
  const double ratio = d / sigma;
  const double a = kernel == KernelVariant::ratio_squared ? std::exp(-ratio * ratio)
                                                          : std::exp(-ratio);
  return a < kAdjacencyUnderflow ? 0.0 : a;
}

DistanceMatrix distances(const CorrelationMatrix& c, DistanceVariant variant) {
  const Eigen::Index p = c.size();
  DistanceMatrix d;
  d.variant = variant;
  d.item_ids = c.item_ids;
  d.values.resize(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    d.values(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < p; ++i) {
      const double v = correlation_to_distance(c.values(i, j), variant);
      d.values(i, j) = v;
      d.values(j, i) = v;
    }
  }
  return d;
}

DistanceMatrix restrict(const DistanceMatrix& d, std::span<const int> items) {
  const auto m = static_cast<Eigen::Index>(items.size());
  DistanceMatrix out;
  out.variant = d.variant;
  out.values.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const int i = items[static_cast<std::size_t>(a)];
    if (i < 0 || i >= d.size()) {
      throw ParameterError("restrict: item index " + std::to_string(i) + " out of range");
    }
    if (!d.item_ids.empty()) out.item_ids.push_back(d.item_ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index b = 0; b < m; ++b) {
      out.values(a, b) = d.values(i, items[static_cast<std::size_t>(b)]);
    }
  }
  return out;
}

SimilarityGraph gaussian_adjacency(const DistanceMatrix& d, double sigma,
                                   KernelVariant kernel, DiagonalPolicy diagonal) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("sigma must be a positive finite number (got " +
                         std::to_string(sigma) + ")");
  }
  const Eigen::Index p = d.size();
  SimilarityGraph g;
  g.sigma = sigma;
  g.transform_tag = transform_tag(d.variant, kernel, diagonal);
  g.adjacency.resize(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    g.adjacency(j, j) = diagonal == DiagonalPolicy::self_loops ? 1.0 : 0.0;
    for (Eigen::Index i = j + 1; i < p; ++i) {
      const double a = distance_to_weight(d.values(i, j), sigma, kernel);
      g.adjacency(i, j) = a;
      g.adjacency(j, i) = a;
    }
  }
  g.degrees = g.adjacency.rowwise().sum();
  return g;
}

ComponentLabels connected_components(const SimilarityGraph& g, double edge_epsilon) {
  const Eigen::Index p = g.size();
  ComponentLabels out;
  out.labels.assign(static_cast<std::size_t>(p), -1);
  std::vector<Eigen::Index> stack;
  for (Eigen::Index start = 0; start < p; ++start) {
    if (out.labels[static_cast<std::size_t>(start)] >= 0) continue;
    const int label = out.count++;
    out.labels[static_cast<std::size_t>(start)] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < p; ++v) {
        if (out.labels[static_cast<std::size_t>(v)] < 0 &&
            g.adjacency(u, v) > edge_epsilon) {
          out.labels[static_cast<std::size_t>(v)] = label;
          stack.push_back(v);
        }
      }
    }
  }
  return out;
}

}  // namespace sclust
