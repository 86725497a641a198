#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sclust/ingest.hpp"
#include "sclust/partition.hpp"

namespace sclust {

/// Block-structured latent Gaussian model. Correlation targets refer to the
/// latent variables, before discretization to the Likert scale.
struct PlantedSpec {
  std::vector<int> block_sizes;
  int n_subjects = 0;
  double within_r = 0.3;
  double between_r = 0.0;
  LikertSchema schema;
  std::uint64_t seed = 1;

  int n_items() const;
};

/// Throws ParameterError on: no blocks, a block smaller than 2, non-positive
/// subject count, within_r outside (0, 1), between_r outside
/// (-1, within_r), or a target matrix that is not positive semidefinite.
void validate(const PlantedSpec& spec);

struct PlantedData {
  ResponseMatrix responses;
  Partition truth;  ///< canonical, with item ids
  std::vector<ItemMetadata> metadata;  ///< domain_label = "B1", "B2", ...
};

/// Draws n_subjects latent vectors, maps each coordinate to the scale through
/// equal-probability thresholds, and returns the responses with the planted
/// partition. Items are named q001, q002, ... in block order.
PlantedData generate(const PlantedSpec& spec);

/// Latent correlation matrix targeted by `spec`.
Eigen::MatrixXd target_correlation(const PlantedSpec& spec);

/// Upper cutpoints of the equal-probability discretization (levels - 1 values).
std::vector<double> equal_probability_thresholds(int levels);

/// Masks round(fraction * cells) uniformly chosen cells. Cells that were
/// already missing stay missing. Throws ParameterError unless
/// 0 <= fraction < 1.
ResponseMatrix inject_missing(const ResponseMatrix& r, double fraction, std::uint64_t seed);

/// Reads a `key = value` spec document ('#' starts a comment). Keys:
/// block_sizes (comma list, brackets optional) or n_blocks + block_size,
/// n_subjects, within_r, between_r, scale_min, scale_max, seed. Unknown keys
/// and malformed values raise ParseError with the line number.
PlantedSpec parse_planted_spec(std::istream& in, const std::string& source = "<stream>");
PlantedSpec load_planted_spec(const std::filesystem::path& path);

/// "paper-shape": 5 x 60 items, 20,993 subjects. "tiny": 3 x 10 items, 500
/// subjects. Throws ParameterError for unknown names.
PlantedSpec preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace sclust
