#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sclust {

/// Item -> cluster assignment with labels in [0, k).
struct Partition {
  std::vector<int> labels;
  int k = 0;
  double inertia = 0.0;
  std::uint64_t seed = 0;
  bool canonical = false;
  /// Optional; when present, crosstab matches items by id instead of position.
  std::vector<std::string> item_ids;

  std::size_t size() const { return labels.size(); }
  std::vector<int> cluster_sizes() const;
};

/// Renumbers labels by first occurrence (item 0's cluster becomes 0, ...).
/// Labels that never occur keep the highest numbers, in original order.
Partition canonicalize(Partition p);

/// Writes `item_id,label`; positions are used as ids when item_ids is empty.
void write_partition_csv(const std::filesystem::path& path, const Partition& p);

/// Reads `item_id,label`. k is one past the largest label.
Partition read_partition_csv(const std::filesystem::path& path);

}  // namespace sclust
