#include "sclust/partition.hpp"

#include <algorithm>
#include <unordered_set>

#include "sclust/csv.hpp"
#include "sclust/error.hpp"

namespace sclust {

std::vector<int> Partition::cluster_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int label : labels) {
    if (label >= 0 && label < k) ++sizes[static_cast<std::size_t>(label)];
  }
  return sizes;
}

Partition canonicalize(Partition p) {
  std::vector<int> remap(static_cast<std::size_t>(p.k), -1);
  int next = 0;
  for (int& label : p.labels) {
    auto& slot = remap[static_cast<std::size_t>(label)];
    if (slot < 0) slot = next++;
    label = slot;
  }
  p.canonical = true;
  return p;
}

void write_partition_csv(const std::filesystem::path& path, const Partition& p) {
  auto out = csv::open_output(path);
  out << "item_id,label\n";
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    const std::string id = p.item_ids.empty() ? std::to_string(i) : p.item_ids[i];
    out << csv::escape(id) << ',' << p.labels[i] << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Partition read_partition_csv(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, 0, "empty partition file");
  const auto header = csv::split_line(line);
  if (header.size() != 2 || csv::trim(header[1]) != "label") {
    throw ParseError(source, 1, 0, "expected header 'item_id,label'");
  }
  Partition p;
  std::unordered_set<std::string> seen;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != 2) throw ParseError(source, row, 0, "expected 2 cells");
    std::string id(csv::trim(f[0]));
    if (!seen.insert(id).second) throw ParseError(source, row, 1, "duplicate item id '" + id + "'");
    int label = 0;
    if (!csv::parse_int(f[1], label) || label < 0) {
      throw ParseError(source, row, 2, "label must be a nonnegative integer");
    }
    p.item_ids.push_back(std::move(id));
    p.labels.push_back(label);
    p.k = std::max(p.k, label + 1);
  }
  return p;
}

}  // namespace sclust
