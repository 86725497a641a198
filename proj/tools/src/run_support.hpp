#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sclust/ingest.hpp"
#include "sclust/simgraph.hpp"
#include "sclust/stability.hpp"

namespace sclust::cli {

/// Every option of every subcommand; each subcommand reads its own subset.
struct RunOptions {
  std::string command;

  std::string responses;
  std::string metadata;
  int scale_min = 1;
  int scale_max = 5;
  std::string neutral;
  std::string reverse_domains;
  bool reverse_keyed = false;

  std::string distance = "paper_literal";
  std::string kernel = "ratio_squared";
  bool zero_diagonal = false;
  bool row_normalize = false;
  std::string init = "uniform";

  double sigma = 0.5;
  std::string spectrum_sigma = "0.35:1:0.05";
  std::string stability_sigma = "0.1:1:0.05";
  std::string sweep_sigma;
  int l = 4;
  int l_probe = 10;
  int k = 5;
  int k_min = 2;
  int k_max = 10;
  int n_runs = 100;
  int n_trials = 100;
  int subsample_size = 150;
  int restarts = 10;
  int reference_runs = 100;
  int max_attempts = 10;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  bool save_matrices = false;

  std::string partition_a;
  std::string partition_b;
  int fa_k = 0;
  std::string rule = "magnitude";
  bool no_rotation = false;

  std::string spec;
  std::string preset = "tiny";
  bool seed_given = false;
  double missing_fraction = 0.0;

  std::string out;
  unsigned workers = 0;
};

struct LoadedData {
  ResponseMatrix responses;  ///< reverse-coded and imputed
  std::vector<ItemMetadata> metadata;
  double missing_fraction = 0.0;
  std::optional<int> imputed_value;
  std::string digest;
};

/// Reads responses (and metadata when given), applies reverse coding, then
/// imputes missing cells with the neutral value.
LoadedData load_data(const RunOptions& o);

DistanceVariant distance_variant(const RunOptions& o);
KernelVariant kernel_variant(const RunOptions& o);
DiagonalPolicy diagonal_policy(const RunOptions& o);
PipelineSettings pipeline_settings(const RunOptions& o);
std::string transform_tag(const RunOptions& o);

/// FNV-1a 64 of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

std::filesystem::path prepare_output_dir(const RunOptions& o);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Common provenance fields; callers add command-specific entries and then
/// call write_provenance, which appends the sorted output file list.
nlohmann::ordered_json base_provenance(const RunOptions& o);
void add_input(nlohmann::ordered_json& prov, const RunOptions& o, const LoadedData& data);
void write_provenance(const std::filesystem::path& dir, nlohmann::ordered_json prov);

}  // namespace sclust::cli
