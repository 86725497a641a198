#include "run_support.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "sclust/csv.hpp"
#include "sclust/error.hpp"
#include "sclust_cli/cli.hpp"

namespace sclust::cli {

namespace fs = std::filesystem;

LoadedData load_data(const RunOptions& o) {
  if (o.responses.empty()) throw ParameterError("--responses is required");
  LikertSchema schema{o.scale_min, o.scale_max};
  if (schema.scale_max <= schema.scale_min) {
    throw ParameterError("--scale-max must exceed --scale-min");
  }
  LoadedData data;
  data.responses = load_responses(o.responses, schema);
  data.digest = file_digest(o.responses);
  if (!o.metadata.empty()) data.metadata = load_metadata(o.metadata);

  if (!o.reverse_domains.empty() || o.reverse_keyed) {
    if (data.metadata.empty()) {
      throw ParameterError("reverse coding needs --metadata");
    }
  }
  if (!o.reverse_domains.empty()) {
    std::set<std::string> domains;
    for (const auto& d : csv::split_line(o.reverse_domains)) {
      const auto name = csv::trim(d);
      if (!name.empty()) domains.emplace(std::string(name));
    }
    data.responses = reverse_code(data.responses, data.metadata, domains);
  }
  if (o.reverse_keyed) data.responses = reverse_code_by_key(data.responses, data.metadata);

  data.missing_fraction = data.responses.missing_fraction();
  if (data.responses.missing_count() > 0) {
    std::optional<int> neutral;
    if (!o.neutral.empty()) {
      int value = 0;
      if (!csv::parse_int(csv::trim(o.neutral), value)) {
        throw ParameterError("--neutral must be an integer, got '" + o.neutral + "'");
      }
      neutral = value;
    }
    data.responses = impute_neutral(data.responses, neutral);
    data.imputed_value = neutral.value_or((schema.scale_min + schema.scale_max) / 2);
  }
  return data;
}

DistanceVariant distance_variant(const RunOptions& o) { return parse_distance_variant(o.distance); }

KernelVariant kernel_variant(const RunOptions& o) { return parse_kernel_variant(o.kernel); }

DiagonalPolicy diagonal_policy(const RunOptions& o) {
  return o.zero_diagonal ? DiagonalPolicy::zero : DiagonalPolicy::self_loops;
}

PipelineSettings pipeline_settings(const RunOptions& o) {
  PipelineSettings s;
  s.l = o.l;
  s.kernel = kernel_variant(o);
  s.diagonal = diagonal_policy(o);
  s.row_normalize = o.row_normalize;
  s.kmeans.init = parse_kmeans_init(o.init);
  return s;
}

std::string transform_tag(const RunOptions& o) {
  return sclust::transform_tag(distance_variant(o), kernel_variant(o), diagonal_policy(o));
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

fs::path prepare_output_dir(const RunOptions& o) {
  if (o.out.empty()) throw ParameterError("--out is required");
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = csv::open_output(path);
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

nlohmann::ordered_json base_provenance(const RunOptions& o) {
  nlohmann::ordered_json prov;
  prov["tool"] = "sclust";
  prov["version"] = std::string(version());
  prov["command"] = o.command;
  return prov;
}

void add_input(nlohmann::ordered_json& prov, const RunOptions& o, const LoadedData& data) {
  nlohmann::ordered_json input;
  input["responses"] = o.responses;
  input["responses_fnv1a64"] = data.digest;
  if (!o.metadata.empty()) input["metadata"] = o.metadata;
  input["n_subjects"] = data.responses.n_subjects();
  input["n_items"] = data.responses.n_items();
  input["scale"] = {o.scale_min, o.scale_max};
  input["missing_fraction"] = data.missing_fraction;
  if (data.imputed_value) {
    input["imputed_with"] = *data.imputed_value;
  } else {
    input["imputed_with"] = nullptr;
  }
  input["reverse_coded_domains"] = o.reverse_domains;
  input["reverse_coded_by_key"] = o.reverse_keyed;
  prov["input"] = std::move(input);
  prov["assumptions"] = {
      "respondents are taken as already screened; no subject is excluded",
      "missing cells are replaced by the neutral scale value before correlation"};
}

void write_provenance(const fs::path& dir, nlohmann::ordered_json prov) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name != "provenance.json") files.push_back(name);
  }
  std::sort(files.begin(), files.end());
  prov["outputs"] = files;
  write_text(dir / "provenance.json", prov.dump(2) + "\n");
}

}  // namespace sclust::cli
