#include "sclust/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstdint>

#include "sclust/csv.hpp"
#include "sclust/error.hpp"

namespace sclust {
namespace {

constexpr std::array<char, 8> kMagic = {'S', 'C', 'L', 'M', 'A', 'T', '0', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 4);
}

std::uint64_t get_u64(std::istream& in, const std::string& source) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw DataError(source + ": truncated matrix container");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

std::uint32_t get_u32(std::istream& in, const std::string& source) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw DataError(source + ": truncated matrix container");
  }
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m,
                      const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& column_names,
                      const std::string& id_column) {
  auto out = csv::open_output(path);
  if (!column_names.empty()) {
    std::vector<std::string> header;
    if (!row_ids.empty()) header.push_back(id_column);
    header.insert(header.end(), column_names.begin(), column_names.end());
    out << csv::join(header) << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!row_ids.empty()) out << csv::escape(row_ids[static_cast<std::size_t>(i)]) << ',';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << csv::format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_matrix_binary(const std::filesystem::path& path,
                         const Eigen::MatrixXd& m, const MatrixHeader& header) {
  auto out = csv::open_output(path);
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  put_u64(out, std::bit_cast<std::uint64_t>(header.sigma));
  put_u32(out, static_cast<std::uint32_t>(header.transform_tag.size()));
  out.write(header.transform_tag.data(),
            static_cast<std::streamsize>(header.transform_tag.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_u64(out, std::bit_cast<std::uint64_t>(m(i, j)));
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path,
                                   MatrixHeader* header) {
  auto in = csv::open_input(path);
  const std::string source = path.string();
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError(source + ": not an sclust matrix container (bad magic)");
  }
  const std::uint64_t rows = get_u64(in, source);
  const std::uint64_t cols = get_u64(in, source);
  const double sigma = std::bit_cast<double>(get_u64(in, source));
  const std::uint32_t tag_len = get_u32(in, source);
  std::string tag(tag_len, '\0');
  if (!in.read(tag.data(), tag_len)) {
    throw DataError(source + ": truncated matrix container");
  }
  if (rows > (1u << 20) || cols > (1u << 20)) {
    throw DataError(source + ": implausible matrix dimensions");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = std::bit_cast<double>(get_u64(in, source));
    }
  }
  if (header != nullptr) {
    header->sigma = sigma;
    header->transform_tag = std::move(tag);
  }
  return m;
}

}  // namespace sclust
