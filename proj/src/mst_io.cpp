// SPDX-License-Identifier: Apache-2.0
#include "metaseg/mst_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "metaseg/error.hpp"

namespace metaseg {
namespace {

constexpr std::array<char, 4> kMagic = {'M', 'S', 'T', '1'};
constexpr std::size_t kMaxDim = std::size_t{1} << 28;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

struct Header {
  MstDtype dtype;
  std::vector<std::size_t> dims;
  std::size_t payload_offset;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoFailure, "short write to " + path.string());
}

Header parse_header(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  const auto fail = [&](const std::string& why) {
    return Error(ErrorKind::MalformedHeader, path.string() + ": " + why);
  };
  if (bytes.size() < 6 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw fail("missing MST1 magic");
  }
  const std::uint8_t dtype = bytes[4];
  const std::uint8_t rank = bytes[5];
  if (dtype != 1 && dtype != 2) throw fail("unknown dtype code " + std::to_string(dtype));
  if (rank != 2 && rank != 3) throw fail("unsupported rank " + std::to_string(rank));
  const std::size_t offset = 6 + 4 * std::size_t{rank};
  if (bytes.size() < offset) throw fail("truncated dimension block");

  Header h{static_cast<MstDtype>(dtype), {}, offset};
  std::size_t count = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t d = get_u32(bytes.data() + 6 + 4 * i);
    if (d == 0 || d > kMaxDim) throw fail("dimension " + std::to_string(i) + " out of range");
    h.dims.push_back(d);
    count *= d;
    if (count > kMaxDim * 16) throw fail("payload too large");
  }
  const std::size_t expected = offset + 4 * count;
  if (bytes.size() != expected) {
    throw Error(ErrorKind::DimensionMismatch,
                path.string() + ": payload is " + std::to_string(bytes.size() - offset) +
                    " bytes, dimensions require " + std::to_string(4 * count));
  }
  return h;
}

std::vector<std::uint8_t> make_header(MstDtype dtype, std::initializer_list<std::size_t> dims) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(static_cast<std::uint8_t>(dtype));
  out.push_back(static_cast<std::uint8_t>(dims.size()));
  for (std::size_t d : dims) put_u32(out, static_cast<std::uint32_t>(d));
  return out;
}

}  // namespace

ProbTensor load_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const Header h = parse_header(bytes, path);
  if (h.dtype != MstDtype::Float32 || h.dims.size() != 3) {
    throw Error(ErrorKind::MalformedHeader, path.string() + ": tensor must be rank-3 float32");
  }
  std::vector<float> values(h.dims[0] * h.dims[1] * h.dims[2]);
  const std::uint8_t* p = bytes.data() + h.payload_offset;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(get_u32(p + 4 * i));
  }
  ProbTensor t(h.dims[0], h.dims[1], h.dims[2], std::move(values));
  t.validate();
  return t;
}

void save_tensor(const ProbTensor& tensor, const std::filesystem::path& path) {
  auto out = make_header(MstDtype::Float32,
                         {tensor.height(), tensor.width(), tensor.num_classes()});
  out.reserve(out.size() + 4 * tensor.values().size());
  for (float v : tensor.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  write_file(path, out);
}

LabelMap load_label_map(const std::filesystem::path& path, std::size_t num_classes,
                        std::int32_t ignore) {
  const auto bytes = read_file(path);
  const Header h = parse_header(bytes, path);
  if (h.dtype != MstDtype::Int32 || h.dims.size() != 2) {
    throw Error(ErrorKind::MalformedHeader, path.string() + ": label map must be rank-2 int32");
  }
  LabelMap map{h.dims[0], h.dims[1], std::vector<std::int32_t>(h.dims[0] * h.dims[1]), ignore};
  const std::uint8_t* p = bytes.data() + h.payload_offset;
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    map.labels[i] = static_cast<std::int32_t>(get_u32(p + 4 * i));
  }
  map.validate(num_classes);
  return map;
}

void save_label_map(const LabelMap& labels, const std::filesystem::path& path) {
  auto out = make_header(MstDtype::Int32, {labels.height, labels.width});
  out.reserve(out.size() + 4 * labels.labels.size());
  for (std::int32_t v : labels.labels) put_u32(out, static_cast<std::uint32_t>(v));
  write_file(path, out);
}

}  // namespace metaseg
