// Copyright 2026 The Murmur Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "murmur/common/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "murmur/common/errors.hpp"

namespace murmur {

namespace {

constexpr char kMagic[4] = {'W', 'F', 'T', '1'};
constexpr std::uint32_t kMaxRank = 8;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(p[i]) << (8 * i);
  return value;
}

}  // namespace

std::uint64_t Tensor::element_count() const {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  if (tensor.dims.size() > kMaxRank) throw ArgumentError("tensor rank too large");
  if (tensor.element_count() != tensor.data.size()) {
    throw ArgumentError("tensor dims do not match payload size");
  }
  std::string buf(kMagic, 4);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put_le<std::uint64_t>(buf, d);
  buf.reserve(buf.size() + 4 * tensor.data.size());
  for (float f : tensor.data) put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(f));

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw IoError("write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open tensor file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();

  if (n < 8 || std::memcmp(p, kMagic, 4) != 0) {
    throw FormatError("not a tensor file (bad magic): " + path.string());
  }
  const auto rank = get_le<std::uint32_t>(p + 4);
  if (rank > kMaxRank) throw FormatError("tensor rank out of range: " + path.string());
  std::size_t offset = 8;
  if (n < offset + 8 * rank) throw FormatError("truncated tensor header: " + path.string());

  Tensor t;
  t.dims.resize(rank);
  for (std::uint32_t i = 0; i < rank; ++i, offset += 8) t.dims[i] = get_le<std::uint64_t>(p + offset);
  const std::uint64_t count = t.element_count();
  if (n - offset != 4 * count) throw FormatError("tensor payload size mismatch: " + path.string());
  t.data.resize(count);
  for (std::uint64_t i = 0; i < count; ++i, offset += 4) {
    t.data[i] = std::bit_cast<float>(get_le<std::uint32_t>(p + offset));
  }
  return t;
}

Tensor to_tensor(const Matrix& m) {
  Tensor t;
  t.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  t.data.resize(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) t.data[i] = static_cast<float>(m.data()[i]);
  return t;
}

Matrix to_matrix(const Tensor& t) {
  if (t.dims.size() == 1) {
    Matrix m(static_cast<Eigen::Index>(t.dims[0]), 1);
    for (std::size_t i = 0; i < t.data.size(); ++i) m.data()[i] = t.data[i];
    return m;
  }
  if (t.dims.size() != 2) throw FormatError("expected a rank-2 tensor");
  Matrix m(static_cast<Eigen::Index>(t.dims[0]), static_cast<Eigen::Index>(t.dims[1]));
  for (std::size_t i = 0; i < t.data.size(); ++i) m.data()[i] = t.data[i];
  return m;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) { write_tensor(path, to_tensor(m)); }

Matrix read_matrix(const std::filesystem::path& path) { return to_matrix(read_tensor(path)); }

}  // namespace murmur
