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


#include <fstream>

#include "doctest.h"
#include "murmur/common/errors.hpp"
#include "murmur/common/rng.hpp"
#include "murmur/common/tensor_io.hpp"
#include "support/temp_dir.hpp"

using namespace murmur;

TEST_CASE("tensor file layout is magic, rank, dims, float32 payload") {
  testing::TempDir dir;
  Tensor t{{2, 3}, {1, 2, 3, 4, 5, 6}};
  write_tensor(dir / "a.wft", t);

  std::ifstream is(dir / "a.wft", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() == 4 + 4 + 2 * 8 + 6 * 4);
  CHECK(bytes.substr(0, 4) == "WFT1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 2);
  CHECK(static_cast<unsigned char>(bytes[8]) == 2);
  CHECK(static_cast<unsigned char>(bytes[16]) == 3);
  // 1.0f little-endian is 00 00 80 3f
  CHECK(static_cast<unsigned char>(bytes[24 + 3]) == 0x3f);
  CHECK(static_cast<unsigned char>(bytes[24 + 2]) == 0x80);
}

TEST_CASE("random tensors survive a write/read cycle bit-exactly") {
  testing::TempDir dir;
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor t;
    const auto rank = rng.below(4);
    for (std::uint64_t r = 0; r < rank; ++r) t.dims.push_back(rng.below(5));
    t.data.resize(t.element_count());
    for (auto& v : t.data) v = static_cast<float>(rng.normal());
    write_tensor(dir / "t.wft", t);
    const Tensor back = read_tensor(dir / "t.wft");
    CHECK(back.dims == t.dims);
    CHECK(back.data == t.data);
  }
}

TEST_CASE("malformed tensor files are rejected") {
  testing::TempDir dir;
  {
    std::ofstream os(dir / "bad.wft", std::ios::binary);
    os << "NOPE0000";
  }
  CHECK_THROWS_AS(read_tensor(dir / "bad.wft"), FormatError);

  write_tensor(dir / "ok.wft", Tensor{{4}, {1, 2, 3, 4}});
  std::filesystem::resize_file(dir / "ok.wft", std::filesystem::file_size(dir / "ok.wft") - 2);
  CHECK_THROWS_AS(read_tensor(dir / "ok.wft"), FormatError);
  CHECK_THROWS_AS(read_tensor(dir / "missing.wft"), IoError);
  CHECK_THROWS_AS(write_tensor(dir / "x.wft", Tensor{{3}, {1, 2}}), ArgumentError);
}

TEST_CASE("matrix helpers keep frame-major order") {
  testing::TempDir dir;
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  write_matrix(dir / "m.wft", m);
  const Matrix back = read_matrix(dir / "m.wft");
  CHECK(back == m);
}
