// Copyright 2026 The teebound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <random>

#include <gtest/gtest.h>

#include "teebound/gf2.hpp"

namespace teebound {
namespace {

BitRow row(const std::string& bits) {
  BitRow r(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) r.set(i, bits[i] == '1');
  return r;
}

std::vector<BitRow> random_rows(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  std::vector<BitRow> rows;
  for (std::size_t i = 0; i < m; ++i) {
    BitRow r(n);
    for (std::size_t j = 0; j < n; ++j) r.set(j, rng() & 1);
    rows.push_back(r);
  }
  return rows;
}

TEST(Gf2, RankOfSmallMatrices) {
  EXPECT_EQ(gf2_rank({}), 0u);
  EXPECT_EQ(gf2_rank({row("000"), row("000")}), 0u);
  EXPECT_EQ(gf2_rank({row("110"), row("011"), row("101")}), 2u);
  EXPECT_EQ(gf2_rank({row("100"), row("010"), row("001")}), 3u);
}

TEST(Gf2, RowsWiderThanOneWord) {
  BitRow a(130), b(130);
  a.set(0, true);
  a.set(129, true);
  b.set(64, true);
  b.set(129, true);
  EXPECT_EQ(gf2_rank({a, b, a ^ b}), 2u);
  EXPECT_EQ((a ^ b).popcount(), 2u);
  EXPECT_EQ(b.first_set(), 64u);
}

TEST(Gf2, RankNullityOnRandomMatrices) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng() % 40, n = 1 + rng() % 90;
    const auto rows = random_rows(m, n, rng);
    const auto rank = gf2_rank(rows);
    const auto kernel = gf2_nullspace(rows, n);
    EXPECT_EQ(rank + kernel.size(), n);
    for (const auto& k : kernel)
      for (const auto& r : rows) EXPECT_EQ((k & r).popcount() % 2, 0u);
    EXPECT_EQ(gf2_left_kernel(rows).size(), m - rank);
  }
}

TEST(Gf2, SolveReturnsAPreimage) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + rng() % 20, n = 2 + rng() % 20;
    const auto rows = random_rows(m, n, rng);
    BitRow x(n);
    for (std::size_t j = 0; j < n; ++j) x.set(j, rng() & 1);
    BitRow rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs.set(i, (rows[i] & x).popcount() % 2);
    const BitRow y = gf2_solve(rows, rhs, n);
    for (std::size_t i = 0; i < m; ++i) EXPECT_EQ((rows[i] & y).popcount() % 2, rhs.get(i) ? 1u : 0u);
  }
}

TEST(Gf2, SpanComparison) {
  EXPECT_TRUE(gf2_same_span({row("110"), row("011")}, {row("101"), row("110")}));
  EXPECT_FALSE(gf2_same_span({row("110")}, {row("011")}));
}

}  // namespace
}  // namespace teebound
