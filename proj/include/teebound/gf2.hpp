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

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace teebound {

/// Fixed-length bit vector packed into 64-bit words. Bits past `size()` in the
/// last word are always zero.
class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return nbits_; }
  std::size_t num_words() const { return words_.size(); }

  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::uint64_t* data() { return words_.data(); }
  const std::uint64_t* data() const { return words_.data(); }

  BitRow& operator^=(const BitRow& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }
  BitRow& operator&=(const BitRow& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
    return *this;
  }
  BitRow& operator|=(const BitRow& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }

  bool any() const {
    for (auto w : words_) {
      if (w) return true;
    }
    return false;
  }
  std::size_t popcount() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  /// Index of the lowest set bit, or size() when none.
  std::size_t first_set() const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    }
    return nbits_;
  }

  bool operator==(const BitRow& o) const = default;

  std::string str() const;

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

inline BitRow operator^(BitRow a, const BitRow& b) { return a ^= b; }
inline BitRow operator&(BitRow a, const BitRow& b) { return a &= b; }

/// Rank over GF(2) of the given rows (all of equal length). Rows are consumed.
std::size_t gf2_rank(std::vector<BitRow> rows);

/// Basis of the left kernel {c : sum_i c_i rows_i = 0}, each basis vector of
/// length rows.size().
std::vector<BitRow> gf2_left_kernel(const std::vector<BitRow>& rows);

/// Basis of {c : <row_i, c> = 0 for all i}, each of length ncols.
std::vector<BitRow> gf2_nullspace(std::vector<BitRow> rows, std::size_t ncols);

/// Some c with <row_i, c> = rhs_i for all i, or an empty BitRow when none exists.
BitRow gf2_solve(std::vector<BitRow> rows, const BitRow& rhs, std::size_t ncols);

/// True when the row spaces of a and b coincide.
bool gf2_same_span(const std::vector<BitRow>& a, const std::vector<BitRow>& b);

}  // namespace teebound
