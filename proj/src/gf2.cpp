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

#include "teebound/gf2.hpp"

#include <utility>

namespace teebound {

std::string BitRow::str() const {
  std::string s(nbits_, '0');
  for (std::size_t i = 0; i < nbits_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

std::size_t gf2_rank(std::vector<BitRow> rows) {
  std::size_t rank = 0;
  const std::size_t nrows = rows.size();
  for (std::size_t r = 0; r < nrows; ++r) {
    const std::size_t pivot = rows[r].first_set();
    if (pivot == rows[r].size()) continue;
    ++rank;
    const std::size_t w = pivot >> 6;
    const std::uint64_t mask = std::uint64_t{1} << (pivot & 63);
    for (std::size_t k = r + 1; k < nrows; ++k) {
      if (rows[k].data()[w] & mask) rows[k] ^= rows[r];
    }
  }
  return rank;
}

std::vector<BitRow> gf2_left_kernel(const std::vector<BitRow>& rows) {
  const std::size_t n = rows.size();
  std::vector<BitRow> work = rows;
  std::vector<BitRow> combo;
  combo.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    combo.emplace_back(n);
    combo.back().set(i, true);
  }
  std::vector<BitRow> kernel;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t pivot = work[r].first_set();
    if (pivot == work[r].size()) {
      kernel.push_back(combo[r]);
      continue;
    }
    const std::size_t w = pivot >> 6;
    const std::uint64_t mask = std::uint64_t{1} << (pivot & 63);
    for (std::size_t k = r + 1; k < n; ++k) {
      if (work[k].data()[w] & mask) {
        work[k] ^= work[r];
        combo[k] ^= combo[r];
      }
    }
  }
  return kernel;
}

bool gf2_same_span(const std::vector<BitRow>& a, const std::vector<BitRow>& b) {
  const std::size_t ra = gf2_rank(a);
  if (ra != gf2_rank(b)) return false;
  std::vector<BitRow> both = a;
  both.insert(both.end(), b.begin(), b.end());
  return gf2_rank(std::move(both)) == ra;
}

}  // namespace teebound

namespace teebound {

namespace {

// Reduced row echelon form in place; returns pivot columns (row i has pivot pivots[i]).
std::vector<std::size_t> rref(std::vector<BitRow>& rows, std::size_t ncols, BitRow* rhs) {
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
    std::size_t sel = rank;
    while (sel < rows.size() && !rows[sel].get(col)) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[rank], rows[sel]);
    if (rhs) {
      const bool a = rhs->get(rank), b = rhs->get(sel);
      rhs->set(rank, b);
      rhs->set(sel, a);
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r].get(col)) {
        rows[r] ^= rows[rank];
        if (rhs && rhs->get(rank)) rhs->flip(r);
      }
    }
    pivots.push_back(col);
    ++rank;
  }
  return pivots;
}

}  // namespace

std::vector<BitRow> gf2_nullspace(std::vector<BitRow> rows, std::size_t ncols) {
  const auto pivots = rref(rows, ncols, nullptr);
  std::vector<bool> is_pivot(ncols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<BitRow> basis;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    BitRow v(ncols);
    v.set(f, true);
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      if (rows[i].get(f)) v.set(pivots[i], true);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

BitRow gf2_solve(std::vector<BitRow> rows, const BitRow& rhs, std::size_t ncols) {
  BitRow b = rhs;
  const auto pivots = rref(rows, ncols, &b);
  for (std::size_t r = pivots.size(); r < rows.size(); ++r) {
    if (b.get(r)) return BitRow();
  }
  BitRow x(ncols);
  for (std::size_t i = 0; i < pivots.size(); ++i) x.set(pivots[i], b.get(i));
  return x;
}

}  // namespace teebound
