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

#include "teebound/clifford2.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "teebound/pauli.hpp"

namespace teebound {

namespace {

constexpr CliffordOp kGenerators[] = {CliffordOp::H0, CliffordOp::H1, CliffordOp::S0,
                                      CliffordOp::S1, CliffordOp::CX01};

Gate as_gate(CliffordOp op) {
  switch (op) {
    case CliffordOp::H0: return Gate::named(GateKind::H, {0});
    case CliffordOp::H1: return Gate::named(GateKind::H, {1});
    case CliffordOp::S0: return Gate::named(GateKind::S, {0});
    case CliffordOp::S1: return Gate::named(GateKind::S, {1});
    case CliffordOp::CX01: return Gate::named(GateKind::CNOT, {0, 1});
  }
  throw std::logic_error("unreachable");
}

std::uint32_t pack(const PauliString& p) {
  return static_cast<std::uint32_t>(p.x().get(0)) | (p.z().get(0) << 1) | (p.x().get(1) << 2) |
         (p.z().get(1) << 3) | ((p.phase() == 2) << 4);
}

std::uint32_t key_of(const std::vector<CliffordOp>& word) {
  std::uint32_t key = 0;
  const char* inputs[4] = {"XI", "ZI", "IX", "IZ"};
  for (int i = 0; i < 4; ++i) {
    PauliString p = PauliString::parse(inputs[i]);
    for (CliffordOp op : word) conjugate_in_place(p, as_gate(op));
    key |= pack(p) << (5 * i);
  }
  return key;
}

Eigen::Matrix4cd op_matrix(CliffordOp op) {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd h, s, id = Eigen::Matrix2cd::Identity();
  h << r, r, r, -r;
  s << 1, 0, 0, std::complex<double>(0, 1);
  Eigen::Matrix4cd m;
  const auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
  };
  switch (op) {
    case CliffordOp::H0: return kron(h, id);
    case CliffordOp::H1: return kron(id, h);
    case CliffordOp::S0: return kron(s, id);
    case CliffordOp::S1: return kron(id, s);
    case CliffordOp::CX01:
      m.setZero();
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      return m;
  }
  throw std::logic_error("unreachable");
}

}  // namespace

const Clifford2Table& Clifford2Table::instance() {
  static const Clifford2Table table;
  return table;
}

Clifford2Table::Clifford2Table() {
  std::unordered_map<std::uint32_t, std::vector<CliffordOp>> seen;
  std::deque<std::vector<CliffordOp>> queue{{}};
  seen.emplace(key_of({}), std::vector<CliffordOp>{});
  while (!queue.empty()) {
    auto word = std::move(queue.front());
    queue.pop_front();
    for (CliffordOp g : kGenerators) {
      auto next = word;
      next.push_back(g);
      const auto k = key_of(next);
      if (seen.emplace(k, next).second) queue.push_back(std::move(next));
    }
  }
  std::vector<std::pair<std::uint32_t, std::vector<CliffordOp>>> sorted(seen.begin(), seen.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [k, w] : sorted) {
    keys_.push_back(k);
    words_.push_back(std::move(w));
  }
  identity_ = index_of_key(key_of({}));
  inverse_.resize(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::vector<CliffordOp> inv;
    for (auto it = words_[i].rbegin(); it != words_[i].rend(); ++it) {
      const int reps = (*it == CliffordOp::S0 || *it == CliffordOp::S1) ? 3 : 1;
      for (int r = 0; r < reps; ++r) inv.push_back(*it);
    }
    inverse_[i] = index_of_key(key_of(inv));
  }
}

int Clifford2Table::index_of_key(std::uint32_t key) const {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) throw std::out_of_range("not a two-qubit Clifford key");
  return static_cast<int>(it - keys_.begin());
}

Eigen::Matrix4cd Clifford2Table::unitary(int index) const {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  for (CliffordOp op : word(index)) u = op_matrix(op) * u;
  return u;
}

}  // namespace teebound
