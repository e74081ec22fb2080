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

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace teebound {

/// Elementary generators of the two-qubit Clifford group.
enum class CliffordOp : std::uint8_t { H0, H1, S0, S1, CX01 };

/// All 11520 two-qubit Cliffords modulo global phase, each stored as a word
/// in the elementary generators. Built once, sorted by tableau key.
class Clifford2Table {
 public:
  static const Clifford2Table& instance();

  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<CliffordOp>& word(int index) const { return words_.at(index); }
  int inverse(int index) const { return inverse_.at(index); }
  int identity_index() const { return identity_; }
  Eigen::Matrix4cd unitary(int index) const;
  /// Images of X0, Z0, X1, Z1 packed as 5-bit (x0 z0 x1 z1 sign) groups.
  std::uint32_t key(int index) const { return keys_.at(index); }
  int index_of_key(std::uint32_t key) const;

 private:
  Clifford2Table();
  std::vector<std::vector<CliffordOp>> words_;
  std::vector<std::uint32_t> keys_;
  std::vector<int> inverse_;
  int identity_ = 0;
};

}  // namespace teebound
