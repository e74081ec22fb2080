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
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "teebound/lattice.hpp"

namespace teebound {

enum class GateKind { H, S, Sdg, X, Y, Z, CNOT, CZ, Clifford2, Dense };

const char* gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);

/// Local gate on one or two qubits. For two-qubit gates support[0] is the most
/// significant tensor factor of `unitary()` and the control of CNOT.
struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> support;
  /// Element of the two-qubit Clifford table when kind == Clifford2.
  int clifford_index = -1;
  /// Explicit matrix when kind == Dense.
  Eigen::MatrixXcd matrix;

  static Gate named(GateKind kind, std::vector<int> support);
  static Gate clifford2(int index, int a, int b);
  static Gate dense(std::vector<int> support, Eigen::MatrixXcd u);

  bool is_clifford() const { return kind != GateKind::Dense; }
  Eigen::MatrixXcd unitary() const;
  Gate inverse() const;
  bool operator==(const Gate& o) const;
};

using Layer = std::vector<Gate>;

/// Layered circuit; gates within a layer act on disjoint qubits. Layer 0 acts first.
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::vector<Layer> layers);

  void add_layer(Layer layer);
  const std::vector<Layer>& layers() const { return layers_; }
  int depth() const { return static_cast<int>(layers_.size()); }
  std::size_t gate_count() const;
  Region support() const;
  bool is_clifford() const;
  bool operator==(const Circuit& o) const { return layers_ == o.layers_; }

 private:
  std::vector<Layer> layers_;
};

/// Perfect matching of horizontal to vertical edges used by brickwork layer `layer`.
std::vector<std::pair<int, int>> brickwork_pairs(const Lattice& lat, int layer);

Circuit random_shallow_clifford(const Lattice& lat, int depth, std::uint64_t seed);
Circuit random_shallow_unitary(const Lattice& lat, int depth, std::uint64_t seed,
                               const std::optional<Region>& restrict_to = std::nullopt);

/// Random gates on caller-chosen pair layers; pairs within a layer must be disjoint.
Circuit random_clifford_on_pairs(const std::vector<std::vector<std::pair<int, int>>>& layers,
                                 std::uint64_t seed);
Circuit random_unitary_on_pairs(const std::vector<std::vector<std::pair<int, int>>>& layers,
                                std::uint64_t seed);

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
Eigen::MatrixXcd haar_unitary(int dim, std::uint64_t seed);

/// Gates whose whole support lies in the region; emptied layers are dropped.
Circuit gates_within(const Circuit& circuit, const Region& region);

Circuit invert(const Circuit& circuit);

/// Removes every gate causally downstream of `protected_region`, so the
/// original equals (removed gates) * (kept gates) with the removed part last.
Circuit restrict_outside_light_cone(const Circuit& circuit, const Region& protected_region);

/// Gates that restrict_outside_light_cone would remove.
Circuit removed_light_cone_gates(const Circuit& circuit, const Region& protected_region);

}  // namespace teebound
