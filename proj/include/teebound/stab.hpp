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

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "teebound/circuits.hpp"
#include "teebound/dense.hpp"
#include "teebound/gf2.hpp"
#include "teebound/lattice.hpp"
#include "teebound/pauli.hpp"

namespace teebound {

/// Pure stabilizer state on n qubits with n independent commuting generators.
///
/// Storage is column-major: for each qubit a bit per generator for the X and
/// Z parts, so gates update whole words of generators at once and region
/// entropies only touch the columns of that region.
class StabilizerState {
 public:
  StabilizerState() = default;
  /// |0...0>.
  explicit StabilizerState(std::size_t n);
  /// Generators given as Hermitian Pauli strings; validated.
  static StabilizerState from_generators(const std::vector<PauliString>& gens);

  std::size_t num_qubits() const { return n_; }
  std::size_t num_generators() const { return signs_.size(); }

  PauliString generator(std::size_t g) const;
  std::vector<PauliString> generators() const;

  void apply(const Gate& g);
  void apply(const Circuit& c);
  /// State P|psi>: flips the sign of every generator anticommuting with P.
  void apply_pauli(const PauliString& p);

  /// <P> in {-1, 0, +1}.
  int expectation(const PauliString& p) const;

  /// Throws std::logic_error unless generators commute and are independent.
  void validate() const;

  /// Column vectors of qubit q over the generators.
  const BitRow& x_column(std::size_t q) const { return xs_[q]; }
  const BitRow& z_column(std::size_t q) const { return zs_[q]; }

  /// One line per generator: sign then X bits then Z bits.
  std::string dump() const;
  static StabilizerState load(std::istream& in);

 private:
  std::size_t n_ = 0;
  std::vector<BitRow> xs_, zs_;
  BitRow signs_;
};

StabilizerState apply_clifford(StabilizerState state, const Circuit& circuit);

/// Logical sector signs of the two wrapping Z loops.
struct LogicalSector {
  int z1 = +1;
  int z2 = +1;
};

StabilizerState toric_code_ground_state(const Lattice& lat, LogicalSector sector = {});
StabilizerState product_state(std::size_t n);

/// Entropy of a region in bits (an integer for stabilizer states).
int entropy_bits(const StabilizerState& s, const Region& r);
/// Entropy in nats.
double entropy(const StabilizerState& s, const Region& r);
/// I(A:C|B) in bits.
int cmi_bits(const StabilizerState& s, const Region& A, const Region& B, const Region& C);
double cmi(const StabilizerState& s, const Region& A, const Region& B, const Region& C);
int mutual_information_bits(const StabilizerState& s, const Region& A, const Region& B);

/// Generators of the subgroup supported inside the region (restricted to it,
/// qubit order follows the region).
std::vector<PauliString> supported_subgroup(const StabilizerState& s, const Region& r);

/// Dense reduced state on the region; factors labelled qubit_label(q).
DensityMatrix reduced_density_matrix(const StabilizerState& s, const Region& r,
                                     int dense_limit = kDefaultDenseLimit);

enum class Anyon { vacuum, e, m, epsilon };
Anyon anyon_from_string(const std::string& s);
const char* to_string(Anyon a);

/// Open paths: vertices for the Z string, plaquettes for the X string.
struct StringPaths {
  std::vector<Site> primal;
  std::vector<Site> dual;
};

PauliString string_operator(const Lattice& lat, Anyon a, const StringPaths& paths);
/// Closed string inside `region`: a vertex cycle for e (Z loop) or a plaquette
/// cycle for m (X loop); first and last sites coincide. The closed m string
/// detects enclosed e charge and the closed e string detects enclosed m flux.
PauliString closed_string_operator(const Lattice& lat, Anyon witness, const std::vector<Site>& loop,
                                   const Region& region);

/// Shortest vertex path whose edges avoid `keep_out`; throws GeometryError if none.
std::vector<Site> route_primal(const Lattice& lat, Site from, Site to, const Region& keep_out);
/// Shortest plaquette path whose shared edges avoid `keep_out`.
std::vector<Site> route_dual(const Lattice& lat, Site from, Site to, const Region& keep_out);

}  // namespace teebound
