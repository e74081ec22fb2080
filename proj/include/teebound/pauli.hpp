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

#include <string>
#include <vector>

#include "teebound/circuits.hpp"
#include "teebound/gf2.hpp"

namespace teebound {

/// i^phase times a tensor product of I, X, Y, Z (Y written as x=z=1).
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n) : x_(n), z_(n) {}
  PauliString(BitRow x, BitRow z, int phase = 0);

  /// Parses "+XYZI", "-ZZ", "iX" ... (one character per qubit).
  static PauliString parse(const std::string& s);
  static PauliString on(std::size_t n, const std::vector<int>& qubits, char pauli);

  std::size_t size() const { return x_.size(); }
  const BitRow& x() const { return x_; }
  const BitRow& z() const { return z_; }
  BitRow& x() { return x_; }
  BitRow& z() { return z_; }
  int phase() const { return phase_; }
  void set_phase(int k) { phase_ = ((k % 4) + 4) % 4; }
  bool is_hermitian() const { return phase_ % 2 == 0; }
  /// -1 or +1 for Hermitian strings.
  int sign() const { return phase_ == 2 ? -1 : 1; }

  char at(std::size_t q) const;
  void set(std::size_t q, char pauli);
  std::vector<int> support() const;
  std::size_t weight() const;
  bool is_identity() const { return !x_.any() && !z_.any(); }

  bool commutes(const PauliString& o) const;
  PauliString& operator*=(const PauliString& o);
  bool operator==(const PauliString& o) const = default;

  std::string str() const;

 private:
  BitRow x_, z_;
  int phase_ = 0;
};

inline PauliString operator*(PauliString a, const PauliString& b) { return a *= b; }

/// P -> G P G^dagger. Throws for dense gates.
void conjugate_in_place(PauliString& p, const Gate& g);
/// P -> U P U^dagger for a Clifford circuit.
PauliString conjugate(PauliString p, const Circuit& c);

}  // namespace teebound
