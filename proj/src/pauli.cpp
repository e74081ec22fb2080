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

#include "teebound/pauli.hpp"

#include <stdexcept>

#include "teebound/clifford2.hpp"
#include "teebound/errors.hpp"

namespace teebound {

PauliString::PauliString(BitRow x, BitRow z, int phase) : x_(std::move(x)), z_(std::move(z)) {
  if (x_.size() != z_.size()) throw std::invalid_argument("Pauli masks differ in length");
  set_phase(phase);
}

PauliString PauliString::parse(const std::string& s) {
  std::size_t pos = 0;
  int phase = 0;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    if (s[pos] == '-') phase = 2;
    ++pos;
  }
  if (pos < s.size() && s[pos] == 'i') {
    phase += 1;
    ++pos;
  }
  PauliString p(s.size() - pos);
  for (std::size_t q = 0; pos + q < s.size(); ++q) p.set(q, s[pos + q]);
  p.set_phase(phase);
  return p;
}

PauliString PauliString::on(std::size_t n, const std::vector<int>& qubits, char pauli) {
  PauliString p(n);
  for (int q : qubits) p.set(static_cast<std::size_t>(q), pauli);
  return p;
}

char PauliString::at(std::size_t q) const {
  const bool x = x_.get(q), z = z_.get(q);
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

void PauliString::set(std::size_t q, char pauli) {
  switch (pauli) {
    case 'I': case '_': case '.': x_.set(q, false); z_.set(q, false); break;
    case 'X': x_.set(q, true); z_.set(q, false); break;
    case 'Y': x_.set(q, true); z_.set(q, true); break;
    case 'Z': x_.set(q, false); z_.set(q, true); break;
    default: throw std::invalid_argument(std::string("bad Pauli character '") + pauli + "'");
  }
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (std::size_t q = 0; q < size(); ++q) {
    if (x_.get(q) || z_.get(q)) out.push_back(static_cast<int>(q));
  }
  return out;
}

std::size_t PauliString::weight() const {
  BitRow u = x_;
  u |= z_;
  return u.popcount();
}

bool PauliString::commutes(const PauliString& o) const {
  return ((x_ & o.z_).popcount() + (z_ & o.x_).popcount()) % 2 == 0;
}

PauliString& PauliString::operator*=(const PauliString& o) {
  // Work in X^x Z^z form, where Y = i X Z.
  int k = phase_ + static_cast<int>((x_ & z_).popcount()) + o.phase_ +
          static_cast<int>((o.x_ & o.z_).popcount()) + 2 * static_cast<int>((z_ & o.x_).popcount());
  x_ ^= o.x_;
  z_ ^= o.z_;
  k -= static_cast<int>((x_ & z_).popcount());
  set_phase(k);
  return *this;
}

std::string PauliString::str() const {
  static const char* prefix[4] = {"+", "+i", "-", "-i"};
  std::string s = prefix[phase_];
  for (std::size_t q = 0; q < size(); ++q) s += at(q);
  return s;
}

namespace {

void flip_sign(PauliString& p) { p.set_phase(p.phase() + 2); }

void apply_h(PauliString& p, std::size_t q) {
  const bool x = p.x().get(q), z = p.z().get(q);
  if (x && z) flip_sign(p);
  p.x().set(q, z);
  p.z().set(q, x);
}

void apply_s(PauliString& p, std::size_t q) {
  const bool x = p.x().get(q), z = p.z().get(q);
  if (x && z) flip_sign(p);
  p.z().set(q, z ^ x);
}

void apply_sdg(PauliString& p, std::size_t q) {
  const bool x = p.x().get(q), z = p.z().get(q);
  if (x && !z) flip_sign(p);
  p.z().set(q, z ^ x);
}

void apply_cnot(PauliString& p, std::size_t a, std::size_t b) {
  const bool xa = p.x().get(a), za = p.z().get(a), xb = p.x().get(b), zb = p.z().get(b);
  if (xa && zb && !(xb ^ za)) flip_sign(p);
  p.x().set(b, xb ^ xa);
  p.z().set(a, za ^ zb);
}

}  // namespace

void conjugate_in_place(PauliString& p, const Gate& g) {
  const auto q = [&](std::size_t i) { return static_cast<std::size_t>(g.support.at(i)); };
  switch (g.kind) {
    case GateKind::H: apply_h(p, q(0)); break;
    case GateKind::S: apply_s(p, q(0)); break;
    case GateKind::Sdg: apply_sdg(p, q(0)); break;
    case GateKind::X: if (p.z().get(q(0))) flip_sign(p); break;
    case GateKind::Z: if (p.x().get(q(0))) flip_sign(p); break;
    case GateKind::Y: if (p.x().get(q(0)) ^ p.z().get(q(0))) flip_sign(p); break;
    case GateKind::CNOT: apply_cnot(p, q(0), q(1)); break;
    case GateKind::CZ:
      apply_h(p, q(1));
      apply_cnot(p, q(0), q(1));
      apply_h(p, q(1));
      break;
    case GateKind::Clifford2:
      for (CliffordOp op : Clifford2Table::instance().word(g.clifford_index)) {
        switch (op) {
          case CliffordOp::H0: apply_h(p, q(0)); break;
          case CliffordOp::H1: apply_h(p, q(1)); break;
          case CliffordOp::S0: apply_s(p, q(0)); break;
          case CliffordOp::S1: apply_s(p, q(1)); break;
          case CliffordOp::CX01: apply_cnot(p, q(0), q(1)); break;
        }
      }
      break;
    case GateKind::Dense:
      throw std::invalid_argument("dense gate cannot conjugate a Pauli string");
  }
}

PauliString conjugate(PauliString p, const Circuit& c) {
  for (const auto& layer : c.layers()) {
    for (const auto& g : layer) conjugate_in_place(p, g);
  }
  return p;
}

}  // namespace teebound
