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

#include "teebound/stab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "teebound/clifford2.hpp"
#include "teebound/errors.hpp"

namespace teebound {

namespace {

using Word = std::uint64_t;
using cd = std::complex<double>;

template <typename F>
void for_words(BitRow& out, F f) {
  for (std::size_t w = 0; w < out.num_words(); ++w) out.data()[w] ^= f(w);
}

}  // namespace

StabilizerState::StabilizerState(std::size_t n) : n_(n), xs_(n, BitRow(n)), zs_(n, BitRow(n)), signs_(n) {
  for (std::size_t q = 0; q < n; ++q) zs_[q].set(q, true);
}

StabilizerState StabilizerState::from_generators(const std::vector<PauliString>& gens) {
  if (gens.empty()) throw std::invalid_argument("no generators");
  const std::size_t n = gens[0].size();
  if (gens.size() != n) throw std::invalid_argument("a pure state needs exactly n generators");
  StabilizerState s;
  s.n_ = n;
  s.xs_.assign(n, BitRow(n));
  s.zs_.assign(n, BitRow(n));
  s.signs_ = BitRow(n);
  for (std::size_t g = 0; g < n; ++g) {
    if (gens[g].size() != n) throw std::invalid_argument("generator length mismatch");
    if (!gens[g].is_hermitian()) throw std::invalid_argument("generators must be Hermitian");
    for (std::size_t q = 0; q < n; ++q) {
      if (gens[g].x().get(q)) s.xs_[q].set(g, true);
      if (gens[g].z().get(q)) s.zs_[q].set(g, true);
    }
    s.signs_.set(g, gens[g].phase() == 2);
  }
  s.validate();
  return s;
}

PauliString StabilizerState::generator(std::size_t g) const {
  PauliString p(n_);
  for (std::size_t q = 0; q < n_; ++q) {
    if (xs_[q].get(g)) p.x().set(q, true);
    if (zs_[q].get(g)) p.z().set(q, true);
  }
  p.set_phase(signs_.get(g) ? 2 : 0);
  return p;
}

std::vector<PauliString> StabilizerState::generators() const {
  std::vector<PauliString> out;
  out.reserve(num_generators());
  for (std::size_t g = 0; g < num_generators(); ++g) out.push_back(generator(g));
  return out;
}

void StabilizerState::validate() const {
  const auto gens = generators();
  std::vector<BitRow> rows;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      if (!gens[i].commutes(gens[j])) {
        throw std::logic_error("generators " + std::to_string(i) + " and " + std::to_string(j) + " anticommute");
      }
    }
    BitRow r(2 * n_);
    for (std::size_t q = 0; q < n_; ++q) {
      r.set(q, gens[i].x().get(q));
      r.set(n_ + q, gens[i].z().get(q));
    }
    rows.push_back(std::move(r));
  }
  if (gf2_rank(std::move(rows)) != n_) throw std::logic_error("generators are not independent");
}

void StabilizerState::apply(const Gate& g) {
  const auto h = [&](std::size_t q) {
    BitRow& x = xs_[q];
    BitRow& z = zs_[q];
    for_words(signs_, [&](std::size_t w) { return x.data()[w] & z.data()[w]; });
    std::swap(x, z);
  };
  const auto s = [&](std::size_t q) {
    BitRow& x = xs_[q];
    BitRow& z = zs_[q];
    for_words(signs_, [&](std::size_t w) { return x.data()[w] & z.data()[w]; });
    z ^= x;
  };
  const auto sdg = [&](std::size_t q) {
    BitRow& x = xs_[q];
    BitRow& z = zs_[q];
    for_words(signs_, [&](std::size_t w) { return x.data()[w] & ~z.data()[w]; });
    z ^= x;
  };
  const auto cnot = [&](std::size_t a, std::size_t b) {
    BitRow& xa = xs_[a];
    BitRow& za = zs_[a];
    BitRow& xb = xs_[b];
    BitRow& zb = zs_[b];
    for_words(signs_, [&](std::size_t w) {
      return xa.data()[w] & zb.data()[w] & ~(xb.data()[w] ^ za.data()[w]);
    });
    xb ^= xa;
    za ^= zb;
  };
  for (int q : g.support) {
    if (q < 0 || static_cast<std::size_t>(q) >= n_) throw std::out_of_range("gate qubit outside the state");
  }
  const auto q = [&](std::size_t i) { return static_cast<std::size_t>(g.support[i]); };
  switch (g.kind) {
    case GateKind::H: h(q(0)); break;
    case GateKind::S: s(q(0)); break;
    case GateKind::Sdg: sdg(q(0)); break;
    case GateKind::X: signs_ ^= zs_[q(0)]; break;
    case GateKind::Z: signs_ ^= xs_[q(0)]; break;
    case GateKind::Y: signs_ ^= xs_[q(0)]; signs_ ^= zs_[q(0)]; break;
    case GateKind::CNOT: cnot(q(0), q(1)); break;
    case GateKind::CZ: h(q(1)); cnot(q(0), q(1)); h(q(1)); break;
    case GateKind::Clifford2:
      for (CliffordOp op : Clifford2Table::instance().word(g.clifford_index)) {
        switch (op) {
          case CliffordOp::H0: h(q(0)); break;
          case CliffordOp::H1: h(q(1)); break;
          case CliffordOp::S0: s(q(0)); break;
          case CliffordOp::S1: s(q(1)); break;
          case CliffordOp::CX01: cnot(q(0), q(1)); break;
        }
      }
      break;
    case GateKind::Dense:
      throw std::invalid_argument("dense gate cannot run on the stabilizer engine");
  }
}

void StabilizerState::apply(const Circuit& c) {
  if (!c.is_clifford()) throw std::invalid_argument("dense gate cannot run on the stabilizer engine");
  for (const auto& layer : c.layers())
    for (const auto& g : layer) apply(g);
}

void StabilizerState::apply_pauli(const PauliString& p) {
  if (p.size() != n_) throw std::invalid_argument("Pauli length mismatch");
  for (int q : p.support()) {
    if (p.x().get(q)) signs_ ^= zs_[q];
    if (p.z().get(q)) signs_ ^= xs_[q];
  }
}

int StabilizerState::expectation(const PauliString& p) const {
  if (p.size() != n_) throw std::invalid_argument("Pauli length mismatch");
  if (!p.is_hermitian()) throw std::invalid_argument("expectation needs a Hermitian Pauli");
  BitRow anti(num_generators());
  const auto supp = p.support();
  for (int q : supp) {
    if (p.x().get(q)) anti ^= zs_[q];
    if (p.z().get(q)) anti ^= xs_[q];
  }
  if (anti.any()) return 0;
  // Solve sum_g c_g g = p on every qubit column.
  std::vector<BitRow> rows;
  BitRow rhs(2 * n_);
  for (std::size_t q = 0; q < n_; ++q) {
    rows.push_back(xs_[q]);
    rhs.set(2 * q, p.x().get(q));
    rows.push_back(zs_[q]);
    rhs.set(2 * q + 1, p.z().get(q));
  }
  const BitRow c = gf2_solve(std::move(rows), rhs, num_generators());
  if (c.size() == 0) throw std::logic_error("commuting Pauli outside a maximal stabilizer group");
  PauliString prod(n_);
  for (std::size_t g = 0; g < num_generators(); ++g) {
    if (c.get(g)) prod *= generator(g);
  }
  return prod.phase() == p.phase() ? +1 : -1;
}

std::string StabilizerState::dump() const {
  std::string out;
  for (std::size_t g = 0; g < num_generators(); ++g) {
    out += signs_.get(g) ? '-' : '+';
    for (std::size_t q = 0; q < n_; ++q) out += xs_[q].get(g) ? '1' : '0';
    for (std::size_t q = 0; q < n_; ++q) out += zs_[q].get(g) ? '1' : '0';
    out += '\n';
  }
  return out;
}

StabilizerState StabilizerState::load(std::istream& in) {
  std::vector<PauliString> gens;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if ((line[0] != '+' && line[0] != '-') || (line.size() - 1) % 2 != 0) {
      throw ConfigError("tableau line " + std::to_string(lineno) + ": expected sign and 2n bits");
    }
    const std::size_t n = (line.size() - 1) / 2;
    PauliString p(n);
    for (std::size_t q = 0; q < n; ++q) {
      const char xb = line[1 + q], zb = line[1 + n + q];
      if ((xb != '0' && xb != '1') || (zb != '0' && zb != '1')) {
        throw ConfigError("tableau line " + std::to_string(lineno) + ": bad bit");
      }
      p.x().set(q, xb == '1');
      p.z().set(q, zb == '1');
    }
    p.set_phase(line[0] == '-' ? 2 : 0);
    gens.push_back(std::move(p));
  }
  try {
    return StabilizerState::from_generators(gens);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid tableau: ") + e.what());
  }
}

StabilizerState apply_clifford(StabilizerState state, const Circuit& circuit) {
  state.apply(circuit);
  return state;
}

StabilizerState toric_code_ground_state(const Lattice& lat, LogicalSector sector) {
  if (lat.topology() != Topology::torus) {
    throw std::invalid_argument("toric code reference is only implemented on the torus");
  }
  const std::size_t n = static_cast<std::size_t>(lat.num_qubits());
  std::vector<PauliString> gens;
  for (int r = 0; r < lat.rows(); ++r) {
    for (int c = 0; c < lat.cols(); ++c) {
      if (r == lat.rows() - 1 && c == lat.cols() - 1) continue;
      gens.push_back(PauliString::on(n, lat.star({r, c}), 'X'));
      gens.push_back(PauliString::on(n, lat.plaquette({r, c}), 'Z'));
    }
  }
  std::vector<int> row0, col0;
  for (int c = 0; c < lat.cols(); ++c) row0.push_back(lat.h(0, c));
  for (int r = 0; r < lat.rows(); ++r) col0.push_back(lat.v(r, 0));
  auto z1 = PauliString::on(n, row0, 'Z');
  auto z2 = PauliString::on(n, col0, 'Z');
  if (sector.z1 < 0) z1.set_phase(2);
  if (sector.z2 < 0) z2.set_phase(2);
  gens.push_back(std::move(z1));
  gens.push_back(std::move(z2));
  return StabilizerState::from_generators(gens);
}

StabilizerState product_state(std::size_t n) { return StabilizerState(n); }

int entropy_bits(const StabilizerState& s, const Region& r) {
  if (r.empty()) return 0;
  if (r.qubits().back() >= static_cast<int>(s.num_qubits()) || r.qubits().front() < 0) {
    throw GeometryError("region '" + r.label() + "' has qubits outside the state");
  }
  std::vector<BitRow> cols;
  cols.reserve(2 * r.size());
  for (int q : r.qubits()) {
    cols.push_back(s.x_column(q));
    cols.push_back(s.z_column(q));
  }
  return static_cast<int>(gf2_rank(std::move(cols))) - static_cast<int>(r.size());
}

double entropy(const StabilizerState& s, const Region& r) { return entropy_bits(s, r) * std::numbers::ln2; }

namespace {

void check_disjoint(const std::vector<const Region*>& rs) {
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = i + 1; j < rs.size(); ++j)
      if (rs[i]->intersects(*rs[j])) {
        throw GeometryError("regions '" + rs[i]->label() + "' and '" + rs[j]->label() + "' overlap");
      }
}

}  // namespace

int cmi_bits(const StabilizerState& s, const Region& A, const Region& B, const Region& C) {
  check_disjoint({&A, &B, &C});
  return entropy_bits(s, region_union({A, B})) + entropy_bits(s, region_union({B, C})) -
         entropy_bits(s, B) - entropy_bits(s, region_union({A, B, C}));
}

double cmi(const StabilizerState& s, const Region& A, const Region& B, const Region& C) {
  return cmi_bits(s, A, B, C) * std::numbers::ln2;
}

int mutual_information_bits(const StabilizerState& s, const Region& A, const Region& B) {
  check_disjoint({&A, &B});
  return entropy_bits(s, A) + entropy_bits(s, B) - entropy_bits(s, region_union({A, B}));
}

std::vector<PauliString> supported_subgroup(const StabilizerState& s, const Region& r) {
  const std::size_t ng = s.num_generators();
  std::vector<BitRow> outside;
  for (std::size_t q = 0; q < s.num_qubits(); ++q) {
    if (r.contains(static_cast<int>(q))) continue;
    outside.push_back(s.x_column(q));
    outside.push_back(s.z_column(q));
  }
  const auto kernel = gf2_nullspace(std::move(outside), ng);
  const auto gens = s.generators();
  std::vector<PauliString> out;
  for (const auto& c : kernel) {
    PauliString prod(s.num_qubits());
    for (std::size_t g = 0; g < ng; ++g)
      if (c.get(g)) prod *= gens[g];
    PauliString local(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto q = static_cast<std::size_t>(r.qubits()[i]);
      local.x().set(i, prod.x().get(q));
      local.z().set(i, prod.z().get(q));
    }
    local.set_phase(prod.phase());
    out.push_back(std::move(local));
  }
  return out;
}

DensityMatrix reduced_density_matrix(const StabilizerState& s, const Region& r, int dense_limit) {
  if (static_cast<int>(r.size()) > dense_limit) {
    throw ResourceError("region of " + std::to_string(r.size()) + " qubits exceeds the dense limit of " +
                        std::to_string(dense_limit));
  }
  const auto gens = supported_subgroup(s, r);
  const std::size_t m = r.size();
  const long d = 1L << m;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  static const cd ipow[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  const auto add = [&](const PauliString& p) {
    long xm = 0, zm = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const long bit = 1L << (m - 1 - i);
      if (p.x().get(i)) xm |= bit;
      if (p.z().get(i)) zm |= bit;
    }
    const int k = (p.phase() + std::popcount(static_cast<unsigned long>(xm & zm))) % 4;
    for (long b = 0; b < d; ++b) {
      const int sgn = std::popcount(static_cast<unsigned long>(zm & b)) % 2 ? 2 : 0;
      rho(b ^ xm, b) += ipow[(k + sgn) % 4];
    }
  };
  PauliString cur(m);
  add(cur);
  const std::size_t k = gens.size();
  for (unsigned long i = 1; i < (1UL << k); ++i) {
    cur *= gens[static_cast<std::size_t>(std::countr_zero(i))];
    add(cur);
  }
  rho /= static_cast<double>(d);
  return DensityMatrix(qubit_factors(r), hermitian_part(rho));
}

Anyon anyon_from_string(const std::string& s) {
  if (s == "1" || s == "vacuum") return Anyon::vacuum;
  if (s == "e") return Anyon::e;
  if (s == "m") return Anyon::m;
  if (s == "epsilon" || s == "eps" || s == "fermion") return Anyon::epsilon;
  throw ConfigError("unknown anyon '" + s + "'");
}

const char* to_string(Anyon a) {
  switch (a) {
    case Anyon::vacuum: return "1";
    case Anyon::e: return "e";
    case Anyon::m: return "m";
    case Anyon::epsilon: return "epsilon";
  }
  return "?";
}

namespace {

void toggle_path(const Lattice& lat, const std::vector<Site>& path, bool dual, PauliString& p, char pauli) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const int q = dual ? lat.edge_between_plaquettes(path[i], path[i + 1])
                       : lat.edge_between_vertices(path[i], path[i + 1]);
    if (q < 0) throw GeometryError("string path has non-neighbouring consecutive sites");
    if (pauli == 'Z') {
      p.z().flip(static_cast<std::size_t>(q));
    } else {
      p.x().flip(static_cast<std::size_t>(q));
    }
  }
}

void require_open(const Lattice& lat, const std::vector<Site>& path) {
  if (path.size() < 2) throw GeometryError("string path needs at least two sites");
  if (lat.wrap(path.front()) == lat.wrap(path.back())) {
    throw GeometryError("closed path given to string_operator; use closed_string_operator");
  }
}

}  // namespace

PauliString string_operator(const Lattice& lat, Anyon a, const StringPaths& paths) {
  PauliString p(static_cast<std::size_t>(lat.num_qubits()));
  if (a == Anyon::e || a == Anyon::epsilon) {
    require_open(lat, paths.primal);
    toggle_path(lat, paths.primal, false, p, 'Z');
  }
  if (a == Anyon::m || a == Anyon::epsilon) {
    require_open(lat, paths.dual);
    toggle_path(lat, paths.dual, true, p, 'X');
  }
  return p;
}

PauliString closed_string_operator(const Lattice& lat, Anyon witness, const std::vector<Site>& loop,
                                   const Region& region) {
  if (witness != Anyon::e && witness != Anyon::m) {
    throw std::invalid_argument("closed witnesses are single e or m loops");
  }
  if (loop.size() < 3 || !(lat.wrap(loop.front()) == lat.wrap(loop.back()))) {
    throw GeometryError("witness loop must be closed");
  }
  PauliString p(static_cast<std::size_t>(lat.num_qubits()));
  toggle_path(lat, loop, witness == Anyon::m, p, witness == Anyon::m ? 'X' : 'Z');
  for (int q : p.support()) {
    if (!region.contains(q)) throw GeometryError("witness loop exits region '" + region.label() + "'");
  }
  return p;
}

namespace {

std::vector<Site> route(const Lattice& lat, Site from, Site to, const Region& keep_out, bool dual) {
  from = lat.wrap(from);
  to = lat.wrap(to);
  const auto key = [&](Site s) { return s.r * lat.cols() + s.c; };
  std::vector<int> prev(static_cast<std::size_t>(lat.rows() * lat.cols()), -2);
  std::deque<Site> queue{from};
  prev[key(from)] = -1;
  while (!queue.empty()) {
    const Site s = queue.front();
    queue.pop_front();
    if (s == to) break;
    const auto nbrs = dual ? lat.plaquette_neighbors(s) : lat.vertex_neighbors(s);
    for (Site t : nbrs) {
      if (prev[key(t)] != -2) continue;
      const int q = dual ? lat.edge_between_plaquettes(s, t) : lat.edge_between_vertices(s, t);
      if (q < 0 || keep_out.contains(q)) continue;
      prev[key(t)] = key(s);
      queue.push_back(t);
    }
  }
  if (prev[key(to)] == -2) throw GeometryError("no string path avoids the keep-out region");
  std::vector<Site> path;
  for (int k = key(to); k != -1; k = prev[k]) path.push_back({k / lat.cols(), k % lat.cols()});
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<Site> route_primal(const Lattice& lat, Site from, Site to, const Region& keep_out) {
  return route(lat, from, to, keep_out, false);
}

std::vector<Site> route_dual(const Lattice& lat, Site from, Site to, const Region& keep_out) {
  return route(lat, from, to, keep_out, true);
}

}  // namespace teebound
