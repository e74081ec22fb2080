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

#include "teebound/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "teebound/clifford2.hpp"
#include "teebound/errors.hpp"

namespace teebound {

namespace {

using cd = std::complex<double>;

struct KindName {
  GateKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {GateKind::H, "H"},       {GateKind::S, "S"},       {GateKind::Sdg, "Sdg"},
    {GateKind::X, "X"},       {GateKind::Y, "Y"},       {GateKind::Z, "Z"},
    {GateKind::CNOT, "CNOT"}, {GateKind::CZ, "CZ"},     {GateKind::Clifford2, "clifford2"},
    {GateKind::Dense, "dense"}};

int arity(GateKind k) {
  switch (k) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::Clifford2: return 2;
    case GateKind::Dense: return 0;
    default: return 1;
  }
}

std::mt19937_64 split_rng(std::uint64_t seed, std::uint64_t layer, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(layer), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXcd haar_from(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = cd(normal(rng), normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

}  // namespace

const char* gate_kind_name(GateKind k) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == k) return kn.name;
  }
  throw std::logic_error("unnamed gate kind");
}

GateKind gate_kind_from_name(const std::string& name) {
  for (const auto& kn : kKindNames) {
    if (name == kn.name) return kn.kind;
  }
  throw ConfigError("unknown gate kind '" + name + "'");
}

Gate Gate::named(GateKind kind, std::vector<int> support) {
  if (kind == GateKind::Dense || kind == GateKind::Clifford2) {
    throw std::invalid_argument("use Gate::dense or Gate::clifford2");
  }
  if (static_cast<int>(support.size()) != arity(kind)) {
    throw std::invalid_argument(std::string("gate ") + gate_kind_name(kind) + " has wrong arity");
  }
  if (support.size() == 2 && support[0] == support[1]) {
    throw std::invalid_argument("gate support qubits must be distinct");
  }
  Gate g;
  g.kind = kind;
  g.support = std::move(support);
  return g;
}

Gate Gate::clifford2(int index, int a, int b) {
  if (a == b) throw std::invalid_argument("gate support qubits must be distinct");
  if (index < 0 || index >= Clifford2Table::instance().size()) {
    throw std::out_of_range("two-qubit Clifford index out of range");
  }
  Gate g;
  g.kind = GateKind::Clifford2;
  g.support = {a, b};
  g.clifford_index = index;
  return g;
}

Gate Gate::dense(std::vector<int> support, Eigen::MatrixXcd u) {
  if (support.empty() || support.size() > 2) throw std::invalid_argument("dense gate acts on 1 or 2 qubits");
  if (support.size() == 2 && support[0] == support[1]) {
    throw std::invalid_argument("gate support qubits must be distinct");
  }
  const long dim = 1L << support.size();
  if (u.rows() != dim || u.cols() != dim) throw std::invalid_argument("dense gate matrix has wrong size");
  const double err = (u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim)).operatorNorm();
  if (err > 1e-12) throw std::invalid_argument("dense gate matrix is not unitary");
  Gate g;
  g.kind = GateKind::Dense;
  g.support = std::move(support);
  g.matrix = std::move(u);
  return g;
}

Eigen::MatrixXcd Gate::unitary() const {
  const double r = 1.0 / std::sqrt(2.0);
  const cd i(0, 1);
  Eigen::MatrixXcd m;
  switch (kind) {
    case GateKind::H: m.resize(2, 2); m << r, r, r, -r; return m;
    case GateKind::S: m.resize(2, 2); m << 1, 0, 0, i; return m;
    case GateKind::Sdg: m.resize(2, 2); m << 1, 0, 0, -i; return m;
    case GateKind::X: m.resize(2, 2); m << 0, 1, 1, 0; return m;
    case GateKind::Y: m.resize(2, 2); m << 0, -i, i, 0; return m;
    case GateKind::Z: m.resize(2, 2); m << 1, 0, 0, -1; return m;
    case GateKind::CNOT:
      m = Eigen::MatrixXcd::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      return m;
    case GateKind::CZ:
      m = Eigen::MatrixXcd::Identity(4, 4);
      m(3, 3) = -1;
      return m;
    case GateKind::Clifford2: return Clifford2Table::instance().unitary(clifford_index);
    case GateKind::Dense: return matrix;
  }
  throw std::logic_error("unreachable");
}

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::S: g.kind = GateKind::Sdg; break;
    case GateKind::Sdg: g.kind = GateKind::S; break;
    case GateKind::Clifford2: g.clifford_index = Clifford2Table::instance().inverse(clifford_index); break;
    case GateKind::Dense: g.matrix = matrix.adjoint(); break;
    default: break;
  }
  return g;
}

bool Gate::operator==(const Gate& o) const {
  if (kind != o.kind || support != o.support || clifford_index != o.clifford_index) return false;
  if (kind != GateKind::Dense) return true;
  return matrix.rows() == o.matrix.rows() && matrix.cols() == o.matrix.cols() && matrix == o.matrix;
}

Circuit::Circuit(std::vector<Layer> layers) {
  for (auto& l : layers) add_layer(std::move(l));
}

void Circuit::add_layer(Layer layer) {
  if (layer.empty()) return;
  std::set<int> used;
  for (const auto& g : layer) {
    for (int q : g.support) {
      if (q < 0) throw std::invalid_argument("negative qubit index in gate support");
      if (!used.insert(q).second) {
        throw std::invalid_argument("gates within a layer must act on disjoint qubits (qubit " +
                                    std::to_string(q) + ")");
      }
    }
  }
  layers_.push_back(std::move(layer));
}

std::size_t Circuit::gate_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.size();
  return n;
}

Region Circuit::support() const {
  std::set<int> s;
  for (const auto& l : layers_)
    for (const auto& g : l) s.insert(g.support.begin(), g.support.end());
  return Region("support", {s.begin(), s.end()});
}

bool Circuit::is_clifford() const {
  for (const auto& l : layers_)
    for (const auto& g : l)
      if (!g.is_clifford()) return false;
  return true;
}

std::vector<std::pair<int, int>> brickwork_pairs(const Lattice& lat, int layer) {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < lat.rows(); ++r) {
    for (int c = 0; c < lat.cols(); ++c) {
      int partner = -1;
      switch (((layer % 4) + 4) % 4) {
        case 0: partner = lat.v(r, c); break;
        case 1: partner = lat.v(r - 1, c + 1); break;
        case 2: partner = lat.v(r - 1, c); break;
        case 3: partner = lat.v(r, c + 1); break;
      }
      if (partner >= 0) out.emplace_back(lat.h(r, c), partner);
    }
  }
  return out;
}

Circuit random_clifford_on_pairs(const std::vector<std::vector<std::pair<int, int>>>& layers,
                                 std::uint64_t seed) {
  const int n = Clifford2Table::instance().size();
  Circuit c;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Layer layer;
    for (std::size_t k = 0; k < layers[l].size(); ++k) {
      auto rng = split_rng(seed, l, k);
      std::uniform_int_distribution<int> pick(0, n - 1);
      layer.push_back(Gate::clifford2(pick(rng), layers[l][k].first, layers[l][k].second));
    }
    c.add_layer(std::move(layer));
  }
  return c;
}

Circuit random_unitary_on_pairs(const std::vector<std::vector<std::pair<int, int>>>& layers,
                                std::uint64_t seed) {
  Circuit c;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Layer layer;
    for (std::size_t k = 0; k < layers[l].size(); ++k) {
      auto rng = split_rng(seed, l, k);
      layer.push_back(Gate::dense({layers[l][k].first, layers[l][k].second}, haar_from(4, rng)));
    }
    c.add_layer(std::move(layer));
  }
  return c;
}

Eigen::MatrixXcd haar_unitary(int dim, std::uint64_t seed) {
  auto rng = split_rng(seed, 0xffffffffu, 0);
  return haar_from(dim, rng);
}

Circuit random_shallow_clifford(const Lattice& lat, int depth, std::uint64_t seed) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  std::vector<std::vector<std::pair<int, int>>> layers;
  for (int l = 0; l < depth; ++l) layers.push_back(brickwork_pairs(lat, l));
  return random_clifford_on_pairs(layers, seed);
}

Circuit random_shallow_unitary(const Lattice& lat, int depth, std::uint64_t seed,
                               const std::optional<Region>& restrict_to) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  std::vector<std::vector<std::pair<int, int>>> layers;
  for (int l = 0; l < depth; ++l) layers.push_back(brickwork_pairs(lat, l));
  const Circuit full = random_unitary_on_pairs(layers, seed);
  return restrict_to ? gates_within(full, *restrict_to) : full;
}

Circuit gates_within(const Circuit& circuit, const Region& region) {
  Circuit out;
  for (const auto& layer : circuit.layers()) {
    Layer kept;
    for (const auto& g : layer) {
      if (std::all_of(g.support.begin(), g.support.end(), [&](int q) { return region.contains(q); })) {
        kept.push_back(g);
      }
    }
    out.add_layer(std::move(kept));
  }
  return out;
}

Circuit invert(const Circuit& circuit) {
  Circuit out;
  for (auto it = circuit.layers().rbegin(); it != circuit.layers().rend(); ++it) {
    Layer layer;
    for (const auto& g : *it) layer.push_back(g.inverse());
    out.add_layer(std::move(layer));
  }
  return out;
}

namespace {

std::pair<Circuit, Circuit> split_by_future_cone(const Circuit& circuit, const Region& region) {
  std::set<int> cone(region.qubits().begin(), region.qubits().end());
  Circuit kept, removed;
  for (const auto& layer : circuit.layers()) {
    Layer k, r;
    for (const auto& g : layer) {
      if (std::any_of(g.support.begin(), g.support.end(), [&](int q) { return cone.count(q); })) {
        cone.insert(g.support.begin(), g.support.end());
        r.push_back(g);
      } else {
        k.push_back(g);
      }
    }
    kept.add_layer(std::move(k));
    removed.add_layer(std::move(r));
  }
  return {kept, removed};
}

}  // namespace

Circuit restrict_outside_light_cone(const Circuit& circuit, const Region& protected_region) {
  return split_by_future_cone(circuit, protected_region).first;
}

Circuit removed_light_cone_gates(const Circuit& circuit, const Region& protected_region) {
  return split_by_future_cone(circuit, protected_region).second;
}

}  // namespace teebound
