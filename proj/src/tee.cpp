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


#include "teebound/tee.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "teebound/errors.hpp"
#include "teebound/pauli.hpp"

namespace teebound {

namespace {

const double kLog2 = std::log(2.0);

Region make_region(std::vector<int> qubits, std::string label = {}) {
  std::sort(qubits.begin(), qubits.end());
  qubits.erase(std::unique(qubits.begin(), qubits.end()), qubits.end());
  return Region(std::move(label), std::move(qubits));
}

Region region_filter(const Region& r, const std::function<bool(int)>& keep, std::string label = {}) {
  std::vector<int> out;
  for (int q : r.qubits())
    if (keep(q)) out.push_back(q);
  return Region(std::move(label), std::move(out));
}

Region all_qubits(const Lattice& lat) {
  std::vector<int> q(static_cast<std::size_t>(lat.num_qubits()));
  for (int i = 0; i < lat.num_qubits(); ++i) q[static_cast<std::size_t>(i)] = i;
  return Region("all", std::move(q));
}

/// Qubits of `r` farther than `depth` from everything outside `r`.
Region deep_interior(const Lattice& lat, const Region& r, int depth) {
  const auto dist = distance_field(lat, complement(lat, r));
  return region_filter(r, [&](int q) { return dist[static_cast<std::size_t>(q)] > depth; });
}

/// Qubits outside `r` farther than `depth` from it.
Region far_exterior(const Lattice& lat, const Region& r, int depth) {
  const auto dist = distance_field(lat, r);
  return region_filter(all_qubits(lat), [&](int q) { return dist[static_cast<std::size_t>(q)] > depth; });
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Eigen::Matrix2cd& pauli_matrix(char p) {
  static const Eigen::Matrix2cd x = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  static const Eigen::Matrix2cd z = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  static const Eigen::Matrix2cd y =
      (Eigen::Matrix2cd() << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0).finished();
  return p == 'X' ? x : p == 'Y' ? y : z;
}

/// Applies the part of a Pauli string that lies on the state's qubits.
DensityMatrix apply_pauli_dense(const DensityMatrix& rho, const PauliString& p) {
  DensityMatrix out = rho;
  for (int q : p.support()) {
    const std::string l = qubit_label(q);
    if (!out.has_label(l)) continue;
    out = apply_local_unitary(out, {l}, pauli_matrix(p.at(static_cast<std::size_t>(q))));
  }
  return out;
}

struct Entropies {
  double ab = 0, bc = 0, b = 0, abc = 0;
  /// Set on the stabilizer engine so the CMI is an exact multiple of log 2.
  std::optional<int> cmi_bits;
  double cmi() const { return cmi_bits ? *cmi_bits * kLog2 : ab + bc - b - abc; }
};

Entropies stab_entropies(const StabilizerState& s, const AnnulusPartition& p) {
  const Region B = p.B();
  const int ab = entropy_bits(s, region_union({p.A, B}));
  const int bc = entropy_bits(s, region_union({B, p.C}));
  const int b = entropy_bits(s, B);
  const int abc = entropy_bits(s, p.ABC());
  Entropies e;
  e.ab = ab * kLog2;
  e.bc = bc * kLog2;
  e.b = b * kLog2;
  e.abc = abc * kLog2;
  e.cmi_bits = ab + bc - b - abc;
  return e;
}

Entropies dense_entropies(const DensityMatrix& rho, const AnnulusPartition& p) {
  const Labels A = qubit_labels(p.A), B = qubit_labels(p.B()), C = qubit_labels(p.C);
  Labels ab = A, bc = B, abc = A;
  ab.insert(ab.end(), B.begin(), B.end());
  bc.insert(bc.end(), C.begin(), C.end());
  abc.insert(abc.end(), B.begin(), B.end());
  abc.insert(abc.end(), C.begin(), C.end());
  Entropies e;
  e.ab = entropy(rho, ab);
  e.bc = entropy(rho, bc);
  e.b = entropy(rho, B);
  e.abc = entropy(rho, abc);
  return e;
}

Labels labels_of(const Region& r) { return qubit_labels(r); }

}  // namespace

// Descriptors ------------------------------------------------------------------

const char* to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::toric_code: return "toric_code";
    case ReferenceKind::product: return "product";
    case ReferenceKind::external_file: return "external_file";
  }
  return "?";
}

ReferenceKind reference_kind_from_string(const std::string& s) {
  if (s == "toric_code") return ReferenceKind::toric_code;
  if (s == "product") return ReferenceKind::product;
  if (s == "external_file") return ReferenceKind::external_file;
  throw ConfigError("unknown reference kind '" + s + "'");
}

ReferenceDescriptor ReferenceDescriptor::toric_code(int rows, int cols, LogicalSector sector) {
  ReferenceDescriptor d;
  d.kind = ReferenceKind::toric_code;
  d.rows = rows;
  d.cols = cols;
  d.sector = sector;
  d.gamma0 = kLog2;
  d.total_quantum_dimension_log = kLog2;
  return d;
}

ReferenceDescriptor ReferenceDescriptor::product(int rows, int cols) {
  ReferenceDescriptor d;
  d.kind = ReferenceKind::product;
  d.rows = rows;
  d.cols = cols;
  return d;
}

ReferenceDescriptor ReferenceDescriptor::external(int rows, int cols, std::string path, double gamma0) {
  ReferenceDescriptor d;
  d.kind = ReferenceKind::external_file;
  d.rows = rows;
  d.cols = cols;
  d.path = std::move(path);
  d.gamma0 = gamma0;
  return d;
}

Lattice ReferenceDescriptor::lattice() const { return Lattice(rows, cols); }

StabilizerState ReferenceDescriptor::state() const {
  const Lattice lat = lattice();
  switch (kind) {
    case ReferenceKind::toric_code: return toric_code_ground_state(lat, sector);
    case ReferenceKind::product: return product_state(static_cast<std::size_t>(lat.num_qubits()));
    case ReferenceKind::external_file: {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open reference state '" + path + "'");
      StabilizerState s = StabilizerState::load(in);
      if (s.num_qubits() != static_cast<std::size_t>(lat.num_qubits())) {
        throw ConfigError("reference state '" + path + "' has " + std::to_string(s.num_qubits()) +
                          " qubits, lattice needs " + std::to_string(lat.num_qubits()));
      }
      return s;
    }
  }
  throw std::logic_error("unhandled reference kind");
}

const char* to_string(Engine e) { return e == Engine::stabilizer ? "stabilizer" : "dense"; }

Engine engine_from_string(const std::string& s) {
  if (s == "stabilizer") return Engine::stabilizer;
  if (s == "dense") return Engine::dense;
  throw ConfigError("unknown engine '" + s + "'");
}

const char* to_string(CircuitFamily f) {
  switch (f) {
    case CircuitFamily::identity: return "identity";
    case CircuitFamily::clifford: return "clifford";
    case CircuitFamily::haar: return "haar";
  }
  return "?";
}

CircuitFamily circuit_family_from_string(const std::string& s) {
  if (s == "identity") return CircuitFamily::identity;
  if (s == "clifford") return CircuitFamily::clifford;
  if (s == "haar") return CircuitFamily::haar;
  throw ConfigError("unknown circuit family '" + s + "'");
}

Circuit make_circuit(const Lattice& lat, const CircuitSpec& spec, const AnnulusPartition& p, std::uint64_t seed) {
  Circuit c;
  switch (spec.family) {
    case CircuitFamily::identity: return c;
    case CircuitFamily::clifford: c = random_shallow_clifford(lat, spec.depth, seed); break;
    case CircuitFamily::haar: c = random_shallow_unitary(lat, spec.depth, seed); break;
  }
  if (spec.within_annulus) c = gates_within(c, p.ABC());
  if (spec.collar) c = gates_within(c, neighborhood(lat, region_union({p.B(), p.C}), *spec.collar));
  return c;
}

// Partitions -------------------------------------------------------------------

void validate_partition(const Lattice& lat, const AnnulusPartition& p) {
  const std::pair<const Region*, const char*> parts[] = {{&p.A, "A"}, {&p.B1, "B1"}, {&p.B2, "B2"}, {&p.C, "C"}};
  for (const auto& [r, name] : parts) {
    if (r->empty()) throw GeometryError(std::string("empty sector ") + name);
    check_region(lat, *r);
  }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      if (parts[i].first->intersects(*parts[j].first)) {
        throw GeometryError(std::string("sectors ") + parts[i].second + " and " + parts[j].second + " overlap");
      }
  if (distance(lat, p.A, p.C) < 2) throw GeometryError("A adjacent to C");
  if (distance(lat, p.B1, p.B2) < 2) throw GeometryError("B1 adjacent to B2");
}

bool collar_precondition(const StabilizerState& sigma, const Lattice& lat, const AnnulusPartition& p,
                         const Circuit& u) {
  if (u.depth() > 1) return false;
  const Region abc = p.ABC();
  const Region* regions[] = {&p.A, &p.B1, &p.B2, &p.C};
  for (const auto& layer : u.layers()) {
    for (const auto& g : layer) {
      std::set<int> touched;
      bool outside = false;
      for (int q : g.support) {
        bool in = false;
        for (int k = 0; k < 4; ++k)
          if (regions[k]->contains(q)) {
            touched.insert(k == 2 ? 1 : k);
            in = true;
          }
        outside = outside || !in;
      }
      if (touched.size() > 1) return false;
      if (touched.empty() || !outside) continue;
      const Region ug = make_region(g.support);
      const Region y = region_union({abc, ug});
      const Region v = region_difference(region_intersection(neighborhood(lat, ug, 1), y), ug);
      const Region rest = region_difference(y, region_union({ug, v}));
      if (rest.empty() || cmi_bits(sigma, ug, v, rest) != 0) return false;
    }
  }
  return true;
}

bool bound_precondition(const StabilizerState& sigma, const Lattice& lat, const AnnulusPartition& p,
                        const Circuit& u) {
  if (u.gate_count() == 0) return true;
  if (p.inner_radius >= 1) return p.width() >= u.depth() + 1;
  return collar_precondition(sigma, lat, p, u);
}

Region CollarReduction::region() const {
  return region_union({partition.ABC(), make_region({outside})});
}

std::vector<CollarReduction> thin_ring_reductions(const ReferenceDescriptor& ref) {
  const Lattice lat = ref.lattice();
  if (lat.rows() < 6 || lat.cols() < 6) throw PreconditionError("thin ring reductions need at least a 6x6 torus");
  const StabilizerState sigma = ref.state();
  const int hole = lat.h(lat.rows() / 2, lat.cols() / 2 - 1);
  const Region hole_r = make_region({hole});
  const Region ring = region_difference(neighborhood(lat, hole_r, 1), hole_r);
  const auto centre = lat.doubled_position(hole);
  std::vector<std::pair<double, int>> by_angle;
  for (int q : ring.qubits()) {
    const auto d = lat.doubled_position(q);
    by_angle.emplace_back(std::atan2(-static_cast<double>(d[0] - centre[0]), static_cast<double>(d[1] - centre[1])), q);
  }
  std::sort(by_angle.begin(), by_angle.end());
  std::vector<int> order;
  for (const auto& [a, q] : by_angle) order.push_back(q);
  const int n = static_cast<int>(order.size());

  std::vector<CollarReduction> out;
  for (int start = 0; start < n; ++start) {
    std::vector<int> sectors[4];
    const int sizes[4] = {3, 1, 3, 1};
    for (int k = 0, i = start; k < 4; ++k)
      for (int j = 0; j < sizes[k]; ++j) sectors[k].push_back(order[static_cast<std::size_t>((i++) % n)]);
    for (int o = 0; o < lat.num_qubits(); ++o) {
      if (ring.contains(o) || o == hole) continue;
      std::vector<int> touching;
      for (int q : lat.neighbors(o))
        if (ring.contains(q)) touching.push_back(q);
      if (touching.empty()) continue;
      int joined = -1;
      for (int k : {0, 2}) {
        if (std::all_of(touching.begin(), touching.end(), [&](int q) {
              return std::find(sectors[k].begin(), sectors[k].end(), q) != sectors[k].end();
            })) {
          joined = k;
        }
      }
      if (joined < 0) continue;
      for (int b : lat.neighbors(o)) {
        if (ring.contains(b) || b == hole) continue;
        CollarReduction r;
        auto a = sectors[0], c = sectors[2];
        (joined == 0 ? a : c).push_back(o);
        r.partition.A = make_region(a, "A");
        r.partition.B1 = make_region(sectors[1], "B1");
        r.partition.C = make_region(c, "C");
        r.partition.B2 = make_region(sectors[3], "B2");
        r.partition.center = Site{lat.rows() / 2, lat.cols() / 2 - 1};
        r.thick = o;
        r.outside = b;
        try {
          validate_partition(lat, r.partition);
        } catch (const GeometryError&) {
          continue;
        }
        if (cmi_bits(sigma, r.partition.A, r.partition.B(), r.partition.C) != 2) continue;
        Circuit probe;
        probe.add_layer({Gate::named(GateKind::CNOT, {o, b})});
        if (!collar_precondition(sigma, lat, r.partition, probe)) continue;
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

Circuit collar_circuit(const Lattice& lat, const CollarReduction& r, CircuitFamily family, std::uint64_t seed) {
  if (family == CircuitFamily::identity) return Circuit{};
  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, int>> pairs{{r.thick, r.outside}};
  std::set<int> used{r.thick, r.outside};
  for (const Region* sector : {&r.partition.A, &r.partition.B1, &r.partition.B2, &r.partition.C}) {
    std::vector<int> qs = sector->qubits();
    std::shuffle(qs.begin(), qs.end(), rng);
    for (int a : qs) {
      if (used.count(a)) continue;
      for (int b : qs) {
        if (b == a || used.count(b) || !lat.adjacent(a, b)) continue;
        pairs.emplace_back(a, b);
        used.insert(a);
        used.insert(b);
        break;
      }
    }
  }
  return family == CircuitFamily::clifford ? random_clifford_on_pairs({pairs}, seed)
                                           : random_unitary_on_pairs({pairs}, seed);
}

// Bound experiments ------------------------------------------------------------

ExperimentRecord tee_bound_experiment(const ReferenceDescriptor& ref, const Circuit& circuit,
                                      const AnnulusPartition& p, std::uint64_t seed, Engine engine,
                                      int dense_limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const Lattice lat = ref.lattice();
  validate_partition(lat, p);
  StabilizerState sigma = ref.state();
  ExperimentRecord rec;
  rec.seed = seed;
  rec.depth = circuit.depth();
  rec.gate_count = circuit.gate_count();
  rec.support_size = circuit.support().size();
  rec.rows = lat.rows();
  rec.cols = lat.cols();
  rec.center = p.center;
  rec.inner_radius = p.inner_radius;
  rec.outer_radius = p.outer_radius;
  rec.width = p.width();
  rec.engine = engine;
  rec.A = p.A.qubits();
  rec.B = p.B().qubits();
  rec.C = p.C.qubits();
  rec.precondition_ok = bound_precondition(sigma, lat, p, circuit);
  Entropies e;
  if (engine == Engine::stabilizer) {
    if (!circuit.is_clifford()) throw std::invalid_argument("engine mismatch: dense gates on the stabilizer engine");
    sigma.apply(circuit);
    e = stab_entropies(sigma, p);
  } else {
    const Region y = light_cone(circuit, p.ABC());
    if (static_cast<int>(y.size()) > dense_limit) {
      throw ResourceError("light cone of ABC has " + std::to_string(y.size()) + " qubits, dense limit is " +
                          std::to_string(dense_limit));
    }
    const DensityMatrix rho = apply_unitary(reduced_density_matrix(sigma, y, dense_limit), gates_within(circuit, y));
    e = dense_entropies(rho, p);
  }
  rec.s_ab = e.ab;
  rec.s_bc = e.bc;
  rec.s_b = e.b;
  rec.s_abc = e.abc;
  rec.cmi = e.cmi();
  rec.bound = 2 * ref.gamma0;
  rec.margin = rec.cmi - rec.bound;
  rec.wall_time = seconds_since(t0);
  return rec;
}

ExperimentRecord tee_bound_experiment(const ReferenceDescriptor& ref, const CircuitSpec& spec,
                                      const AnnulusPartition& p, std::uint64_t seed, Engine engine,
                                      int dense_limit) {
  return tee_bound_experiment(ref, make_circuit(ref.lattice(), spec, p, seed), p, seed, engine, dense_limit);
}

// Audit ------------------------------------------------------------------------

std::vector<AnnulusPartition> sample_partitions(const Lattice& lat, int n_partitions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int max_out = std::min(lat.rows(), lat.cols()) / 2 - 1;
  if (max_out < 3) throw PreconditionError("lattice too small for annuli of width two or more");
  std::vector<AnnulusPartition> out;
  std::set<std::tuple<int, int, int, int, int>> seen;
  for (int attempt = 0; static_cast<int>(out.size()) < n_partitions; ++attempt) {
    if (attempt > 1000 * n_partitions) throw PreconditionError("could not sample enough distinct annuli");
    const int r_in = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_out - 2));
    const int r_out = r_in + 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_out - r_in - 1));
    const Site c{static_cast<int>(rng() % static_cast<std::uint64_t>(lat.rows())),
                 static_cast<int>(rng() % static_cast<std::uint64_t>(lat.cols()))};
    const int rot = 15 * static_cast<int>(rng() % 6);
    if (!seen.insert({c.r, c.c, r_in, r_out, rot}).second) continue;
    try {
      out.push_back(build_annulus_partition(lat, c, r_in, r_out, ArcSpec::rotated(rot)));
    } catch (const GeometryError&) {
    }
  }
  return out;
}

AuditReport reference_state_audit(const ReferenceDescriptor& ref, const std::vector<AnnulusPartition>& parts) {
  const Lattice lat = ref.lattice();
  const StabilizerState sigma = ref.state();
  AuditReport rep;
  rep.mi_zero = true;
  for (const auto& p : parts) {
    validate_partition(lat, p);
    AuditEntry e;
    e.center = p.center;
    e.inner_radius = p.inner_radius;
    e.outer_radius = p.outer_radius;
    e.rotation = p.rotation;
    e.cmi_bits = cmi_bits(sigma, p.A, p.B(), p.C);
    e.cmi = e.cmi_bits * kLog2;
    rep.partitions.push_back(e);
    const std::pair<std::string, std::pair<const Region*, const Region*>> pairs[] = {
        {"A:C", {&p.A, &p.C}}, {"B1:B2", {&p.B1, &p.B2}}};
    for (const auto& [name, rs] : pairs) {
      const int mi = mutual_information_bits(sigma, *rs.first, *rs.second);
      rep.mutual_informations.push_back({name, mi});
      rep.mi_zero = rep.mi_zero && mi == 0;
    }
  }
  if (parts.empty()) return rep;
  rep.cmi_constant = std::all_of(rep.partitions.begin(), rep.partitions.end(),
                                 [&](const AuditEntry& e) { return e.cmi_bits == rep.partitions[0].cmi_bits; });
  rep.gamma0_observed = rep.partitions[0].cmi / 2;
  rep.matches_descriptor = rep.cmi_constant && std::abs(rep.gamma0_observed - ref.gamma0) < 1e-12;
  return rep;
}

AuditReport reference_state_audit(const ReferenceDescriptor& ref, int n_partitions, std::uint64_t seed) {
  return reference_state_audit(ref, sample_partitions(ref.lattice(), n_partitions, seed));
}

// Anyon mixtures ---------------------------------------------------------------

double shannon_entropy(const std::array<double, 4>& p) {
  double h = 0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

namespace {

std::vector<Site> square_loop(Site c, int lo, int hi) {
  // Perimeter of the square [c+lo, c+hi]^2, closed.
  std::vector<Site> loop;
  for (int j = lo; j < hi; ++j) loop.push_back({c.r + lo, c.c + j});
  for (int i = lo; i < hi; ++i) loop.push_back({c.r + i, c.c + hi});
  for (int j = hi; j > lo; --j) loop.push_back({c.r + hi, c.c + j});
  for (int i = hi; i > lo; --i) loop.push_back({c.r + i, c.c + lo});
  loop.push_back(loop.front());
  return loop;
}

bool witness_fits(const Lattice& lat, Anyon w, const std::vector<Site>& loop, const Region& abc, const Circuit& u) {
  std::vector<Site> wrapped;
  for (Site s : loop) wrapped.push_back(lat.wrap(s));
  PauliString p;
  try {
    p = closed_string_operator(lat, w, wrapped, abc);
  } catch (const GeometryError&) {
    return false;
  }
  return future_light_cone(u, make_region(p.support())).subset_of(abc);
}

}  // namespace

MixtureGeometry route_mixture_geometry(const Lattice& lat, const AnnulusPartition& p, const Circuit& u) {
  MixtureGeometry g;
  const Region keep_out = u.support();
  const Site c = p.center;
  const Site far{c.r + lat.rows() / 2, c.c + lat.cols() / 2};
  try {
    g.paths.primal = route_primal(lat, c, far, keep_out);
    g.paths.dual = route_dual(lat, c, far, keep_out);
  } catch (const GeometryError& e) {
    throw GeometryError(std::string("string routing infeasible: ") + e.what());
  }
  const Region abc = p.ABC();
  // Dual loop of plaquettes at radius k, primal loop of vertices enclosing radius k - 1/2.
  for (int k = p.inner_radius + 1; k <= p.outer_radius && g.dual_loop.empty(); ++k) {
    auto loop = square_loop(c, -k, k);
    if (witness_fits(lat, Anyon::m, loop, abc, u)) g.dual_loop = std::move(loop);
  }
  for (int k = p.inner_radius + 1; k <= p.outer_radius && g.primal_loop.empty(); ++k) {
    auto loop = square_loop(c, -k + 1, k);
    if (witness_fits(lat, Anyon::e, loop, abc, u)) g.primal_loop = std::move(loop);
  }
  if (g.dual_loop.empty() || g.primal_loop.empty()) {
    throw GeometryError("no witness loop inside ABC avoids the light cone of the circuit");
  }
  for (auto* loop : {&g.dual_loop, &g.primal_loop})
    for (Site& s : *loop) s = lat.wrap(s);
  return g;
}

MixtureReport anyon_mixture_check(const ReferenceDescriptor& ref, const AnnulusPartition& p, const Circuit& u,
                                  const std::array<double, 4>& probs, Engine engine,
                                  const std::optional<MixtureGeometry>& geometry) {
  if (ref.kind != ReferenceKind::toric_code) throw std::invalid_argument("anyon mixtures need a toric-code reference");
  double total = 0;
  for (double x : probs) {
    if (x < 0) throw std::invalid_argument("negative anyon probability");
    total += x;
  }
  if (std::abs(total - 1) > 1e-12) throw std::invalid_argument("anyon probabilities must sum to one");
  const Lattice lat = ref.lattice();
  validate_partition(lat, p);
  const MixtureGeometry g = geometry ? *geometry : route_mixture_geometry(lat, p, u);
  const Region keep_out = u.support();
  for (int q : string_operator(lat, Anyon::epsilon, g.paths).support()) {
    if (keep_out.contains(q)) throw GeometryError("string path crosses the circuit support");
  }
  const StabilizerState sigma = ref.state();
  const Region abc = p.ABC();
  const Anyon anyons[4] = {Anyon::vacuum, Anyon::e, Anyon::m, Anyon::epsilon};
  std::array<PauliString, 4> strings;
  for (int a = 0; a < 4; ++a) {
    strings[a] = anyons[a] == Anyon::vacuum ? PauliString(static_cast<std::size_t>(lat.num_qubits()))
                                            : string_operator(lat, anyons[a], g.paths);
  }

  MixtureReport rep;
  rep.probs = probs;
  rep.engine = engine;
  rep.shannon = shannon_entropy(probs);
  if (engine == Engine::stabilizer) {
    if (!u.is_clifford()) throw std::invalid_argument("engine mismatch: dense gates on the stabilizer engine");
    const PauliString e_det = conjugate(closed_string_operator(lat, Anyon::m, g.dual_loop, all_qubits(lat)), u);
    const PauliString m_det = conjugate(closed_string_operator(lat, Anyon::e, g.primal_loop, all_qubits(lat)), u);
    for (const PauliString* w : {&e_det, &m_det})
      for (int q : w->support())
        if (!abc.contains(q)) throw GeometryError("witness leaves ABC after conjugation");
    StabilizerState sigma_t = apply_clifford(sigma, u);
    const int s_sigma = entropy_bits(sigma_t, abc);
    rep.cmi_sigma_tilde = cmi(sigma_t, p.A, p.B(), p.C);
    std::set<std::pair<int, int>> patterns;
    bool nonzero = true;
    double weighted = 0;
    for (int a = 0; a < 4; ++a) {
      StabilizerState r = sigma;
      r.apply_pauli(strings[a]);
      r.apply(u);
      rep.witness[a] = {r.expectation(e_det), r.expectation(m_det)};
      nonzero = nonzero && rep.witness[a][0] != 0 && rep.witness[a][1] != 0;
      patterns.insert({rep.witness[a][0], rep.witness[a][1]});
      const double dev = std::abs(entropy_bits(r, abc) - s_sigma) * kLog2;
      rep.max_entropy_deviation = std::max(rep.max_entropy_deviation, dev);
      weighted += probs[a] * (entropy_bits(r, abc) - s_sigma) * kLog2;
    }
    rep.orthogonal = nonzero && patterns.size() == 4;
    rep.max_overlap = rep.orthogonal ? 0.0 : 1.0;
    // Orthogonal supports: S(sum p_a rho_a) = H(p) + sum p_a S(rho_a).
    rep.entropy_difference = rep.orthogonal ? rep.shannon + weighted : std::nan("");
    rep.eq10 = rep.orthogonal && std::abs(rep.entropy_difference - rep.shannon) <= 1e-12;
  } else {
    const Region y = region_union({light_cone(u, abc), abc});
    const DensityMatrix sigma_y = reduced_density_matrix(sigma, y);
    const Circuit uy = gates_within(u, y);
    const Labels abc_l = labels_of(abc);
    const DensityMatrix sigma_t = marginal(apply_unitary(sigma_y, uy), abc_l);
    rep.cmi_sigma_tilde = cmi(sigma_t, labels_of(p.A), labels_of(p.B()), labels_of(p.C));
    const double s_sigma = entropy(sigma_t);
    std::vector<DensityMatrix> comps;
    for (int a = 0; a < 4; ++a) {
      comps.push_back(marginal(apply_unitary(apply_pauli_dense(sigma_y, strings[a]), uy), abc_l));
      rep.max_entropy_deviation = std::max(rep.max_entropy_deviation, std::abs(entropy(comps.back()) - s_sigma));
    }
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        const double ov = std::abs((comps[a].matrix() * comps[b].permuted(comps[a].labels()).matrix()).trace());
        rep.max_overlap = std::max(rep.max_overlap, ov);
      }
    rep.orthogonal = rep.max_overlap <= 1e-9;
    std::vector<DensityMatrix> used;
    std::vector<double> w;
    for (int a = 0; a < 4; ++a)
      if (probs[a] > 0) {
        used.push_back(comps[a]);
        w.push_back(probs[a]);
      }
    rep.entropy_difference = entropy(mix(used, w)) - s_sigma;
    rep.eq10 = std::abs(rep.entropy_difference - rep.shannon) <= 1e-9;
  }
  rep.eq11 = rep.cmi_sigma_tilde >= rep.shannon - 1e-8;
  return rep;
}

// Deformation chain ------------------------------------------------------------

DeformationReport deformation_chain_check(const ReferenceDescriptor& ref, const Circuit& u,
                                          const AnnulusPartition& p) {
  if (!u.is_clifford()) throw std::invalid_argument("engine mismatch: deformation chain runs on the stabilizer engine");
  const Lattice lat = ref.lattice();
  validate_partition(lat, p);
  const StabilizerState sigma = ref.state();
  const int d = u.depth();
  const Region abc = p.ABC();
  const Region B = p.B();
  DeformationReport rep;
  rep.bound = 2 * ref.gamma0;

  Circuit u1 = u, u2 = u;
  Region a_prime = p.A;
  if (region_intersection(u.support(), p.A).empty()) {
    rep.degenerate = true;
  } else {
    rep.hole = deep_interior(lat, p.A, d).with_label("hole");
    if (rep.hole.empty()) {
      throw PreconditionError("hole: A has no site farther than depth " + std::to_string(d) + " from its boundary");
    }
    const Region s1 = region_union({rep.hole, far_exterior(lat, abc, d)});
    u1 = restrict_outside_light_cone(u, s1);
    const Circuit v1 = removed_light_cone_gates(u, s1);
    const Region outside = complement(lat, abc);
    for (const auto& layer : v1.layers())
      for (const auto& g : layer) {
        const Region gs = make_region(g.support);
        if (!gs.subset_of(p.A) && !gs.subset_of(outside)) {
          throw PreconditionError("hole: removed gate on " + std::to_string(g.support.front()) + "," +
                                  std::to_string(g.support.back()) + " straddles A and its surroundings");
        }
      }
    rep.removed_first = v1.gate_count();

    const double mid = 0.5 * (p.inner_radius + p.outer_radius);
    a_prime = region_filter(p.A, [&](int q) { return polar_position(lat, p.center, q).radius > mid; }, "A'");
    if (a_prime.empty() || a_prime.size() == p.A.size()) {
      throw PreconditionError("A': radial split at " + std::to_string(mid) + " leaves no proper outer part of A");
    }
    if (distance(lat, a_prime, p.B1) != 1 || distance(lat, a_prime, p.B2) != 1) {
      throw PreconditionError("A': outer part of A no longer touches both B1 and B2");
    }
    const Region apbc = region_union({a_prime, B, p.C});
    const Region s2 = region_union({deep_interior(lat, a_prime, d), far_exterior(lat, apbc, d)});
    u2 = restrict_outside_light_cone(u1, s2);
    const Circuit v2 = removed_light_cone_gates(u1, s2);
    const Region outside2 = complement(lat, apbc);
    for (const auto& layer : v2.layers())
      for (const auto& g : layer) {
        const Region gs = make_region(g.support);
        if (!gs.subset_of(a_prime) && !gs.subset_of(outside2)) {
          throw PreconditionError("U'' collar: removed gate on " + std::to_string(g.support.front()) + "," +
                                  std::to_string(g.support.back()) + " straddles A' and its surroundings");
        }
      }
    rep.removed_second = v2.gate_count();
  }
  rep.a_prime = a_prime;

  const StabilizerState s_u = apply_clifford(sigma, u);
  const StabilizerState s_u1 = apply_clifford(sigma, u1);
  const StabilizerState s_u2 = apply_clifford(sigma, u2);
  const int i_u = cmi_bits(s_u, p.A, B, p.C);
  const int i_u1 = cmi_bits(s_u1, p.A, B, p.C);
  const int i_u1s = cmi_bits(s_u1, a_prime, B, p.C);
  const int i_u2 = cmi_bits(s_u2, a_prime, B, p.C);
  rep.cmi_u = i_u * kLog2;
  rep.cmi_u1 = i_u1 * kLog2;
  rep.cmi_u1_shrunk = i_u1s * kLog2;
  rep.cmi_u2 = i_u2 * kLog2;
  rep.eq12 = i_u == i_u1;
  rep.eq13 = i_u1 >= i_u1s;
  rep.eq14 = i_u1s == i_u2;
  return rep;
}

// Max-entropy state ------------------------------------------------------------

MaxEntropyAnnulus max_entropy_state_for_annulus(const DensityMatrix& sigma, const std::vector<Labels>& blocks,
                                                double tol) {
  const OrderedChain chain(sigma, blocks);
  CanonicalChain cc = canonical_markov_chain(chain, tol);
  MaxEntropyAnnulus out{cc.tau, cc.premise_locally_markov, verify_indistinguishability(cc.tau, chain, tol), 0};
  out.entropy_gap = entropy(out.lambda) - entropy(sigma);
  return out;
}

// Gate-adjacent recovery counterexample ----------------------------------------

ThinAnnulusGeometry thin_annulus_geometry(std::uint64_t seed, bool p_next_to_gate) {
  ThinAnnulusGeometry g;
  if (!p_next_to_gate) {
    g.A = make_region({26, 57, 21}, "A");
    g.B = make_region({51, 56}, "B");
    g.C = make_region({14, 50, 19, 8}, "C");
    g.P = make_region({57}, "P");
  } else {
    g.A = make_region({14, 50, 19, 8}, "A");
    g.B = make_region({56, 51}, "B");
    g.C = make_region({26, 57, 21}, "C");
    g.P = make_region({14}, "P");
  }
  g.u = random_clifford_on_pairs({{{8, 2}}}, seed);
  return g;
}

namespace {

struct ThinAnnulusWork {
  Region abc, Q, Y, u_bar, v;
  std::vector<Region> chain;
  DensityMatrix sigma_y, lambda, sigma_bar, lambda_bar;
  Circuit u_bar_circuit;
  QuantumChannel petz, R, T;
};

ThinAnnulusWork appendix_e_work(const ReferenceDescriptor& ref, const ThinAnnulusGeometry& g, double tol,
                              int dense_limit) {
  const Lattice lat = ref.lattice();
  ThinAnnulusWork w;
  w.abc = region_union({g.A, g.B, g.C}, "ABC");
  if (g.P.empty() || !g.P.subset_of(g.A)) throw GeometryError("P must be a non-empty part of A");
  w.Q = region_difference(w.abc, g.P, "Q");
  const int d = g.u.depth();
  const Region deep = deep_interior(lat, w.abc, d);
  Circuit ub;
  for (const auto& layer : g.u.layers()) {
    Layer kept;
    for (const auto& gate : layer)
      if (!make_region(gate.support).subset_of(deep)) kept.push_back(gate);
    ub.add_layer(std::move(kept));
  }
  w.u_bar_circuit = ub;
  w.u_bar = ub.support().with_label("u_bar");
  if (w.u_bar.empty()) throw PreconditionError("the collar circuit has no gates near the edge of ABC");
  if (distance(lat, g.P, w.u_bar) < 2) {
    throw PreconditionError("P must be at least two sites from the support of the collar circuit");
  }
  w.Y = region_union({w.abc, g.u.support()}, "Y");
  if (static_cast<int>(w.Y.size()) > dense_limit) {
    throw ResourceError("Y has " + std::to_string(w.Y.size()) + " qubits, dense limit is " + std::to_string(dense_limit));
  }
  const Region x1 = light_cone(g.u, g.P);
  const Region b_t = light_cone(g.u, g.B);
  const Region a_t = region_difference(light_cone(g.u, region_union({g.A, g.B})), b_t);
  const Region c_t = region_difference(light_cone(g.u, region_union({g.B, g.C})), b_t);
  if (!x1.subset_of(a_t)) throw PreconditionError("past light cone of P reaches the cone of B");
  w.chain = {x1.with_label("X1"), region_difference(a_t, x1, "X2"), b_t.with_label("X3"), c_t.with_label("X4")};
  if (!(region_union(w.chain) == w.Y)) throw GeometryError("light cones of AB and BC do not cover ABC and supp(U)");
  for (const auto& x : w.chain)
    if (x.empty()) throw GeometryError("chain block " + x.label() + " is empty");

  const StabilizerState sigma = ref.state();
  w.sigma_y = reduced_density_matrix(sigma, w.Y, dense_limit);
  std::vector<Labels> blocks;
  for (const auto& x : w.chain) blocks.push_back(labels_of(x));
  const CanonicalChain cc = canonical_markov_chain(OrderedChain(w.sigma_y, blocks), tol);
  w.lambda = cc.tau.permuted(w.sigma_y.labels());
  w.sigma_bar = apply_unitary(w.sigma_y, ub);
  w.lambda_bar = apply_unitary(w.lambda, ub);

  w.v = region_difference(region_intersection(neighborhood(lat, w.u_bar, 1), w.Y), w.u_bar, "v");
  const Labels v = labels_of(w.v);
  const Labels vu = labels_of(region_union({w.v, w.u_bar}));
  w.petz = petz_map(w.sigma_y, v, vu);
  const Region q_in_u = region_intersection(w.Q, w.u_bar);
  w.R = compose(partial_trace_channel(qubit_factors(region_union({w.v, q_in_u})), v), w.petz);
  const std::vector<int> ubq = w.u_bar.qubits();
  w.T = compose(unitary_channel(qubit_factors(w.u_bar), circuit_unitary(ub, ubq)),
                partial_trace_channel(qubit_factors(w.u_bar), labels_of(q_in_u)));
  w.R.name = "R";
  w.T.name = "T";
  return w;
}

}  // namespace

bool ThinAnnulusReport::pass() const {
  const auto ok = [&](double x) { return std::abs(x) <= tolerance; };
  return premise_locally_markov && ok(fact_first - 2 * gamma0) && ok(fact_second_p) && ok(fact_second_q) &&
         ok(fact_third_lambda) && ok(fact_third_sigma) && ok(cmi_fact_key) && ok(cmi_reference) &&
         ok(eq6_residual) && std::abs(stab_entropy_y - dense_entropy_y) <= 1e-10 && lemma.premises_hold &&
         lemma.conclusion_holds;
}

ThinAnnulusReport appendix_e_fact_checks(const ReferenceDescriptor& ref, const ThinAnnulusGeometry& g, double tol,
                                       int dense_limit) {
  const ThinAnnulusWork w = appendix_e_work(ref, g, tol, dense_limit);
  ThinAnnulusReport rep;
  rep.tolerance = tol;
  rep.gamma0 = ref.gamma0;
  rep.Y = w.Y;
  rep.u_bar = w.u_bar;
  rep.v = w.v;
  rep.chain = w.chain;
  std::vector<Labels> blocks;
  for (const auto& x : w.chain) blocks.push_back(labels_of(x));
  rep.premise_locally_markov = is_locally_markov(OrderedChain(w.sigma_y, blocks), tol).is_locally_markov;

  rep.fact_first = entropy(w.lambda) - entropy(w.sigma_y);
  const Labels P = labels_of(g.P), Q = labels_of(w.Q);
  rep.fact_second_p = trace_distance(marginal(w.lambda_bar, P), marginal(w.sigma_bar, P));
  rep.fact_second_q = trace_distance(marginal(w.lambda_bar, Q), marginal(w.sigma_bar, Q));

  const Labels rest = labels_of(region_difference(w.Y, w.u_bar));
  rep.fact_third_lambda = trace_distance(apply_channel(w.petz, marginal(w.lambda, rest)), w.lambda);
  rep.fact_third_sigma = trace_distance(apply_channel(w.petz, marginal(w.sigma_y, rest)), w.sigma_y);

  const Region vu = region_union({w.v, w.u_bar});
  const Region q_rest = region_difference(w.Q, vu);
  const Region pq_rest = region_difference(w.abc, vu);
  if (q_rest.empty()) throw GeometryError("Q is swallowed by the collar and its neighbourhood");
  rep.cmi_fact_key = cmi(w.sigma_y, labels_of(w.u_bar), labels_of(w.v), labels_of(q_rest));
  rep.cmi_reference = cmi(w.sigma_y, labels_of(w.u_bar), labels_of(w.v), labels_of(pq_rest));

  const DensityMatrix sigma_t = marginal(apply_unitary(w.sigma_y, g.u), labels_of(w.abc));
  const DensityMatrix lambda_t = marginal(apply_unitary(w.lambda, g.u), labels_of(w.abc));
  const Labels A = labels_of(g.A), B = labels_of(g.B), C = labels_of(g.C);
  rep.cmi_sigma_tilde = cmi(sigma_t, A, B, C);
  rep.cmi_lambda_tilde = cmi(lambda_t, A, B, C);
  rep.entropy_gap_tilde = entropy(lambda_t) - entropy(sigma_t);
  rep.eq6_residual = rep.cmi_sigma_tilde - (rep.cmi_lambda_tilde + rep.entropy_gap_tilde);

  const StabilizerState sigma = ref.state();
  rep.stab_entropy_y = entropy(sigma, w.Y);
  rep.dense_entropy_y = entropy(w.sigma_y);
  rep.stab_cmi_reference = cmi(sigma, w.u_bar, w.v, pq_rest);

  rep.lemma = entropy_difference_lemma_check(marginal(w.lambda_bar, labels_of(w.abc)),
                                             marginal(w.sigma_bar, labels_of(w.abc)), P, Q, w.R, w.T);
  return rep;
}

// Gamma min --------------------------------------------------------------------

GammaMinReport gamma_min_estimate(const ReferenceDescriptor& ref, const Circuit& v,
                                  const std::vector<Circuit>& candidates,
                                  const std::vector<AnnulusPartition>& ladder) {
  if (candidates.empty()) throw std::invalid_argument("gamma_min needs at least one candidate circuit");
  const Lattice lat = ref.lattice();
  const StabilizerState prepared = apply_clifford(ref.state(), v);
  GammaMinReport rep;
  const Circuit inv = invert(v);
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i] == inv) rep.inverse_index = i;
  std::vector<StabilizerState> states;
  for (const auto& c : candidates) states.push_back(apply_clifford(prepared, c));
  rep.none_below_gamma0 = true;
  rep.inverse_achieves_gamma0 = rep.inverse_index.has_value();
  for (const auto& p : ladder) {
    validate_partition(lat, p);
    GammaMinRow row;
    row.outer_radius = p.outer_radius;
    for (const auto& s : states) row.gammas.push_back(cmi_bits(s, p.A, p.B(), p.C) * kLog2 / 2);
    const auto it = std::min_element(row.gammas.begin(), row.gammas.end());
    row.minimum = *it;
    row.argmin = static_cast<std::size_t>(it - row.gammas.begin());
    for (double x : row.gammas) rep.none_below_gamma0 = rep.none_below_gamma0 && x >= ref.gamma0 - 1e-8;
    if (rep.inverse_index) {
      const double gi = row.gammas[*rep.inverse_index];
      rep.inverse_achieves_gamma0 =
          rep.inverse_achieves_gamma0 && std::abs(gi - ref.gamma0) < 1e-12 && std::abs(gi - row.minimum) < 1e-12;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// Recovery-lemma instances -----------------------------------------------------

std::vector<RecoveryInstance> lemma1_instances(int count, std::uint64_t seed, bool with_thin_annulus) {
  std::vector<RecoveryInstance> out;
  const int constructed = with_thin_annulus ? count - 1 : count;
  const auto labels = [](std::initializer_list<int> qs) {
    Labels l;
    for (int q : qs) l.push_back(qubit_label(q));
    return l;
  };
  for (int i = 0; i < constructed; ++i) {
    const std::uint64_t s = seed * 1000 + static_cast<std::uint64_t>(i);
    RecoveryInstance inst;
    switch (i % 3) {
      case 0: {
        inst.name = "identity";
        inst.P = labels({0});
        inst.Q = labels({1, 2});
        inst.rho = random_density_matrix(qubit_factors(labels({0, 1, 2})), 8, s);
        inst.rho_prime = tensor(marginal(inst.rho, inst.P), marginal(inst.rho, inst.Q));
        inst.R = identity_channel(qubit_factors(inst.Q));
        inst.T = inst.R;
        break;
      }
      case 1: {
        inst.name = "isometry";
        inst.P = labels({0});
        inst.Q = labels({1, 2});
        inst.rho = random_density_matrix(qubit_factors(labels({0, 1, 2})), 3, s);
        inst.rho_prime = tensor(marginal(inst.rho, inst.P), marginal(inst.rho, inst.Q));
        const Eigen::MatrixXcd v = haar_unitary(8, s).leftCols(4);
        const auto in = qubit_factors(inst.Q);
        const auto outf = qubit_factors(labels({1, 2, 3}));
        inst.R = isometry_channel(in, outf, v);
        inst.T = isometry_reversal(in, outf, v);
        break;
      }
      default: {
        inst.name = "markov";
        inst.P = labels({0});
        inst.Q = labels({1, 2, 3});
        const DensityMatrix left = random_density_matrix(qubit_factors(labels({0, 1})), 4, s);
        const DensityMatrix right = random_density_matrix(qubit_factors(labels({2, 3})), 4, s + 7);
        inst.rho = tensor(left, right);
        inst.rho_prime = tensor(marginal(inst.rho, inst.P), marginal(inst.rho, inst.Q));
        inst.R = partial_trace_channel(qubit_factors(inst.Q), labels({1, 2}));
        inst.T = petz_map(inst.rho, labels({1, 2}), labels({1, 2, 3}));
        break;
      }
    }
    out.push_back(std::move(inst));
  }
  if (with_thin_annulus) {
    const ReferenceDescriptor ref = ReferenceDescriptor::toric_code(6, 6);
    const ThinAnnulusGeometry g = thin_annulus_geometry(seed);
    const ThinAnnulusWork w = appendix_e_work(ref, g, 1e-7, kDefaultDenseLimit);
    RecoveryInstance inst;
    inst.name = "appendix_e";
    inst.P = labels_of(g.P);
    inst.Q = labels_of(w.Q);
    inst.rho = marginal(w.lambda_bar, labels_of(w.abc));
    inst.rho_prime = marginal(w.sigma_bar, labels_of(w.abc));
    inst.R = w.R;
    inst.T = w.T;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace teebound
