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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teebound/circuits.hpp"
#include "teebound/dense.hpp"
#include "teebound/lattice.hpp"
#include "teebound/markov.hpp"
#include "teebound/stab.hpp"

namespace teebound {

enum class ReferenceKind { toric_code, product, external_file };
const char* to_string(ReferenceKind k);
ReferenceKind reference_kind_from_string(const std::string& s);

struct ReferenceDescriptor {
  ReferenceKind kind = ReferenceKind::toric_code;
  int rows = 12;
  int cols = 12;
  LogicalSector sector;
  /// Stabilizer dump for external_file references.
  std::string path;
  /// Expected half CMI of an annulus, in nats.
  double gamma0 = 0;
  /// log D of the anyon theory; carried as metadata only.
  double total_quantum_dimension_log = 0;

  static ReferenceDescriptor toric_code(int rows, int cols, LogicalSector sector = {});
  static ReferenceDescriptor product(int rows, int cols);
  static ReferenceDescriptor external(int rows, int cols, std::string path, double gamma0);

  Lattice lattice() const;
  StabilizerState state() const;
};

enum class Engine { stabilizer, dense };
const char* to_string(Engine e);
Engine engine_from_string(const std::string& s);

enum class CircuitFamily { identity, clifford, haar };
const char* to_string(CircuitFamily f);
CircuitFamily circuit_family_from_string(const std::string& s);

struct CircuitSpec {
  CircuitFamily family = CircuitFamily::clifford;
  int depth = 1;
  /// Keep only gates inside the annulus (dense reductions).
  bool within_annulus = false;
  /// Keep only gates inside this many sites of B and C.
  std::optional<int> collar;
};

Circuit make_circuit(const Lattice& lat, const CircuitSpec& spec, const AnnulusPartition& p,
                     std::uint64_t seed);

/// Regions disjoint and non-empty, A and C at distance two or more, B1 and B2 apart.
void validate_partition(const Lattice& lat, const AnnulusPartition& p);

struct ExperimentRecord {
  std::uint64_t seed = 0;
  int depth = 0;
  std::size_t gate_count = 0;
  std::size_t support_size = 0;
  int rows = 0;
  int cols = 0;
  Site center;
  int inner_radius = 0;
  int outer_radius = 0;
  int width = 0;
  Engine engine = Engine::stabilizer;
  double s_ab = 0, s_bc = 0, s_b = 0, s_abc = 0;
  double cmi = 0;
  double bound = 0;
  double margin = 0;
  bool precondition_ok = true;
  double wall_time = 0;
  std::vector<int> A, B, C;
};

/// Depth-one circuit whose gates either stay inside one of A, B, C or cross the
/// edge of ABC at a site where the reference state recovers the gate support
/// from its surroundings: I(u : rest | v) = 0 with v the neighbours of u.
bool collar_precondition(const StabilizerState& sigma, const Lattice& lat, const AnnulusPartition& p,
                         const Circuit& u);

/// Lattice annuli (inner radius >= 1) need width >= depth + 1; explicit
/// partitions fall back to the collar condition.
bool bound_precondition(const StabilizerState& sigma, const Lattice& lat, const AnnulusPartition& p,
                        const Circuit& u);

/// The eight-edge ring around h(rows/2, cols/2 - 1) split 3/1/3/1, with one
/// outside site `thick` joined to A or C and a partner `outside` for the gate.
struct CollarReduction {
  AnnulusPartition partition;
  int thick = -1;
  int outside = -1;
  Region region() const;
};

std::vector<CollarReduction> thin_ring_reductions(const ReferenceDescriptor& ref);

/// One layer: the collar gate plus random gates on disjoint pairs inside single regions.
Circuit collar_circuit(const Lattice& lat, const CollarReduction& r, CircuitFamily family, std::uint64_t seed);

ExperimentRecord tee_bound_experiment(const ReferenceDescriptor& ref, const Circuit& circuit,
                                      const AnnulusPartition& p, std::uint64_t seed, Engine engine,
                                      int dense_limit = kDefaultDenseLimit);
ExperimentRecord tee_bound_experiment(const ReferenceDescriptor& ref, const CircuitSpec& spec,
                                      const AnnulusPartition& p, std::uint64_t seed, Engine engine,
                                      int dense_limit = kDefaultDenseLimit);

struct AuditEntry {
  Site center;
  int inner_radius = 0;
  int outer_radius = 0;
  double rotation = 0;
  int cmi_bits = 0;
  double cmi = 0;
};

struct MutualInformationSample {
  std::string pair;
  int bits = 0;
};

struct AuditReport {
  std::vector<AuditEntry> partitions;
  std::vector<MutualInformationSample> mutual_informations;
  double gamma0_observed = 0;
  bool cmi_constant = false;
  bool mi_zero = false;
  bool matches_descriptor = false;
  bool pass() const { return cmi_constant && mi_zero && matches_descriptor; }
};

/// Samples n_partitions annuli varying center, radii and arc rotation.
std::vector<AnnulusPartition> sample_partitions(const Lattice& lat, int n_partitions, std::uint64_t seed);

AuditReport reference_state_audit(const ReferenceDescriptor& ref, int n_partitions, std::uint64_t seed);
AuditReport reference_state_audit(const ReferenceDescriptor& ref, const std::vector<AnnulusPartition>& parts);

/// Shannon entropy in nats.
double shannon_entropy(const std::array<double, 4>& p);

struct MixtureGeometry {
  StringPaths paths;
  /// Closed primal loop (Z string, detects m flux) and dual loop (X string, detects e charge).
  std::vector<Site> primal_loop;
  std::vector<Site> dual_loop;
};

/// Strings from the hole to far outside avoiding `keep_out`, and witness loops in the annulus.
MixtureGeometry route_mixture_geometry(const Lattice& lat, const AnnulusPartition& p, const Circuit& u);

struct MixtureReport {
  std::array<double, 4> probs{};
  /// Witness eigenvalues (e detector, m detector) per anyon on the stabilizer engine.
  std::array<std::array<int, 2>, 4> witness{};
  double max_overlap = 0;
  bool orthogonal = false;
  double max_entropy_deviation = 0;
  double entropy_difference = 0;
  double shannon = 0;
  double cmi_sigma_tilde = 0;
  bool eq10 = false;
  bool eq11 = false;
  Engine engine = Engine::stabilizer;
  bool pass() const { return orthogonal && max_entropy_deviation <= 1e-9 && eq10 && eq11; }
};

MixtureReport anyon_mixture_check(const ReferenceDescriptor& ref, const AnnulusPartition& p, const Circuit& u,
                                  const std::array<double, 4>& probs, Engine engine,
                                  const std::optional<MixtureGeometry>& geometry = std::nullopt);

struct DeformationReport {
  Region hole;
  Region a_prime;
  std::size_t removed_first = 0;
  std::size_t removed_second = 0;
  bool degenerate = false;
  double cmi_u = 0, cmi_u1 = 0, cmi_u1_shrunk = 0, cmi_u2 = 0;
  double bound = 0;
  bool eq12 = false, eq13 = false, eq14 = false;
  double margin() const { return cmi_u2 - bound; }
  bool pass() const { return eq12 && eq13 && eq14 && margin() >= -1e-12; }
};

DeformationReport deformation_chain_check(const ReferenceDescriptor& ref, const Circuit& u,
                                          const AnnulusPartition& p);

struct MaxEntropyAnnulus {
  DensityMatrix lambda;
  bool premise_locally_markov = false;
  SubsystemCheck indistinguishability;
  double entropy_gap = 0;
};

MaxEntropyAnnulus max_entropy_state_for_annulus(const DensityMatrix& sigma, const std::vector<Labels>& blocks,
                                                double tol = 1e-7);

/// P lies in A; the circuit may reach outside ABC.
struct ThinAnnulusGeometry {
  Region P, A, B, C;
  Circuit u;
};

/// A ten-qubit toric-code instance on a 6x6 torus: the eight-edge ring around h(3,2),
/// thickened by h(1,2), with a two-qubit gate from h(1,2) to h(0,2).
ThinAnnulusGeometry thin_annulus_geometry(std::uint64_t seed, bool p_next_to_gate = false);

struct ThinAnnulusReport {
  Region Y, u_bar, v;
  std::vector<Region> chain;
  double fact_first = 0;
  double fact_second_p = 0, fact_second_q = 0;
  double fact_third_lambda = 0, fact_third_sigma = 0;
  double cmi_fact_key = 0, cmi_reference = 0;
  double cmi_sigma_tilde = 0, cmi_lambda_tilde = 0, entropy_gap_tilde = 0;
  double eq6_residual = 0;
  double stab_entropy_y = 0, dense_entropy_y = 0;
  double stab_cmi_reference = 0;
  LemmaReport lemma;
  double tolerance = 1e-7;
  double gamma0 = 0;
  bool premise_locally_markov = false;
  bool pass() const;
};

ThinAnnulusReport appendix_e_fact_checks(const ReferenceDescriptor& ref, const ThinAnnulusGeometry& g,
                                       double tol = 1e-7, int dense_limit = kDefaultDenseLimit);

struct GammaMinRow {
  int outer_radius = 0;
  std::vector<double> gammas;
  double minimum = 0;
  std::size_t argmin = 0;
};

struct GammaMinReport {
  std::vector<GammaMinRow> rows;
  std::optional<std::size_t> inverse_index;
  bool inverse_achieves_gamma0 = false;
  bool none_below_gamma0 = false;
};

GammaMinReport gamma_min_estimate(const ReferenceDescriptor& ref, const Circuit& v,
                                  const std::vector<Circuit>& candidates,
                                  const std::vector<AnnulusPartition>& ladder);

struct RecoveryInstance {
  std::string name;
  DensityMatrix rho, rho_prime;
  Labels P, Q;
  QuantumChannel R, T;
};

/// Constructed instances: identity, isometry with its reversal, and a Markov
/// recovery; `with_thin_annulus` appends the thin-annulus instance.
std::vector<RecoveryInstance> lemma1_instances(int count, std::uint64_t seed, bool with_thin_annulus);

}  // namespace teebound
