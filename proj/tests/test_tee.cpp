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

#include <cmath>

#include <gtest/gtest.h>

#include "teebound/errors.hpp"
#include "teebound/tee.hpp"

namespace teebound {

void PrintTo(Engine e, std::ostream* os) { *os << to_string(e); }

namespace {

const double kLog2 = std::log(2.0);

AnnulusPartition ring_partition() {
  AnnulusPartition p;
  p.A = Region("A", {14, 50, 19});
  p.B1 = Region("B1", {51});
  p.B2 = Region("B2", {26, 56});
  p.C = Region("C", {21, 57});
  p.center = {3, 2};
  p.inner_radius = 0;
  p.outer_radius = 1;
  return p;
}

// Witness loops inside the ring and strings from the hole edge h(3,2) to far away.
MixtureGeometry ring_geometry(const Region& keep_out = Region()) {
  const Lattice lat(6, 6);
  MixtureGeometry g;
  g.primal_loop = {{2, 2}, {2, 3}, {3, 3}, {4, 3}, {4, 2}, {3, 2}, {2, 2}};
  g.dual_loop = {{2, 1}, {2, 2}, {2, 3}, {3, 3}, {3, 2}, {3, 1}, {2, 1}};
  g.paths.primal = route_primal(lat, {3, 2}, {0, 5}, keep_out);
  g.paths.dual = route_dual(lat, {2, 2}, {5, 5}, keep_out);
  return g;
}

TEST(Audit, ToricCodeOnTwelveByTwelve) {
  const auto ref = ReferenceDescriptor::toric_code(12, 12);
  const auto rep = reference_state_audit(ref, 6, 1);
  EXPECT_TRUE(rep.pass());
  EXPECT_EQ(rep.partitions.size(), 6u);
  EXPECT_NEAR(rep.gamma0_observed, kLog2, 1e-12);
  for (const auto& e : rep.partitions) EXPECT_EQ(e.cmi_bits, 2);
}

TEST(Audit, ProductReference) {
  const auto rep = reference_state_audit(ReferenceDescriptor::product(12, 12), 4, 2);
  EXPECT_TRUE(rep.pass());
  EXPECT_NEAR(rep.gamma0_observed, 0, 1e-12);
}

TEST(Audit, SampledPartitionsVary) {
  const Lattice lat(12, 12);
  const auto parts = sample_partitions(lat, 6, 3);
  ASSERT_EQ(parts.size(), 6u);
  for (const auto& p : parts) {
    EXPECT_NO_THROW(validate_partition(lat, p));
    EXPECT_GE(p.inner_radius, 1);
    EXPECT_GE(p.width(), 2);
  }
}

TEST(Partition, AdjacentAAndCRejected) {
  const Lattice lat(6, 6);
  AnnulusPartition p = ring_partition();
  EXPECT_NO_THROW(validate_partition(lat, p));
  std::swap(p.B1, p.C);
  EXPECT_THROW(validate_partition(lat, p), GeometryError);
  AnnulusPartition q = ring_partition();
  q.C = Region("C", {21, 57, 14});
  EXPECT_THROW(validate_partition(lat, q), GeometryError);
}

TEST(Bound, IdentityHasZeroMargin) {
  const auto ref = ReferenceDescriptor::toric_code(12, 12);
  const auto p = build_annulus_partition(ref.lattice(), {5, 5}, 1, 4);
  CircuitSpec spec;
  spec.family = CircuitFamily::identity;
  const auto r = tee_bound_experiment(ref, spec, p, 1, Engine::stabilizer);
  EXPECT_NEAR(r.cmi, 2 * kLog2, 1e-12);
  EXPECT_EQ(r.margin, 0.0);
  EXPECT_TRUE(r.precondition_ok);
  EXPECT_EQ(r.width, 3);
}

TEST(Bound, RandomDepthTwoCliffordsMeetTheBound) {
  const auto ref = ReferenceDescriptor::toric_code(12, 12);
  const auto p = build_annulus_partition(ref.lattice(), {5, 5}, 1, 4);
  CircuitSpec spec;
  spec.depth = 2;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto r = tee_bound_experiment(ref, spec, p, seed, Engine::stabilizer);
    EXPECT_TRUE(r.precondition_ok);
    EXPECT_GE(r.margin, -1e-8) << "seed " << seed;
    const double k = r.margin / kLog2;
    EXPECT_NEAR(k, std::round(k), 1e-9);
    EXPECT_NEAR(r.cmi, r.s_ab + r.s_bc - r.s_b - r.s_abc, 1e-12);
  }
}

TEST(Bound, DepthBeyondWidthIsFlagged) {
  const auto ref = ReferenceDescriptor::toric_code(12, 12);
  const auto p = build_annulus_partition(ref.lattice(), {5, 5}, 1, 3);
  CircuitSpec spec;
  spec.depth = 3;
  EXPECT_FALSE(tee_bound_experiment(ref, spec, p, 4, Engine::stabilizer).precondition_ok);
}

TEST(Bound, EngineMismatch) {
  const auto ref = ReferenceDescriptor::toric_code(12, 12);
  const auto p = build_annulus_partition(ref.lattice(), {5, 5}, 1, 4);
  CircuitSpec spec;
  spec.family = CircuitFamily::haar;
  EXPECT_THROW(tee_bound_experiment(ref, spec, p, 1, Engine::stabilizer), std::invalid_argument);
}

TEST(Bound, DenseCollarReductions) {
  const auto ref = ReferenceDescriptor::toric_code(6, 6);
  const auto reductions = thin_ring_reductions(ref);
  ASSERT_EQ(reductions.size(), 248u);
  const Lattice lat = ref.lattice();
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto& red = reductions[(seed * 37) % reductions.size()];
    const auto haar = collar_circuit(lat, red, CircuitFamily::haar, seed);
    const auto r = tee_bound_experiment(ref, haar, red.partition, seed, Engine::dense);
    EXPECT_TRUE(r.precondition_ok);
    EXPECT_GE(r.margin, -1e-8) << "seed " << seed;

    const auto cliff = collar_circuit(lat, red, CircuitFamily::clifford, seed);
    const auto rs = tee_bound_experiment(ref, cliff, red.partition, seed, Engine::stabilizer);
    const auto rd = tee_bound_experiment(ref, cliff, red.partition, seed, Engine::dense);
    EXPECT_NEAR(rs.cmi, rd.cmi, 1e-10);
    EXPECT_NEAR(rs.s_abc, rd.s_abc, 1e-10);
  }
}

TEST(Bound, DenseLimitRaisesResourceError) {
  const auto ref = ReferenceDescriptor::toric_code(12, 12);
  const auto p = build_annulus_partition(ref.lattice(), {5, 5}, 1, 4);
  CircuitSpec spec;
  spec.family = CircuitFamily::identity;
  EXPECT_THROW(tee_bound_experiment(ref, spec, p, 1, Engine::dense, 12), ResourceError);
}

class MixtureByEngine : public ::testing::TestWithParam<Engine> {};

TEST_P(MixtureByEngine, EntropyGainIsShannon) {
  const auto ref = ReferenceDescriptor::toric_code(6, 6);
  const auto p = ring_partition();
  const auto g = ring_geometry();
  for (const auto& probs : {std::array<double, 4>{1, 0, 0, 0}, std::array<double, 4>{0.25, 0.25, 0.25, 0.25},
                            std::array<double, 4>{0.5, 0.5, 0, 0}}) {
    const auto r = anyon_mixture_check(ref, p, Circuit{}, probs, GetParam(), g);
    EXPECT_TRUE(r.pass());
    EXPECT_TRUE(r.orthogonal);
    EXPECT_NEAR(r.entropy_difference, shannon_entropy(probs), 1e-9);
    EXPECT_NEAR(r.cmi_sigma_tilde, 2 * kLog2, 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Engines, MixtureByEngine, ::testing::Values(Engine::stabilizer, Engine::dense),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Mixture, ShannonValues) {
  EXPECT_NEAR(shannon_entropy({0.25, 0.25, 0.25, 0.25}), 2 * kLog2, 1e-15);
  EXPECT_NEAR(shannon_entropy({0.5, 0.5, 0, 0}), kLog2, 1e-15);
  EXPECT_EQ(shannon_entropy({1, 0, 0, 0}), 0.0);
}

TEST(Mixture, DenseGatesInsideTheRing) {
  const auto ref = ReferenceDescriptor::toric_code(6, 6);
  const auto u = random_unitary_on_pairs({{{26, 56}, {21, 57}}, {{14, 50}}}, 5);
  const auto r = anyon_mixture_check(ref, ring_partition(), u, {0.25, 0.25, 0.25, 0.25}, Engine::dense,
                                     ring_geometry(u.support()));
  EXPECT_TRUE(r.pass());
  EXPECT_NEAR(r.entropy_difference, 2 * kLog2, 1e-9);
}

TEST(Mixture, StabilizerOnLargeAnnulus) {
  const auto ref = ReferenceDescriptor::toric_code(16, 16);
  const auto p = build_annulus_partition(ref.lattice(), {7, 7}, 3, 6);
  CircuitSpec spec;
  spec.collar = 1;
  const auto u = make_circuit(ref.lattice(), spec, p, 3);
  const auto r = anyon_mixture_check(ref, p, u, {0.25, 0.25, 0.25, 0.25}, Engine::stabilizer);
  EXPECT_TRUE(r.pass());
  EXPECT_NEAR(r.entropy_difference, 2 * kLog2, 1e-12);
  EXPECT_GE(r.cmi_sigma_tilde, 2 * kLog2 - 1e-12);
}

TEST(Mixture, RejectsBadProbabilities) {
  const auto ref = ReferenceDescriptor::toric_code(6, 6);
  const auto g = ring_geometry();
  EXPECT_THROW(anyon_mixture_check(ref, ring_partition(), Circuit{}, {0.5, 0.6, 0, 0}, Engine::dense, g),
               std::invalid_argument);
  EXPECT_THROW(anyon_mixture_check(ref, ring_partition(), Circuit{}, {1.5, -0.5, 0, 0}, Engine::dense, g),
               std::invalid_argument);
}

TEST(Deformation, IdentityIsDegenerate) {
  const auto ref = ReferenceDescriptor::toric_code(14, 14);
  const auto p = build_annulus_partition(ref.lattice(), {7, 7}, 1, 6);
  const auto r = deformation_chain_check(ref, Circuit{}, p);
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(r.pass());
  for (double x : {r.cmi_u, r.cmi_u1, r.cmi_u2}) EXPECT_NEAR(x, 2 * kLog2, 1e-12);
}

TEST(Deformation, DepthTwoChains) {
  const auto ref = ReferenceDescriptor::toric_code(14, 14);
  const auto lat = ref.lattice();
  const auto p = build_annulus_partition(lat, {7, 7}, 1, 6);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto u = random_shallow_clifford(lat, 2, seed);
    const auto r = deformation_chain_check(ref, u, p);
    EXPECT_FALSE(r.degenerate);
    EXPECT_TRUE(r.eq12 && r.eq13 && r.eq14) << "seed " << seed;
    EXPECT_GE(r.margin(), 0.0);
    EXPECT_FALSE(r.hole.empty());
    EXPECT_TRUE(r.a_prime.subset_of(p.A));
    EXPECT_LE(r.cmi_u1_shrunk, r.cmi_u1 + 1e-12);
  }
}

TEST(MaxEntropyAnnulus, ToricRingGap) {
  const Lattice lat(6, 6);
  const std::vector<std::vector<int>> ring = {{55, 56}, {26, 19}, {57, 50}, {58, 14}, {21, 51}};
  std::vector<int> qs;
  std::vector<Labels> blocks;
  for (const auto& b : ring) {
    qs.insert(qs.end(), b.begin(), b.end());
    blocks.push_back({qubit_label(b[0]), qubit_label(b[1])});
  }
  const auto sigma = reduced_density_matrix(toric_code_ground_state(lat), Region("ring", qs));
  const auto me = max_entropy_state_for_annulus(sigma, blocks);
  EXPECT_TRUE(me.premise_locally_markov);
  EXPECT_TRUE(me.indistinguishability.pass);
  EXPECT_NEAR(me.entropy_gap, 2 * kLog2, 1e-7);
}

TEST(ThinAnnulus, FactsHold) {
  const auto ref = ReferenceDescriptor::toric_code(6, 6);
  const auto g = thin_annulus_geometry(1);
  EXPECT_TRUE(g.P.subset_of(g.A));
  const auto r = appendix_e_fact_checks(ref, g);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.Y.size(), 10u);
  EXPECT_NEAR(r.fact_first, 2 * kLog2, 1e-7);
  EXPECT_NEAR(r.stab_entropy_y, r.dense_entropy_y, 1e-10);
  EXPECT_TRUE(r.lemma.premises_hold);
  EXPECT_TRUE(r.lemma.conclusion_holds);
}

TEST(ThinAnnulus, PNextToGateViolatesThePrecondition) {
  const auto ref = ReferenceDescriptor::toric_code(6, 6);
  EXPECT_THROW(appendix_e_fact_checks(ref, thin_annulus_geometry(1, true)), PreconditionError);
}

TEST(GammaMin, IdentityPreparation) {
  const auto ref = ReferenceDescriptor::toric_code(12, 12);
  const auto lat = ref.lattice();
  std::vector<AnnulusPartition> ladder;
  for (int r : {3, 4, 5}) ladder.push_back(build_annulus_partition(lat, {5, 5}, 1, r));
  const auto rep = gamma_min_estimate(ref, Circuit{}, {Circuit{}}, ladder);
  ASSERT_TRUE(rep.inverse_index);
  EXPECT_TRUE(rep.inverse_achieves_gamma0);
  EXPECT_TRUE(rep.none_below_gamma0);
  for (const auto& row : rep.rows) EXPECT_NEAR(row.minimum, kLog2, 1e-12);
}

TEST(GammaMin, InverseAttainsAndAdversariesDoNotBeatIt) {
  const auto ref = ReferenceDescriptor::toric_code(12, 12);
  const auto lat = ref.lattice();
  std::vector<AnnulusPartition> ladder;
  for (int r : {4, 5}) ladder.push_back(build_annulus_partition(lat, {5, 5}, 1, r));
  const auto v = random_shallow_clifford(lat, 2, 9);
  std::vector<Circuit> candidates = {Circuit{}, invert(v)};
  for (std::uint64_t s = 100; s < 104; ++s) candidates.push_back(random_shallow_clifford(lat, 1, s));
  const auto rep = gamma_min_estimate(ref, v, candidates, ladder);
  ASSERT_EQ(rep.inverse_index, std::optional<std::size_t>(1));
  EXPECT_TRUE(rep.inverse_achieves_gamma0);
  EXPECT_TRUE(rep.none_below_gamma0);
  EXPECT_THROW(gamma_min_estimate(ref, v, {}, ladder), std::invalid_argument);
}

TEST(RecoveryLemma, InstancesIncludeThinAnnulus) {
  const auto inst = lemma1_instances(4, 3, true);
  ASSERT_EQ(inst.size(), 4u);
  EXPECT_NE(inst.back().name.find("appendix"), std::string::npos) << inst.back().name;
  const auto r = entropy_difference_lemma_check(inst.back().rho, inst.back().rho_prime, inst.back().P,
                                                inst.back().Q, inst.back().R, inst.back().T);
  EXPECT_TRUE(r.premises_hold);
  EXPECT_TRUE(r.conclusion_holds);
  EXPECT_TRUE(r.mi_identity_holds);
}

}  // namespace
}  // namespace teebound
