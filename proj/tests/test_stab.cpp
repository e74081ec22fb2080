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
#include <sstream>

#include <gtest/gtest.h>

#include "teebound/errors.hpp"
#include "teebound/stab.hpp"

namespace teebound {
namespace {

const double kLog2 = std::log(2.0);

Region plaquette_block(const Lattice& lat, int r, int c, int h, int w) {
  std::vector<int> q;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      for (int e : lat.plaquette({r + i, c + j})) q.push_back(e);
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  return Region("disk", q);
}

PauliString star_operator(const Lattice& lat, Site v) {
  return PauliString::on(static_cast<std::size_t>(lat.num_qubits()), lat.star(v), 'X');
}

PauliString plaquette_operator(const Lattice& lat, Site p) {
  return PauliString::on(static_cast<std::size_t>(lat.num_qubits()), lat.plaquette(p), 'Z');
}

TEST(ToricCode, StabilizedByStarsAndPlaquettes) {
  const Lattice lat(6, 6);
  const auto s = toric_code_ground_state(lat);
  EXPECT_EQ(s.num_qubits(), 72u);
  EXPECT_EQ(s.num_generators(), 72u);
  s.validate();
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      EXPECT_EQ(s.expectation(star_operator(lat, {r, c})), 1);
      EXPECT_EQ(s.expectation(plaquette_operator(lat, {r, c})), 1);
    }
}

TEST(ToricCode, LogicalSectorSigns) {
  const Lattice lat(6, 6);
  const auto s = toric_code_ground_state(lat, {-1, +1});
  std::vector<int> row;
  for (int c = 0; c < 6; ++c) row.push_back(lat.h(0, c));
  std::vector<int> col;
  for (int r = 0; r < 6; ++r) col.push_back(lat.v(r, 0));
  const auto z_row = PauliString::on(72, row, 'Z'), z_col = PauliString::on(72, col, 'Z');
  EXPECT_EQ(std::abs(s.expectation(z_row)), 1);
  EXPECT_EQ(s.expectation(z_row) * s.expectation(z_col), -1);
}

TEST(ToricCode, OpenPlaneIsUnsupported) {
  EXPECT_ANY_THROW(toric_code_ground_state(Lattice(6, 6, Topology::open_plane)));
}

TEST(ToricCode, PlaquetteEntropyIsThreeBits) {
  const Lattice lat(6, 6);
  const auto s = toric_code_ground_state(lat);
  const Region r("p", lat.plaquette({2, 2}));
  EXPECT_EQ(entropy_bits(s, r), 3);
  EXPECT_NEAR(entropy(reduced_density_matrix(s, r)), 3 * kLog2, 1e-10);
}

TEST(ToricCode, DiskEntropyIsPerimeterMinusOne) {
  const Lattice lat(6, 6);
  const auto s = toric_code_ground_state(lat);
  // 1x2 and 1x3 plaquette strips have perimeters 6 and 8.
  for (const auto& [w, perimeter] : {std::pair{2, 6}, std::pair{3, 8}}) {
    const Region disk = plaquette_block(lat, 1, 1, 1, w);
    EXPECT_EQ(entropy_bits(s, disk), perimeter - 1);
    EXPECT_NEAR(entropy(reduced_density_matrix(s, disk)), (perimeter - 1) * kLog2, 1e-10);
  }
}

TEST(StabEntropy, EmptyAndFull) {
  const Lattice lat(4, 4);
  const auto s = toric_code_ground_state(lat);
  EXPECT_EQ(entropy(s, Region("e", {})), 0);
  std::vector<int> all(32);
  for (int i = 0; i < 32; ++i) all[static_cast<std::size_t>(i)] = i;
  EXPECT_EQ(entropy(s, Region("all", all)), 0);
}

TEST(StabCmi, AnnulusTwoBits) {
  const Lattice lat(12, 12);
  const auto s = toric_code_ground_state(lat);
  for (int r_in : {1, 2})
    for (int r_out : {r_in + 2, r_in + 3}) {
      const auto p = build_annulus_partition(lat, {4, 7}, r_in, r_out);
      EXPECT_EQ(cmi_bits(s, p.A, p.B(), p.C), 2);
      EXPECT_DOUBLE_EQ(cmi(s, p.A, p.B(), p.C), 2 * kLog2);
    }
}

TEST(StabCmi, ProductStateAndChainLikeSubregion) {
  const Lattice lat(12, 12);
  const auto p = build_annulus_partition(lat, {5, 5}, 1, 4);
  EXPECT_EQ(cmi_bits(product_state(288), p.A, p.B(), p.C), 0);
  const auto s = toric_code_ground_state(lat);
  // B1, A, B2 run along three consecutive arcs; dropping C leaves a chain.
  EXPECT_EQ(cmi_bits(s, p.B1, p.A, p.B2), 0);
  EXPECT_EQ(cmi_bits(s, p.A, p.B1, p.C), 0);
}

TEST(StabCmi, OverlapIsRejected) {
  const Lattice lat(6, 6);
  const auto s = toric_code_ground_state(lat);
  EXPECT_THROW(cmi(s, Region("a", {1, 2}), Region("b", {2}), Region("c", {5})), GeometryError);
}

TEST(ApplyClifford, IdentityAndRoundTrip) {
  const Lattice lat(6, 6);
  const auto s = toric_code_ground_state(lat);
  EXPECT_EQ(apply_clifford(s, Circuit{}).dump(), s.dump());
  const Circuit u = random_shallow_clifford(lat, 2, 12);
  const auto back = apply_clifford(apply_clifford(s, u), invert(u));
  for (const auto& g : s.generators()) EXPECT_EQ(back.expectation(g), g.sign());
  for (const auto& g : back.generators()) EXPECT_EQ(s.expectation(g), g.sign());
}

TEST(ApplyClifford, CnotUpdate) {
  StabilizerState s = StabilizerState::from_generators({PauliString::parse("+XI"), PauliString::parse("+IZ")});
  s.apply(Gate::named(GateKind::CNOT, {0, 1}));
  s.validate();
  EXPECT_EQ(s.expectation(PauliString::parse("+XX")), 1);
  EXPECT_EQ(s.expectation(PauliString::parse("+ZZ")), 1);
}

TEST(ApplyClifford, DenseGateRejected) {
  StabilizerState s(2);
  Circuit c;
  c.add_layer({Gate::dense({0, 1}, Eigen::MatrixXcd::Identity(4, 4))});
  EXPECT_ANY_THROW(s.apply(c));
}

TEST(Tableau, DumpLoadRoundTrip) {
  const Lattice lat(4, 4);
  const auto s = apply_clifford(toric_code_ground_state(lat), random_shallow_clifford(lat, 1, 3));
  std::istringstream in(s.dump());
  const auto t = StabilizerState::load(in);
  EXPECT_EQ(t.dump(), s.dump());
}

TEST(Strings, VacuumIsIdentity) {
  const Lattice lat(6, 6);
  EXPECT_TRUE(string_operator(lat, Anyon::vacuum, {}).is_identity());
}

TEST(Strings, ElectricStringFlipsEndpointStars) {
  const Lattice lat(6, 6);
  const StringPaths paths{{{1, 1}, {1, 2}, {1, 3}, {2, 3}}, {}};
  const auto z = string_operator(lat, Anyon::e, paths);
  EXPECT_EQ(z.weight(), 3u);
  int flipped = 0;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      EXPECT_TRUE(z.commutes(plaquette_operator(lat, {r, c})));
      if (!z.commutes(star_operator(lat, {r, c}))) {
        ++flipped;
        EXPECT_TRUE((Site{r, c} == Site{1, 1}) || (Site{r, c} == Site{2, 3}));
      }
    }
  EXPECT_EQ(flipped, 2);
  EXPECT_THROW(string_operator(lat, Anyon::e, {{{1, 1}, {1, 2}, {1, 1}}, {}}), GeometryError);
}

TEST(Strings, WitnessesDetectAnyons) {
  const Lattice lat(12, 12);
  const auto p = build_annulus_partition(lat, {5, 5}, 1, 4);
  const auto sigma = toric_code_ground_state(lat);
  // Dual loop of plaquettes at radius 2 and a primal loop of vertices around it.
  std::vector<Site> dual, primal;
  for (int j = -2; j < 2; ++j) dual.push_back({5 - 2, 5 + j});
  for (int i = -2; i < 2; ++i) dual.push_back({5 + i, 5 + 2});
  for (int j = 2; j > -2; --j) dual.push_back({5 + 2, 5 + j});
  for (int i = 2; i > -2; --i) dual.push_back({5 + i, 5 - 2});
  dual.push_back(dual.front());
  for (int j = -1; j < 2; ++j) primal.push_back({5 - 1, 5 + j});
  for (int i = -1; i < 2; ++i) primal.push_back({5 + i, 5 + 2});
  for (int j = 2; j > -1; --j) primal.push_back({5 + 2, 5 + j});
  for (int i = 2; i > -1; --i) primal.push_back({5 + i, 5 - 1});
  primal.push_back(primal.front());
  const auto e_det = closed_string_operator(lat, Anyon::m, dual, p.ABC());
  const auto m_det = closed_string_operator(lat, Anyon::e, primal, p.ABC());
  EXPECT_EQ(sigma.expectation(e_det), 1);
  EXPECT_EQ(sigma.expectation(m_det), 1);
  const StringPaths paths{route_primal(lat, {5, 5}, {11, 11}, Region("none", {})),
                          route_dual(lat, {5, 5}, {11, 11}, Region("none", {}))};
  const int expect[4][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  const Anyon anyons[4] = {Anyon::vacuum, Anyon::e, Anyon::m, Anyon::epsilon};
  for (int a = 0; a < 4; ++a) {
    StabilizerState r = sigma;
    r.apply_pauli(string_operator(lat, anyons[a], paths));
    EXPECT_EQ(r.expectation(e_det), expect[a][0]) << a;
    EXPECT_EQ(r.expectation(m_det), expect[a][1]) << a;
  }
  EXPECT_THROW(closed_string_operator(lat, Anyon::m, dual, p.A), GeometryError);
}

TEST(Strings, ConjugatedWitnessesStayInsideWideAnnuli) {
  const Lattice lat(14, 14);
  const auto p = build_annulus_partition(lat, {6, 6}, 1, 6);
  std::vector<Site> dual;
  for (int j = -3; j < 3; ++j) dual.push_back({6 - 3, 6 + j});
  for (int i = -3; i < 3; ++i) dual.push_back({6 + i, 6 + 3});
  for (int j = 3; j > -3; --j) dual.push_back({6 + 3, 6 + j});
  for (int i = 3; i > -3; --i) dual.push_back({6 + i, 6 - 3});
  dual.push_back(dual.front());
  const auto w = closed_string_operator(lat, Anyon::m, dual, p.ABC());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto u = random_shallow_clifford(lat, 2, seed);
    for (int q : conjugate(w, u).support()) EXPECT_TRUE(p.ABC().contains(q));
  }
}

TEST(ReducedState, SingleQubitIsMaximallyMixed) {
  const Lattice lat(6, 6);
  const auto rho = reduced_density_matrix(toric_code_ground_state(lat), Region("q", {4}));
  EXPECT_LT((rho.matrix() - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-14);
}

TEST(ReducedState, PureGhzIsRankOne) {
  const auto s = StabilizerState::from_generators({PauliString::parse("+XXXX"), PauliString::parse("+ZZII"),
                                                   PauliString::parse("+IZZI"), PauliString::parse("+IIZZ")});
  const auto rho = reduced_density_matrix(s, Region("all", {0, 1, 2, 3}));
  EXPECT_NEAR((rho.matrix() * rho.matrix() - rho.matrix()).norm(), 0, 1e-12);
  EXPECT_NEAR(std::abs(rho.matrix()(0, 15)), 0.5, 1e-12);
}

TEST(ReducedState, SectorEntropyMatchesRank) {
  const Lattice lat(12, 12);
  const auto s = toric_code_ground_state(lat);
  const auto p = build_annulus_partition(lat, {5, 5}, 1, 3);
  std::vector<int> q(p.A.qubits().begin(), p.A.qubits().begin() + 8);
  const Region r("sector", q);
  EXPECT_NEAR(entropy(reduced_density_matrix(s, r)), entropy(s, r), 1e-10);
  EXPECT_THROW(reduced_density_matrix(s, p.ABC(), 12), ResourceError);
}

}  // namespace
}  // namespace teebound
