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


#include <random>

#include <gtest/gtest.h>

#include "teebound/circuits.hpp"
#include "teebound/dense.hpp"
#include "teebound/errors.hpp"
#include "teebound/lattice.hpp"

namespace teebound {
namespace {

TEST(Lattice, IndexingAndDoubledCoordinates) {
  const Lattice lat(4, 5);
  EXPECT_EQ(lat.num_qubits(), 40);
  EXPECT_EQ(lat.h(1, 2), 7);
  EXPECT_EQ(lat.v(1, 2), 20 + 7);
  EXPECT_EQ(lat.doubled_position(lat.h(1, 2)), (std::array<int, 2>{2, 5}));
  EXPECT_EQ(lat.doubled_position(lat.v(1, 2)), (std::array<int, 2>{3, 4}));
  EXPECT_EQ(lat.star({0, 0}).size(), 4u);
  EXPECT_EQ(lat.plaquette({3, 4}).size(), 4u);
}

TEST(Lattice, EveryEdgeHasEightNeighboursOnTheTorus) {
  const Lattice lat(6, 6);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    EXPECT_EQ(lat.neighbors(q).size(), 8u) << q;
    for (int n : lat.neighbors(q)) EXPECT_TRUE(lat.adjacent(n, q));
  }
}

TEST(Lattice, RejectsTinyTorus) { EXPECT_THROW(Lattice(2, 5), GeometryError); }

TEST(Annulus, QuadrantsTileTheAnnulus) {
  const Lattice lat(12, 12);
  const auto p = build_annulus_partition(lat, {5, 5}, 2, 5);
  const Region all = region_union({p.A, p.B1, p.B2, p.C});
  EXPECT_EQ(all.size(), p.A.size() + p.B1.size() + p.B2.size() + p.C.size());
  EXPECT_EQ(all, region_difference(square_disk(lat, {5, 5}, 5), square_disk(lat, {5, 5}, 2)));
  for (int q : all.qubits()) {
    const double r = polar_position(lat, {5, 5}, q).radius;
    EXPECT_GT(r, 2);
    EXPECT_LE(r, 5);
  }
  EXPECT_GE(distance(lat, p.A, p.C), 2);
  EXPECT_GE(distance(lat, p.B1, p.B2), 2);
}

TEST(Annulus, ZeroWidthIsRejected) {
  const Lattice lat(12, 12);
  try {
    build_annulus_partition(lat, {5, 5}, 2, 2);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_STREQ(e.what(), "zero-width annulus");
  }
}

TEST(Annulus, SmallTorusKeepsAAndCApart) {
  const Lattice lat(6, 6);
  const auto p = build_annulus_partition(lat, {2, 2}, 1, 2);
  // Breadth-first distance computed independently of the library helper.
  std::vector<int> dist(static_cast<std::size_t>(lat.num_qubits()), -1);
  std::vector<int> frontier = p.A.qubits();
  for (int q : frontier) dist[static_cast<std::size_t>(q)] = 0;
  for (std::size_t i = 0; i < frontier.size(); ++i)
    for (int n : lat.neighbors(frontier[i]))
      if (dist[static_cast<std::size_t>(n)] < 0) {
        dist[static_cast<std::size_t>(n)] = dist[static_cast<std::size_t>(frontier[i])] + 1;
        frontier.push_back(n);
      }
  int best = 1 << 20;
  for (int q : p.C.qubits()) best = std::min(best, dist[static_cast<std::size_t>(q)]);
  EXPECT_GE(best, 2);
}

TEST(Annulus, TooLargeForTorus) {
  EXPECT_THROW(build_annulus_partition(Lattice(12, 12), {5, 5}, 2, 6), GeometryError);
}

TEST(Annulus, RotationIsRecorded) {
  const auto p = build_annulus_partition(Lattice(12, 12), {5, 5}, 1, 4, ArcSpec::rotated(30));
  EXPECT_DOUBLE_EQ(p.rotation, 30);
}

TEST(ChainPartition, FiveBlocksAreChainLike) {
  const Lattice lat(12, 12);
  const auto p = build_annulus_partition(lat, {5, 5}, 1, 3);
  const auto chain = chain_partition(lat, p, 5);
  ASSERT_EQ(chain.subsystems.size(), 5u);
  EXPECT_EQ(region_union(chain.subsystems), p.ABC());
  EXPECT_TRUE(is_chain_like(lat, chain.subsystems));
}

TEST(ChainPartition, ThreeBlocksReassembleB) {
  const Lattice lat(12, 12);
  const auto p = build_annulus_partition(lat, {5, 5}, 1, 3);
  const auto chain = chain_partition(lat, p, 3);
  EXPECT_EQ(chain.subsystems[0], p.A);
  EXPECT_EQ(chain.subsystems[1], p.B());
  EXPECT_EQ(chain.subsystems[2], p.C);
}

TEST(ChainPartition, TooManyBlocks) {
  const Lattice lat(12, 12);
  const auto p = build_annulus_partition(lat, {5, 5}, 1, 3);
  const int n = static_cast<int>(p.ABC().size()) + 1;
  EXPECT_THROW(chain_partition(lat, p, n), GeometryError);
}

TEST(ChainLike, Cases) {
  const Lattice lat(12, 12);
  const auto p = build_annulus_partition(lat, {5, 5}, 1, 3);
  EXPECT_TRUE(is_chain_like(lat, {p.B1, p.A, p.B2}));
  const Region touching("A", {lat.h(0, 0)}), mid("B", {lat.h(0, 1)}), other("C", {lat.v(0, 1)});
  EXPECT_FALSE(is_chain_like(lat, {touching, mid, other}));
  EXPECT_THROW(is_chain_like(lat, {p.A, Region("B", {}), p.C}), GeometryError);
}

TEST(LightCone, DepthZeroAndOne) {
  const Lattice lat(6, 6);
  const Region s("S", {lat.h(2, 2)});
  EXPECT_EQ(light_cone(Circuit{}, s), s);
  const Circuit u = random_shallow_clifford(lat, 1, 3);
  Region expected = s;
  for (const auto& g : u.layers()[0])
    if (std::find(g.support.begin(), g.support.end(), lat.h(2, 2)) != g.support.end())
      expected = region_union({expected, Region("g", g.support)});
  EXPECT_EQ(light_cone(u, s), expected);
}

TEST(LightCone, MonotoneAndForwardBackwardDual) {
  const Lattice lat(8, 8);
  const Circuit u = random_shallow_clifford(lat, 3, 5);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const int a = static_cast<int>(rng() % 128), b = static_cast<int>(rng() % 128);
    const Region small("s", {a});
    const Region big = region_union({small, Region("t", {b})});
    EXPECT_TRUE(light_cone(u, small).subset_of(light_cone(u, big)));
    // q is in the backward cone of a iff a is in the forward cone of q.
    for (int q = 0; q < 128; ++q)
      EXPECT_EQ(light_cone(u, small).contains(q), future_light_cone(u, Region("q", {q})).contains(a));
  }
}

TEST(LightCone, OperatorsOutsideTheConeCommuteWithEvolvedObservable) {
  const Lattice lat(4, 4);
  // Ten qubits around plaquette (1,1) carry a depth-2 Haar circuit.
  const std::vector<int> qs{lat.h(1, 0), lat.h(1, 1), lat.h(1, 2), lat.h(2, 1), lat.v(1, 1),
                            lat.v(1, 2), lat.v(0, 1), lat.v(1, 0), lat.h(2, 0), lat.v(0, 2)};
  const Circuit u = random_shallow_unitary(lat, 2, 9, Region("Y", qs));
  ASSERT_GT(u.gate_count(), 0u);
  const Eigen::MatrixXcd U = circuit_unitary(u, qs);
  const int target = lat.h(1, 1);
  const Region cone = light_cone(u, Region("S", {target}));
  const auto local = [&](int q, const Eigen::Matrix2cd& m) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int x : qs) out = kron(out, x == q ? Eigen::MatrixXcd(m) : Eigen::MatrixXcd::Identity(2, 2));
    return out;
  };
  Eigen::Matrix2cd z;
  z << 1, 0, 0, -1;
  const Eigen::MatrixXcd evolved = U.adjoint() * local(target, z) * U;
  const Eigen::MatrixXcd haar = haar_unitary(2, 4);
  for (int q : qs) {
    const double comm = (evolved * local(q, haar) - local(q, haar) * evolved).norm();
    if (cone.contains(q)) continue;
    EXPECT_LT(comm, 1e-10) << q;
  }
}

TEST(Regions, SetAlgebraAndNeighbourhoods) {
  const Lattice lat(6, 6);
  const Region a("a", {1, 2, 3}), b("b", {3, 4});
  EXPECT_EQ(region_union({a, b}).qubits(), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(region_difference(a, b).qubits(), (std::vector<int>{1, 2}));
  EXPECT_EQ(region_intersection(a, b).qubits(), (std::vector<int>{3}));
  EXPECT_EQ(complement(lat, a).size(), 69u);
  EXPECT_EQ(distance(lat, a, Region("e", {})), -1);
  EXPECT_THROW(Region("d", {1, 1}), GeometryError);
  EXPECT_THROW(check_region(lat, Region("x", {72})), GeometryError);
  const Region n1 = neighborhood(lat, Region("q", {0}), 1);
  EXPECT_EQ(n1.size(), 1 + lat.neighbors(0).size());
}

}  // namespace
}  // namespace teebound
