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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "teebound/dense.hpp"
#include "teebound/stab.hpp"
#include "teebound/tee.hpp"

namespace teebound {
namespace {

Labels L(std::initializer_list<int> qs) {
  Labels out;
  for (int q : qs) out.push_back(qubit_label(q));
  return out;
}

std::vector<int> random_subset(std::mt19937_64& rng, int n, int k) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  return all;
}

TEST(Property, StrongSubadditivityDense) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int rank = 1 + static_cast<int>(seed % 16);
    const auto rho = random_density_matrix(qubit_factors(L({0, 1, 2, 3})), rank, seed);
    EXPECT_GE(cmi(rho, L({0}), L({1, 2}), L({3})), -1e-10);
    EXPECT_GE(cmi(rho, L({0, 1}), L({2}), L({3})), -1e-10);
    EXPECT_GE(mutual_information(rho, L({0}), L({3})), -1e-10);
  }
}

TEST(Property, StrongSubadditivityStabilizer) {
  const Lattice lat(8, 8);
  const auto sigma = toric_code_ground_state(lat);
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = apply_clifford(sigma, random_shallow_clifford(lat, 2, seed));
    const auto q = random_subset(rng, lat.num_qubits(), 30);
    const Region A("A", {q.begin(), q.begin() + 10}), B("B", {q.begin() + 10, q.begin() + 20}),
        C("C", {q.begin() + 20, q.end()});
    EXPECT_GE(cmi_bits(s, A, B, C), 0);
    EXPECT_GE(mutual_information_bits(s, A, C), 0);
  }
}

TEST(Property, MutualInformationShrinksUnderChannelsOnOneParty) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rho = random_density_matrix(qubit_factors(L({0, 1, 2})), 3, seed);
    const double before = mutual_information(rho, L({0}), L({1, 2}));
    const auto u = haar_unitary(4, seed + 100);
    const auto ch = compose(unitary_channel(qubit_factors(L({1, 2})), u),
                            partial_trace_channel(qubit_factors(L({1, 2})), L({1})));
    const auto after_state = apply_channel(ch, rho);
    EXPECT_LE(mutual_information(after_state, L({0}), L({1})), before + 1e-10);
  }
}

TEST(Property, MixingEntropyBounds) {
  const double kLog2 = std::log(2.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<DensityMatrix> comps;
    std::vector<double> p;
    double total = 0;
    for (int k = 0; k < 3; ++k) {
      comps.push_back(random_density_matrix(qubit_factors(L({0, 1})), 1 + k, seed * 3 + k));
      p.push_back(uni(rng));
      total += p.back();
    }
    double avg = 0, h = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] /= total;
      avg += p[k] * entropy(comps[k]);
      h -= p[k] * std::log(p[k]);
    }
    const double s = entropy(mix(comps, p));
    EXPECT_GE(s, avg - 1e-10);
    EXPECT_LE(s, avg + h + 1e-10);
    EXPECT_LE(s, 2 * kLog2 + 1e-12);
  }
}

TEST(Property, PetzRecoveryExactIffCmiVanishes) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    // Markov: rho_A1 (x) rho_B2C tensored with a correlated A2B1 pair.
    const auto ab = random_density_matrix(qubit_factors(L({0, 1})), 4, seed);
    const auto bc = random_density_matrix(qubit_factors(L({2, 3})), 4, seed + 50);
    const auto markov = tensor(ab, bc);
    const Labels B = L({1, 2}), BC = L({1, 2, 3});
    EXPECT_NEAR(cmi(markov, L({0}), B, L({3})), 0, 1e-10);
    const auto rec = apply_channel(petz_map(marginal(markov, BC), B, BC), marginal(markov, L({0, 1, 2})));
    EXPECT_LT(trace_distance(rec.permuted(markov.labels()), markov), 1e-8);

    const auto generic = random_density_matrix(qubit_factors(L({0, 1, 2, 3})), 16, seed + 200);
    const double c = cmi(generic, L({0}), B, L({3}));
    const auto rec2 = apply_channel(petz_map(marginal(generic, BC), B, BC), marginal(generic, L({0, 1, 2})));
    const double d = trace_distance(rec2.permuted(generic.labels()), generic);
    EXPECT_GT(c, 1e-6);
    EXPECT_GT(d, 1e-6);
  }
}

TEST(Property, LayersAreDisjoint) {
  const Lattice lat(10, 10);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (const Circuit& c : {random_shallow_clifford(lat, 3, seed), random_shallow_unitary(lat, 2, seed)}) {
      for (const auto& layer : c.layers()) {
        std::set<int> used;
        for (const auto& g : layer)
          for (int q : g.support) EXPECT_TRUE(used.insert(q).second);
      }
    }
  }
}

TEST(Property, LocalUnitariesPreserveEntropyStabilizer) {
  const Lattice lat(8, 8);
  const auto sigma = toric_code_ground_state(lat);
  const auto p = build_annulus_partition(lat, {3, 3}, 1, 3);
  const Region abc = p.ABC();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto u = gates_within(random_shallow_clifford(lat, 3, seed), abc);
    ASSERT_TRUE(u.support().subset_of(abc));
    EXPECT_EQ(entropy_bits(apply_clifford(sigma, u), abc), entropy_bits(sigma, abc));
  }
}

TEST(Property, LocalUnitariesPreserveEntropyDense) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rho = random_density_matrix(qubit_factors(L({0, 1, 2, 3})), 5, seed);
    const auto moved = apply_local_unitary(rho, L({1, 2}), haar_unitary(4, seed + 7));
    EXPECT_NEAR(entropy(moved, L({1, 2})), entropy(rho, L({1, 2})), 1e-10);
    EXPECT_NEAR(entropy(moved, L({0, 1, 2})), entropy(rho, L({0, 1, 2})), 1e-10);
    EXPECT_NEAR(entropy(moved), entropy(rho), 1e-10);
  }
}

TEST(Property, LightConesAreMonotone) {
  const Lattice lat(8, 8);
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = random_shallow_clifford(lat, 3, seed);
    const auto q = random_subset(rng, lat.num_qubits(), 12);
    const Region small("s", {q.begin(), q.begin() + 6}), big("b", q);
    EXPECT_TRUE(small.subset_of(light_cone(c, small)));
    EXPECT_TRUE(light_cone(c, small).subset_of(light_cone(c, big)));
    EXPECT_TRUE(future_light_cone(c, small).subset_of(future_light_cone(c, big)));
    Circuit shallower;
    for (int d = 0; d < 2; ++d) shallower.add_layer(c.layers()[d]);
    EXPECT_TRUE(light_cone(shallower, small).subset_of(light_cone(c, small)));
  }
}

TEST(Property, StabilizerAndDenseEntropiesAgree) {
  const Lattice lat(6, 6);
  const auto sigma = toric_code_ground_state(lat);
  std::mt19937_64 rng(21);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = apply_clifford(sigma, random_shallow_clifford(lat, 1 + seed % 3, seed));
    const Region r("r", random_subset(rng, lat.num_qubits(), 2 + static_cast<int>(seed % 9)));
    EXPECT_NEAR(entropy(s, r), entropy(reduced_density_matrix(s, r)), 1e-10);
  }
}

TEST(Property, ToricAnnulusCmiIsConstant) {
  const auto ref = ReferenceDescriptor::toric_code(14, 14);
  const auto sigma = ref.state();
  for (const auto& p : sample_partitions(ref.lattice(), 12, 8)) {
    EXPECT_EQ(cmi_bits(sigma, p.A, p.B(), p.C), 2);
  }
}

}  // namespace
}  // namespace teebound
