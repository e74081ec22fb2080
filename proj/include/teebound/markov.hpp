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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "teebound/dense.hpp"

namespace teebound {

using Labels = std::vector<std::string>;

/// A state together with an ordered partition X1..Xn of its factors.
struct OrderedChain {
  DensityMatrix state;
  std::vector<Labels> blocks;

  OrderedChain(DensityMatrix s, std::vector<Labels> b);
  std::size_t size() const { return blocks.size(); }
  /// Labels of X_i .. X_{j-1} (0-based, half-open).
  Labels interval(std::size_t i, std::size_t j) const;
};

/// A = [a, b), B = [b, c), C = [c, d) in block indices.
struct Tripartition {
  std::size_t a = 0, b = 0, c = 0, d = 0;
  bool full_cover(std::size_t n) const { return a == 0 && d == n; }
  std::string str() const;
};

/// Every chain-like tripartition of n blocks.
std::vector<Tripartition> chain_tripartitions(std::size_t n, bool include_full_cover = true,
                                              bool include_proper = true);

/// Entropies of contiguous block intervals, computed once each.
class IntervalEntropies {
 public:
  explicit IntervalEntropies(const OrderedChain& chain) : chain_(chain) {}
  double operator()(std::size_t i, std::size_t j);
  double cmi(const Tripartition& t);

 private:
  const OrderedChain& chain_;
  std::map<std::pair<std::size_t, std::size_t>, double> cache_;
};

struct TripartitionCmi {
  Tripartition parts;
  double cmi = 0;
  bool full_cover = false;
};

struct MarkovReport {
  std::vector<TripartitionCmi> table;
  bool is_locally_markov = false;
  bool is_markov = false;
  std::optional<double> global_cmi_constant;
  double tolerance = 0;
};

MarkovReport is_markov_chain(const OrderedChain& chain, double tol = 1e-8);
/// Needs n >= 4; the table only holds proper-subset tripartitions.
MarkovReport is_locally_markov(const OrderedChain& chain, double tol = 1e-8);

struct ConstancyScan {
  std::vector<TripartitionCmi> values;
  double spread = 0;
};

ConstancyScan cmi_constancy_scan(const OrderedChain& chain);

struct CanonicalChain {
  DensityMatrix tau;
  /// False when the input was not locally Markov at the given tolerance.
  bool premise_locally_markov = true;
};

/// tau_2 = sigma_{X1X2}, tau_{k+1} = Petz^sigma_{X_k -> X_k X_{k+1}}(tau_k).
CanonicalChain canonical_markov_chain(const OrderedChain& sigma, double tol = 1e-7);

struct SubsystemCheck {
  bool pass = false;
  double max_deviation = 0;
  std::string worst;
  std::vector<std::pair<std::string, double>> details;
};

/// Trace distance of tau and sigma on every connected proper subsystem.
SubsystemCheck verify_indistinguishability(const DensityMatrix& tau, const OrderedChain& sigma,
                                           double tol = 1e-7);

struct MaxEntropyReport {
  bool pass = false;
  double marginal_ab = 0;
  double marginal_bc = 0;
  double cmi_tau = 0;
  double entropy_tau = 0;
  double entropy_sigma = 0;
};

/// Certificate: tau matches sigma on AB and BC and has I(A:C|B) ~ 0.
MaxEntropyReport verify_max_entropy(const DensityMatrix& tau, const OrderedChain& sigma,
                                    const Tripartition& t, double tol = 1e-7);

struct LemmaTolerances {
  double premise_marginal = 1e-8;
  double premise_roundtrip = 1e-7;
  double conclusion = 1e-6;
};

struct LemmaReport {
  bool premises_hold = false;
  double marginal_p = 0;
  double marginal_q = 0;
  double roundtrip_rho = 0;
  double roundtrip_rho_prime = 0;
  double entropy_difference = 0;
  double recovered_entropy_difference = 0;
  double mi_before = 0;
  double mi_after = 0;
  bool conclusion_holds = false;
  bool mi_identity_holds = false;
};

/// Checks S(rho) - S(rho') = S(R rho) - S(R rho') for R: Q -> Q^ and T: Q^ -> Q.
LemmaReport entropy_difference_lemma_check(const DensityMatrix& rho, const DensityMatrix& rho_prime,
                                           const Labels& P, const Labels& Q, const QuantumChannel& R,
                                           const QuantumChannel& T, const LemmaTolerances& tol = {});

struct LocalGlobalReport {
  bool applicable = false;
  double cmi_rho = 0;
  double cmi_sigma = 0;
  double marginal_ab = 0;
  double marginal_bc = 0;
  double distance = 0;
  bool pass = false;
};

/// Two Markov states agreeing on AB and BC agree on ABC.
LocalGlobalReport local_to_global_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                                        const Labels& A, const Labels& B, const Labels& C,
                                        double premise_tol = 1e-8, double tol = 1e-6);

enum class Move { identical, move1, move2 };
const char* to_string(Move m);

/// Classifies two five-block partitions; throws GeometryError when unrelated.
Move classify_move(const std::vector<Labels>& p, const std::vector<Labels>& q);

struct MovesReport {
  Move move = Move::identical;
  double distance = 0;
  bool pass = false;
};

MovesReport moves_invariance_check(const DensityMatrix& sigma, const std::vector<Labels>& p,
                                   const std::vector<Labels>& q, double tol = 1e-6);

}  // namespace teebound
