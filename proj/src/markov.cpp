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

#include "teebound/markov.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "teebound/errors.hpp"

namespace teebound {

namespace {

Labels join(std::initializer_list<const Labels*> parts) {
  Labels out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

std::set<std::string> as_set(const Labels& l) { return {l.begin(), l.end()}; }

}  // namespace

OrderedChain::OrderedChain(DensityMatrix s, std::vector<Labels> b) : state(std::move(s)), blocks(std::move(b)) {
  std::set<std::string> seen;
  for (const auto& blk : blocks) {
    if (blk.empty()) throw std::invalid_argument("chain block is empty");
    for (const auto& l : blk) {
      state.index_of(l);
      if (!seen.insert(l).second) throw std::invalid_argument("label '" + l + "' appears in two blocks");
    }
  }
  if (seen.size() != state.factors().size()) throw std::invalid_argument("chain blocks must partition the factors");
}

Labels OrderedChain::interval(std::size_t i, std::size_t j) const {
  Labels out;
  for (std::size_t k = i; k < j; ++k) out.insert(out.end(), blocks[k].begin(), blocks[k].end());
  return out;
}

std::string Tripartition::str() const {
  const auto range = [](std::size_t i, std::size_t j) {
    std::string s = "X" + std::to_string(i + 1);
    if (j - i > 1) s += "-X" + std::to_string(j);
    return s;
  };
  return "A=" + range(a, b) + " B=" + range(b, c) + " C=" + range(c, d);
}

std::vector<Tripartition> chain_tripartitions(std::size_t n, bool include_full_cover, bool include_proper) {
  std::vector<Tripartition> out;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        for (std::size_t d = c + 1; d <= n; ++d) {
          const Tripartition t{a, b, c, d};
          if (t.full_cover(n) ? include_full_cover : include_proper) out.push_back(t);
        }
  return out;
}

double IntervalEntropies::operator()(std::size_t i, std::size_t j) {
  if (i >= j) return 0.0;
  const auto key = std::make_pair(i, j);
  const auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double s = entropy(chain_.state, chain_.interval(i, j));
  cache_.emplace(key, s);
  return s;
}

double IntervalEntropies::cmi(const Tripartition& t) {
  auto& S = *this;
  return S(t.a, t.c) + S(t.b, t.d) - S(t.b, t.c) - S(t.a, t.d);
}

namespace {

MarkovReport scan(const OrderedChain& chain, double tol, bool full, bool proper) {
  if (chain.size() < 3) throw std::invalid_argument("chain needs at least 3 blocks");
  IntervalEntropies S(chain);
  MarkovReport rep;
  rep.tolerance = tol;
  const std::size_t n = chain.size();
  for (const auto& t : chain_tripartitions(n, full, proper)) {
    rep.table.push_back({t, S.cmi(t), t.full_cover(n)});
  }
  bool local = true, all = true;
  double lo = 1e300, hi = -1e300;
  for (const auto& row : rep.table) {
    const bool ok = row.cmi <= tol;
    all = all && ok;
    if (!row.full_cover) local = local && ok;
    if (row.full_cover) {
      lo = std::min(lo, row.cmi);
      hi = std::max(hi, row.cmi);
    }
  }
  rep.is_locally_markov = local;
  rep.is_markov = all;
  if (lo <= hi && hi - lo <= tol) rep.global_cmi_constant = 0.5 * (lo + hi);
  return rep;
}

}  // namespace

MarkovReport is_markov_chain(const OrderedChain& chain, double tol) {
  return scan(chain, tol, true, true);
}

MarkovReport is_locally_markov(const OrderedChain& chain, double tol) {
  if (chain.size() < 4) throw std::invalid_argument("local Markov property needs at least 4 blocks");
  auto rep = scan(chain, tol, false, true);
  rep.is_markov = false;
  rep.global_cmi_constant.reset();
  return rep;
}

ConstancyScan cmi_constancy_scan(const OrderedChain& chain) {
  if (chain.size() < 4) throw std::invalid_argument("constancy scan needs at least 4 blocks");
  IntervalEntropies S(chain);
  ConstancyScan out;
  double lo = 1e300, hi = -1e300;
  for (const auto& t : chain_tripartitions(chain.size(), true, false)) {
    const double v = S.cmi(t);
    out.values.push_back({t, v, true});
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.spread = hi - lo;
  return out;
}

CanonicalChain canonical_markov_chain(const OrderedChain& sigma, double tol) {
  const std::size_t n = sigma.size();
  if (n < 3) throw std::invalid_argument("canonical chain needs at least 3 blocks");
  CanonicalChain out;
  out.premise_locally_markov = n < 4 || is_locally_markov(sigma, tol).is_locally_markov;
  const Labels first = join({&sigma.blocks[0], &sigma.blocks[1]});
  DensityMatrix tau = marginal(sigma.state, first);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Labels to = join({&sigma.blocks[k], &sigma.blocks[k + 1]});
    const DensityMatrix ref = marginal(sigma.state, to);
    try {
      tau = apply_channel(petz_map(ref, sigma.blocks[k], to), tau);
    } catch (const SupportMismatchError& e) {
      throw SupportMismatchError("canonical chain step " + std::to_string(k + 2) + ": " + e.what());
    }
  }
  out.tau = tau.permuted(sigma.interval(0, n));
  return out;
}

SubsystemCheck verify_indistinguishability(const DensityMatrix& tau, const OrderedChain& sigma, double tol) {
  SubsystemCheck out;
  const std::size_t n = sigma.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      if (i == 0 && j == n) continue;
      const Labels l = sigma.interval(i, j);
      const double d = trace_distance(marginal(tau, l), marginal(sigma.state, l));
      std::string name = "X" + std::to_string(i + 1) + (j - i > 1 ? "-X" + std::to_string(j) : "");
      out.details.emplace_back(name, d);
      if (d >= out.max_deviation) {
        out.max_deviation = d;
        out.worst = name;
      }
    }
  }
  out.pass = out.max_deviation <= tol;
  return out;
}

MaxEntropyReport verify_max_entropy(const DensityMatrix& tau, const OrderedChain& sigma, const Tripartition& t,
                                    double tol) {
  if (!t.full_cover(sigma.size())) throw std::invalid_argument("max-entropy certificate needs a full cover");
  const Labels A = sigma.interval(t.a, t.b), B = sigma.interval(t.b, t.c), C = sigma.interval(t.c, t.d);
  const Labels AB = join({&A, &B}), BC = join({&B, &C});
  MaxEntropyReport r;
  r.marginal_ab = trace_distance(marginal(tau, AB), marginal(sigma.state, AB));
  r.marginal_bc = trace_distance(marginal(tau, BC), marginal(sigma.state, BC));
  r.cmi_tau = cmi(tau, A, B, C);
  r.entropy_tau = entropy(tau);
  r.entropy_sigma = entropy(sigma.state);
  r.pass = r.marginal_ab <= tol && r.marginal_bc <= tol && r.cmi_tau <= tol;
  return r;
}

LemmaReport entropy_difference_lemma_check(const DensityMatrix& rho, const DensityMatrix& rho_prime,
                                           const Labels& P, const Labels& Q, const QuantumChannel& R,
                                           const QuantumChannel& T, const LemmaTolerances& tol) {
  LemmaReport r;
  r.marginal_p = trace_distance(marginal(rho, P), marginal(rho_prime, P));
  r.marginal_q = trace_distance(marginal(rho, Q), marginal(rho_prime, Q));
  const DensityMatrix rr = apply_channel(R, rho);
  const DensityMatrix rr_prime = apply_channel(R, rho_prime);
  r.roundtrip_rho = trace_distance(apply_channel(T, rr), rho);
  r.roundtrip_rho_prime = trace_distance(apply_channel(T, rr_prime), rho_prime);
  r.premises_hold = r.marginal_p <= tol.premise_marginal && r.marginal_q <= tol.premise_marginal &&
                    r.roundtrip_rho <= tol.premise_roundtrip && r.roundtrip_rho_prime <= tol.premise_roundtrip;
  r.entropy_difference = entropy(rho) - entropy(rho_prime);
  r.recovered_entropy_difference = entropy(rr) - entropy(rr_prime);
  Labels q_hat;
  for (const auto& f : R.outputs) q_hat.push_back(f.label);
  r.mi_before = mutual_information(rho, P, Q);
  r.mi_after = mutual_information(rr, P, q_hat);
  r.conclusion_holds = std::abs(r.entropy_difference - r.recovered_entropy_difference) <= tol.conclusion;
  r.mi_identity_holds = std::abs(r.mi_before - r.mi_after) <= tol.conclusion;
  return r;
}

LocalGlobalReport local_to_global_check(const DensityMatrix& rho, const DensityMatrix& sigma, const Labels& A,
                                        const Labels& B, const Labels& C, double premise_tol, double tol) {
  LocalGlobalReport r;
  const Labels AB = join({&A, &B}), BC = join({&B, &C}), ABC = join({&A, &B, &C});
  r.cmi_rho = cmi(rho, A, B, C);
  r.cmi_sigma = cmi(sigma, A, B, C);
  r.marginal_ab = trace_distance(marginal(rho, AB), marginal(sigma, AB));
  r.marginal_bc = trace_distance(marginal(rho, BC), marginal(sigma, BC));
  r.applicable = r.cmi_rho <= premise_tol && r.cmi_sigma <= premise_tol && r.marginal_ab <= premise_tol &&
                 r.marginal_bc <= premise_tol;
  r.distance = trace_distance(marginal(rho, ABC), marginal(sigma, ABC));
  r.pass = r.applicable && r.distance <= tol;
  return r;
}

const char* to_string(Move m) {
  switch (m) {
    case Move::identical: return "identical";
    case Move::move1: return "move1";
    case Move::move2: return "move2";
  }
  return "?";
}

Move classify_move(const std::vector<Labels>& p, const std::vector<Labels>& q) {
  if (p.size() != 5 || q.size() != 5) throw std::invalid_argument("moves act on five-block partitions");
  std::vector<std::set<std::string>> a, b;
  for (const auto& x : p) {
    if (x.empty()) throw GeometryError("partition has an empty block");
    a.push_back(as_set(x));
  }
  for (const auto& x : q) {
    if (x.empty()) throw GeometryError("partition has an empty block");
    b.push_back(as_set(x));
  }
  const auto uni = [](const std::vector<std::set<std::string>>& v, std::size_t i, std::size_t j) {
    std::set<std::string> s;
    for (std::size_t k = i; k < j; ++k) s.insert(v[k].begin(), v[k].end());
    return s;
  };
  if (uni(a, 0, 5) != uni(b, 0, 5)) throw GeometryError("partitions cover different subsystems");
  if (a == b) return Move::identical;
  if (uni(a, 0, 2) == uni(b, 0, 2) && a[2] == b[2] && uni(a, 3, 5) == uni(b, 3, 5)) return Move::move1;
  if (a[0] == b[0] && a[4] == b[4] && uni(a, 1, 4) == uni(b, 1, 4)) return Move::move2;
  for (std::size_t i = 1; i < 5; ++i) {
    if (uni(a, 0, i) != uni(b, 0, i)) {
      throw GeometryError("partitions not move-related: boundary X" + std::to_string(i) + "|X" +
                          std::to_string(i + 1) + " differs");
    }
  }
  throw GeometryError("partitions not move-related");
}

MovesReport moves_invariance_check(const DensityMatrix& sigma, const std::vector<Labels>& p,
                                   const std::vector<Labels>& q, double tol) {
  MovesReport r;
  r.move = classify_move(p, q);
  const auto tp = canonical_markov_chain(OrderedChain(sigma, p)).tau;
  const auto tq = canonical_markov_chain(OrderedChain(sigma, q)).tau;
  r.distance = trace_distance(tp, tq);
  r.pass = r.distance <= tol;
  return r;
}

}  // namespace teebound
