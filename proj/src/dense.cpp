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

#include "teebound/dense.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "teebound/errors.hpp"

namespace teebound {

namespace {

using cd = std::complex<double>;

long product_of_dims(const std::vector<Factor>& f) {
  long d = 1;
  for (const auto& x : f) d *= x.dim;
  return d;
}

// For each index in `to` order, the index in `from` order. `perm[j]` is the
// position in `from` of the j-th factor of `to`.
std::vector<Eigen::Index> index_map(const std::vector<Factor>& from, const std::vector<std::size_t>& perm) {
  const std::size_t m = from.size();
  std::vector<long> from_stride(m);
  long s = 1;
  for (std::size_t i = m; i-- > 0;) {
    from_stride[i] = s;
    s *= from[i].dim;
  }
  std::vector<Eigen::Index> map(static_cast<std::size_t>(s));
  std::vector<int> digits(m, 0);
  for (long idx = 0; idx < s; ++idx) {
    long old = 0;
    for (std::size_t j = 0; j < m; ++j) old += digits[j] * from_stride[perm[j]];
    map[static_cast<std::size_t>(idx)] = old;
    for (std::size_t j = m; j-- > 0;) {
      if (++digits[j] < from[perm[j]].dim) break;
      digits[j] = 0;
    }
  }
  return map;
}

void check_disjoint(const std::vector<std::vector<std::string>>& sets) {
  std::set<std::string> seen;
  for (const auto& s : sets)
    for (const auto& l : s)
      if (!seen.insert(l).second) throw std::invalid_argument("label sets overlap at '" + l + "'");
}

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

std::string qubit_label(int q) { return "q" + std::to_string(q); }

std::vector<std::string> qubit_labels(const Region& r) {
  std::vector<std::string> out;
  for (int q : r.qubits()) out.push_back(qubit_label(q));
  return out;
}

std::vector<Factor> qubit_factors(const std::vector<std::string>& labels) {
  std::vector<Factor> out;
  for (const auto& l : labels) out.push_back({l, 2});
  return out;
}

std::vector<Factor> qubit_factors(const Region& r) { return qubit_factors(qubit_labels(r)); }

DensityMatrix::DensityMatrix(std::vector<Factor> factors, Eigen::MatrixXcd m)
    : factors_(std::move(factors)), m_(std::move(m)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim < 1) throw std::invalid_argument("factor '" + f.label + "' has non-positive dimension");
    if (!seen.insert(f.label).second) throw std::invalid_argument("duplicate factor label '" + f.label + "'");
  }
  const long d = product_of_dims(factors_);
  if (m_.rows() != d || m_.cols() != d) throw std::invalid_argument("matrix size does not match factor dimensions");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NumericalError("density matrix is not Hermitian");
  }
  if (std::abs(m_.trace() - cd(1.0)) > 1e-10) throw NumericalError("density matrix trace differs from 1");
}

DensityMatrix DensityMatrix::pure(std::vector<Factor> factors, const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd v = psi / psi.norm();
  return DensityMatrix(std::move(factors), hermitian_part(v * v.adjoint()));
}

DensityMatrix DensityMatrix::maximally_mixed(std::vector<Factor> factors) {
  const long d = product_of_dims(factors);
  return DensityMatrix(std::move(factors), Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
}

std::vector<std::string> DensityMatrix::labels() const {
  std::vector<std::string> out;
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

bool DensityMatrix::has_label(const std::string& l) const {
  return std::any_of(factors_.begin(), factors_.end(), [&](const Factor& f) { return f.label == l; });
}

std::size_t DensityMatrix::index_of(const std::string& l) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label == l) return i;
  throw std::invalid_argument("unknown factor label '" + l + "'");
}

int DensityMatrix::dim_of(const std::vector<std::string>& labels) const {
  int d = 1;
  for (const auto& l : labels) d *= factors_[index_of(l)].dim;
  return d;
}

DensityMatrix DensityMatrix::permuted(const std::vector<std::string>& order) const {
  if (order.size() != factors_.size()) throw std::invalid_argument("permutation must list every factor");
  std::vector<std::size_t> perm;
  std::vector<Factor> nf;
  for (const auto& l : order) {
    perm.push_back(index_of(l));
    nf.push_back(factors_[perm.back()]);
  }
  if (std::set<std::size_t>(perm.begin(), perm.end()).size() != perm.size()) {
    throw std::invalid_argument("permutation repeats a factor");
  }
  std::vector<std::size_t> id(perm.size());
  std::iota(id.begin(), id.end(), 0);
  if (perm == id) return *this;
  const auto map = index_map(factors_, perm);
  const Eigen::Index d = dim();
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) out(i, j) = m_(map[i], map[j]);
  DensityMatrix r;
  r.factors_ = std::move(nf);
  r.m_ = std::move(out);
  return r;
}

double DensityMatrix::check_positive(double tol) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -tol) throw NumericalError("density matrix has eigenvalue " + std::to_string(lmin));
  return lmin;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  std::set<std::string> keep_set(keep.begin(), keep.end());
  if (keep_set.size() != keep.size()) throw std::invalid_argument("keep list repeats a label");
  for (const auto& l : keep) rho.index_of(l);
  if (keep.size() == rho.factors().size()) return rho;
  const auto& f = rho.factors();
  std::vector<std::size_t> perm;
  std::vector<Factor> kept;
  long dk = 1;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (keep_set.count(f[i].label)) {
      perm.push_back(i);
      kept.push_back(f[i]);
      dk *= f[i].dim;
    }
  }
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!keep_set.count(f[i].label)) perm.push_back(i);
  const long dt = rho.dim() / dk;
  const auto map = index_map(f, perm);
  const auto& m = rho.matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (long t = 0; t < dt; ++t) {
    for (long j = 0; j < dk; ++j) {
      const Eigen::Index cj = map[static_cast<std::size_t>(j * dt + t)];
      for (long i = 0; i < dk; ++i) out(i, j) += m(map[static_cast<std::size_t>(i * dt + t)], cj);
    }
  }
  return DensityMatrix(std::move(kept), hermitian_part(out));
}

DensityMatrix marginal(const DensityMatrix& rho, const std::vector<std::string>& labels) {
  return partial_trace(rho, labels).permuted(labels);
}

double entropy(const DensityMatrix& rho, double cutoff) {
  return std::max(0.0, von_neumann_entropy(rho.matrix(), cutoff));
}

double entropy(const DensityMatrix& rho, const std::vector<std::string>& labels, double cutoff) {
  if (labels.empty()) return 0.0;
  return entropy(partial_trace(rho, labels), cutoff);
}

double cmi(const DensityMatrix& rho, const std::vector<std::string>& A,
           const std::vector<std::string>& B, const std::vector<std::string>& C) {
  check_disjoint({A, B, C});
  return entropy(rho, concat({A, B})) + entropy(rho, concat({B, C})) - entropy(rho, B) -
         entropy(rho, concat({A, B, C}));
}

double mutual_information(const DensityMatrix& rho, const std::vector<std::string>& A,
                          const std::vector<std::string>& B) {
  check_disjoint({A, B});
  return entropy(rho, A) + entropy(rho, B) - entropy(rho, concat({A, B}));
}

namespace {

const DensityMatrix& aligned(const DensityMatrix& a, const DensityMatrix& b, DensityMatrix& storage) {
  if (a.factors().size() != b.factors().size()) throw std::invalid_argument("states have different factors");
  if (a.labels() == b.labels()) {
    if (a.factors() != b.factors()) throw std::invalid_argument("factor dimensions differ");
    return b;
  }
  storage = b.permuted(a.labels());
  if (storage.factors() != a.factors()) throw std::invalid_argument("factor dimensions differ");
  return storage;
}

}  // namespace

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  DensityMatrix tmp;
  const auto& bb = aligned(a, b, tmp);
  const Eigen::MatrixXcd diff = a.matrix() - bb.matrix();
  return 0.5 * hermitian_trace_norm(hermitian_part(diff));
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  DensityMatrix tmp;
  const auto& bb = aligned(a, b, tmp);
  const Eigen::MatrixXcd sa = hermitian_power(a.matrix(), 0.5, 0.0);
  const Eigen::MatrixXcd inner = hermitian_part(sa * bb.matrix() * sa);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inner, Eigen::EigenvaluesOnly);
  double s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return std::min(1.0, s * s);
}

DensityMatrix mix(const std::vector<DensityMatrix>& states, const std::vector<double>& probs) {
  if (states.empty() || states.size() != probs.size()) throw std::invalid_argument("mix needs one probability per state");
  double total = 0;
  for (double p : probs) {
    if (p < 0) throw std::invalid_argument("negative mixture probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture probabilities do not sum to 1");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(states[0].dim(), states[0].dim());
  DensityMatrix tmp;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (probs[i] == 0) continue;
    m += probs[i] * aligned(states[0], states[i], tmp).matrix();
  }
  return DensityMatrix(states[0].factors(), hermitian_part(m));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  auto f = a.factors();
  f.insert(f.end(), b.factors().begin(), b.factors().end());
  return DensityMatrix(std::move(f), hermitian_part(kron(a.matrix(), b.matrix())));
}

DensityMatrix random_density_matrix(std::vector<Factor> factors, int rank, std::uint64_t seed) {
  const long d = product_of_dims(factors);
  if (rank < 1 || rank > d) throw std::invalid_argument("rank out of range");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd g(d, rank);
  for (long j = 0; j < rank; ++j)
    for (long i = 0; i < d; ++i) g(i, j) = cd(normal(rng), normal(rng));
  Eigen::MatrixXcd m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix(std::move(factors), hermitian_part(m));
}

double QuantumChannel::completeness_error() const {
  const long din = product_of_dims(inputs);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(din, din);
  for (const auto& k : kraus) s += k.adjoint() * k;
  const Eigen::MatrixXcd p = input_support ? *input_support : Eigen::MatrixXcd::Identity(din, din);
  if (input_support) s = p * s * p;
  return (s - p).cwiseAbs().maxCoeff();
}

QuantumChannel identity_channel(std::vector<Factor> factors) {
  const long d = product_of_dims(factors);
  return QuantumChannel{"identity", factors, factors, {Eigen::MatrixXcd::Identity(d, d)}, std::nullopt};
}

QuantumChannel unitary_channel(std::vector<Factor> factors, const Eigen::MatrixXcd& u) {
  const long d = product_of_dims(factors);
  if (u.rows() != d || u.cols() != d) throw std::invalid_argument("unitary has wrong size");
  return QuantumChannel{"unitary", factors, factors, {u}, std::nullopt};
}

QuantumChannel partial_trace_channel(std::vector<Factor> inputs, const std::vector<std::string>& keep) {
  std::set<std::string> keep_set(keep.begin(), keep.end());
  std::vector<std::size_t> perm;
  std::vector<Factor> out;
  long dk = 1;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (keep_set.count(inputs[i].label)) {
      perm.push_back(i);
      out.push_back(inputs[i]);
      dk *= inputs[i].dim;
    }
  }
  if (out.size() != keep_set.size()) throw std::invalid_argument("keep label missing from channel inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (!keep_set.count(inputs[i].label)) perm.push_back(i);
  const long din = product_of_dims(inputs);
  const long dt = din / dk;
  const auto map = index_map(inputs, perm);
  std::vector<Eigen::MatrixXcd> kraus;
  for (long t = 0; t < dt; ++t) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(dk, din);
    for (long i = 0; i < dk; ++i) k(i, map[static_cast<std::size_t>(i * dt + t)]) = 1.0;
    kraus.push_back(std::move(k));
  }
  return QuantumChannel{"partial_trace", std::move(inputs), std::move(out), std::move(kraus), std::nullopt};
}

QuantumChannel isometry_channel(std::vector<Factor> inputs, std::vector<Factor> outputs,
                                const Eigen::MatrixXcd& v) {
  if (v.rows() != product_of_dims(outputs) || v.cols() != product_of_dims(inputs)) {
    throw std::invalid_argument("isometry has wrong shape");
  }
  if ((v.adjoint() * v - Eigen::MatrixXcd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("matrix is not an isometry");
  }
  return QuantumChannel{"isometry", std::move(inputs), std::move(outputs), {v}, std::nullopt};
}

QuantumChannel isometry_reversal(std::vector<Factor> inputs, std::vector<Factor> outputs,
                                 const Eigen::MatrixXcd& v) {
  // Kraus: V^dagger, plus |0><f_i| for an orthonormal basis f_i of range(V)^perp.
  QuantumChannel ch{"isometry_reversal", std::move(outputs), std::move(inputs), {v.adjoint()}, std::nullopt};
  const Eigen::MatrixXcd comp = Eigen::MatrixXcd::Identity(v.rows(), v.rows()) - v * v.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(comp));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) < 0.5) continue;
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(v.cols(), v.rows());
    k.row(0) = es.eigenvectors().col(i).adjoint();
    ch.kraus.push_back(std::move(k));
  }
  return ch;
}

QuantumChannel petz_map(const DensityMatrix& reference, const std::vector<std::string>& from,
                        const std::vector<std::string>& to, const DenseTolerances& tol) {
  std::set<std::string> to_set(to.begin(), to.end());
  std::vector<std::string> added;
  for (const auto& l : from)
    if (!to_set.count(l)) throw std::invalid_argument("Petz source label '" + l + "' missing from target");
  std::set<std::string> from_set(from.begin(), from.end());
  for (const auto& l : to)
    if (!from_set.count(l)) added.push_back(l);
  std::vector<std::string> order = from;
  order.insert(order.end(), added.begin(), added.end());
  const DensityMatrix ref = marginal(reference, order);
  const DensityMatrix ref_b = marginal(reference, from);
  const long db = ref_b.dim();
  const long dc = ref.dim() / db;
  const Eigen::MatrixXcd sqrt_bc = hermitian_power(ref.matrix(), 0.5, 0.0);
  const Eigen::MatrixXcd inv_sqrt_b = hermitian_power(ref_b.matrix(), -0.5, tol.pinv_threshold);
  // K = rho_BC^{1/2} (rho_B^{-1/2} (x) 1_C); Kraus K_c = K (1_B (x) |c>).
  const Eigen::MatrixXcd k = sqrt_bc * kron(inv_sqrt_b, Eigen::MatrixXcd::Identity(dc, dc));
  std::vector<Eigen::MatrixXcd> kraus;
  for (long c = 0; c < dc; ++c) {
    Eigen::MatrixXcd kc(k.rows(), db);
    for (long b = 0; b < db; ++b) kc.col(b) = k.col(b * dc + c);
    kraus.push_back(std::move(kc));
  }
  QuantumChannel ch;
  ch.name = "petz";
  ch.inputs = ref_b.factors();
  ch.outputs = ref.factors();
  ch.kraus = std::move(kraus);
  ch.input_support = support_projector(ref_b.matrix(), tol.pinv_threshold);
  return ch;
}

QuantumChannel compose(const QuantumChannel& first, const QuantumChannel& second) {
  std::vector<std::size_t> perm;
  std::set<std::size_t> used;
  for (const auto& f : second.inputs) {
    const auto it = std::find_if(first.outputs.begin(), first.outputs.end(),
                                 [&](const Factor& g) { return g.label == f.label; });
    if (it == first.outputs.end() || it->dim != f.dim) {
      throw std::invalid_argument("compose: '" + f.label + "' is not an output of " + first.name);
    }
    perm.push_back(static_cast<std::size_t>(it - first.outputs.begin()));
    used.insert(perm.back());
  }
  std::vector<Factor> outputs = second.outputs;
  long d_rest = 1;
  for (std::size_t i = 0; i < first.outputs.size(); ++i) {
    if (used.count(i)) continue;
    for (const auto& f : second.outputs)
      if (f.label == first.outputs[i].label) throw std::invalid_argument("compose: output '" + f.label + "' clashes");
    perm.push_back(i);
    outputs.push_back(first.outputs[i]);
    d_rest *= first.outputs[i].dim;
  }
  const auto map = index_map(first.outputs, perm);
  const long dmid = product_of_dims(first.outputs);
  Eigen::MatrixXcd pm = Eigen::MatrixXcd::Zero(dmid, dmid);
  for (long i = 0; i < dmid; ++i) pm(i, map[static_cast<std::size_t>(i)]) = 1.0;
  const Eigen::MatrixXcd id_rest = Eigen::MatrixXcd::Identity(d_rest, d_rest);
  QuantumChannel out{second.name + "*" + first.name, first.inputs, std::move(outputs), {}, first.input_support};
  for (const auto& k2 : second.kraus) {
    const Eigen::MatrixXcd k2e = kron(k2, id_rest) * pm;
    for (const auto& k1 : first.kraus) {
      Eigen::MatrixXcd k = k2e * k1;
      if (k.cwiseAbs().maxCoeff() > 1e-14) out.kraus.push_back(std::move(k));
    }
  }
  return out;
}

Eigen::MatrixXcd circuit_unitary(const Circuit& circuit, const std::vector<int>& qubits) {
  const int n = static_cast<int>(qubits.size());
  const long d = 1L << n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
  for (const auto& layer : circuit.layers()) {
    for (const auto& g : layer) {
      std::vector<int> shift;
      for (int q : g.support) {
        const auto it = std::find(qubits.begin(), qubits.end(), q);
        if (it == qubits.end()) throw std::invalid_argument("gate acts on qubit " + std::to_string(q) + " outside the list");
        shift.push_back(n - 1 - static_cast<int>(it - qubits.begin()));
      }
      const Eigen::MatrixXcd gu = g.unitary();
      const long k = gu.rows();
      long mask = 0;
      for (int s : shift) mask |= 1L << s;
      std::vector<long> offsets(static_cast<std::size_t>(k), 0);
      for (long s = 0; s < k; ++s)
        for (std::size_t j = 0; j < shift.size(); ++j)
          if ((s >> (shift.size() - 1 - j)) & 1) offsets[static_cast<std::size_t>(s)] |= 1L << shift[j];
      Eigen::MatrixXcd next(d, d);
      for (long base = 0; base < d; ++base) {
        if (base & mask) continue;
        for (long a = 0; a < k; ++a) {
          Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(d);
          for (long b = 0; b < k; ++b) row += gu(a, b) * u.row(base | offsets[static_cast<std::size_t>(b)]);
          next.row(base | offsets[static_cast<std::size_t>(a)]) = row;
        }
      }
      u = std::move(next);
    }
  }
  return u;
}

DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& rho,
                            const DenseTolerances& tol, int dense_limit) {
  std::vector<std::string> in_labels;
  for (const auto& f : ch.inputs) {
    const auto& g = rho.factors()[rho.index_of(f.label)];
    if (g.dim != f.dim) throw std::invalid_argument("channel input '" + f.label + "' has wrong dimension");
    in_labels.push_back(f.label);
  }
  std::set<std::string> in_set(in_labels.begin(), in_labels.end());
  std::vector<std::string> rest;
  std::vector<Factor> out_factors;
  for (const auto& f : rho.factors()) {
    if (!in_set.count(f.label)) {
      rest.push_back(f.label);
      out_factors.push_back(f);
    }
  }
  for (const auto& f : ch.outputs) {
    if (std::find(rest.begin(), rest.end(), f.label) != rest.end()) {
      throw std::invalid_argument("channel output '" + f.label + "' clashes with an untouched factor");
    }
    out_factors.push_back(f);
  }
  const long dout_total = product_of_dims(out_factors);
  if (dout_total > (1L << dense_limit)) {
    throw ResourceError("channel output exceeds the dense limit of " + std::to_string(dense_limit) + " qubits");
  }
  if (ch.input_support) {
    const DensityMatrix in = marginal(rho, in_labels);
    const long d = in.dim();
    const double outside =
        std::real((Eigen::MatrixXcd::Identity(d, d) - *ch.input_support).cwiseProduct(in.matrix().transpose()).sum());
    if (outside > tol.support_tolerance) {
      throw SupportMismatchError(ch.name + " map input has weight " + std::to_string(outside) +
                                 " outside the reference support");
    }
  }
  std::vector<std::string> order = rest;
  order.insert(order.end(), in_labels.begin(), in_labels.end());
  const DensityMatrix r = rho.permuted(order);
  const long din = product_of_dims(ch.inputs);
  const long dout = product_of_dims(ch.outputs);
  const long dr = r.dim() / din;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dr * dout, dr * dout);
  Eigen::MatrixXcd m = r.matrix();
  for (const auto& k : ch.kraus) {
    // (1_R (x) K) M, with M viewed as din x (dr * cols) in column-major order.
    Eigen::MatrixXcd left(dout, dr * m.cols());
    left.noalias() = k * Eigen::Map<const Eigen::MatrixXcd>(m.data(), din, dr * m.cols());
    Eigen::MatrixXcd lt = Eigen::Map<const Eigen::MatrixXcd>(left.data(), dr * dout, m.cols()).adjoint();
    Eigen::MatrixXcd both(dout, dr * lt.cols());
    both.noalias() = k * Eigen::Map<const Eigen::MatrixXcd>(lt.data(), din, dr * lt.cols());
    acc += Eigen::Map<const Eigen::MatrixXcd>(both.data(), dr * dout, dr * dout).adjoint();
  }
  acc = hermitian_part(acc);
  const double tr = acc.trace().real();
  if (std::abs(tr - 1.0) > tol.trace_drift) {
    throw NumericalError(ch.name + " map changed the trace to " + std::to_string(tr));
  }
  acc /= tr;
  return DensityMatrix(std::move(out_factors), std::move(acc));
}

DensityMatrix apply_local_unitary(const DensityMatrix& rho, const std::vector<std::string>& labels,
                                  const Eigen::MatrixXcd& u) {
  std::vector<Factor> f;
  for (const auto& l : labels) f.push_back(rho.factors()[rho.index_of(l)]);
  const auto order = rho.labels();
  return apply_channel(unitary_channel(f, u), rho, {}, 62).permuted(order);
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Circuit& circuit) {
  DensityMatrix out = rho;
  for (const auto& layer : circuit.layers()) {
    for (const auto& g : layer) {
      std::vector<std::string> labels;
      for (int q : g.support) {
        labels.push_back(qubit_label(q));
        if (!rho.has_label(labels.back())) {
          throw std::invalid_argument("circuit acts on qubit " + std::to_string(q) + " outside the state");
        }
      }
      out = apply_local_unitary(out, labels, g.unitary());
    }
  }
  return out;
}

void save_binary(const DensityMatrix& rho, const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "binary format assumes little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::uint64_t n = rho.factors().size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (const auto& f : rho.factors()) {
    const std::uint64_t d = static_cast<std::uint64_t>(f.dim);
    out.write(reinterpret_cast<const char*>(&d), sizeof d);
  }
  const auto& m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real(), im = m(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  }
  std::ofstream labels(path + ".labels");
  for (const auto& f : rho.factors()) labels << f.label << '\n';
}

DensityMatrix load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n > 64) throw ConfigError(path + ": bad factor count");
  std::vector<Factor> f;
  long d = 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t di = 0;
    in.read(reinterpret_cast<char*>(&di), sizeof di);
    if (!in || di == 0 || di > 4096) throw ConfigError(path + ": bad factor dimension");
    f.push_back({"f" + std::to_string(i), static_cast<int>(di)});
    d *= static_cast<long>(di);
    if (d > 4096) throw ResourceError(path + ": state exceeds the dense limit");
  }
  std::ifstream labels(path + ".labels");
  std::string l;
  for (std::size_t i = 0; labels && i < f.size() && std::getline(labels, l); ++i) f[i].label = l;
  Eigen::MatrixXcd m(d, d);
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), sizeof re);
      in.read(reinterpret_cast<char*>(&im), sizeof im);
      m(i, j) = cd(re, im);
    }
  }
  if (!in) throw ConfigError(path + ": truncated matrix data");
  return DensityMatrix(std::move(f), std::move(m));
}

}  // namespace teebound
