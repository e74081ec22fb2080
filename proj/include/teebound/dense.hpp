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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "teebound/circuits.hpp"
#include "teebound/lattice.hpp"

namespace teebound {

inline constexpr int kDefaultDenseLimit = 12;

/// Numerical knobs of the dense engine.
struct DenseTolerances {
  double entropy_cutoff = 1e-12;
  double pinv_threshold = 1e-10;  // relative to the largest eigenvalue
  double support_tolerance = 1e-8;
  double trace_drift = 1e-8;
};

// Scalar-generic helpers ------------------------------------------------------

template <typename A, typename B>
Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                                        a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <typename Derived>
typename Derived::PlainObject hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / typename Derived::RealScalar(2);
}

/// -sum l log l over eigenvalues above the cutoff (nats).
template <typename Derived>
typename Derived::RealScalar von_neumann_entropy(const Eigen::MatrixBase<Derived>& m,
                                                 typename Derived::RealScalar cutoff = 1e-12) {
  using Real = typename Derived::RealScalar;
  Eigen::SelfAdjointEigenSolver<typename Derived::PlainObject> es(m, Eigen::EigenvaluesOnly);
  Real s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Real l = es.eigenvalues()(i);
    if (l > cutoff) s -= l * std::log(l);
  }
  return s;
}

/// m^p on the eigenvalues above rel_threshold * max eigenvalue, zero elsewhere.
template <typename Derived>
typename Derived::PlainObject hermitian_power(const Eigen::MatrixBase<Derived>& m,
                                              typename Derived::RealScalar p,
                                              typename Derived::RealScalar rel_threshold = 1e-10) {
  using Real = typename Derived::RealScalar;
  Eigen::SelfAdjointEigenSolver<typename Derived::PlainObject> es(m);
  const auto& ev = es.eigenvalues();
  const Real lmax = ev.size() ? ev.maxCoeff() : Real(0);
  Eigen::Matrix<Real, Eigen::Dynamic, 1> f(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    f(i) = ev(i) > rel_threshold * lmax && ev(i) > 0 ? std::pow(ev(i), p) : Real(0);
  }
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

/// Projector onto eigenvectors with eigenvalue above rel_threshold * max eigenvalue.
template <typename Derived>
typename Derived::PlainObject support_projector(const Eigen::MatrixBase<Derived>& m,
                                                typename Derived::RealScalar rel_threshold = 1e-10) {
  return hermitian_power(m, typename Derived::RealScalar(0), rel_threshold);
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
template <typename Derived>
typename Derived::RealScalar hermitian_trace_norm(const Eigen::MatrixBase<Derived>& m) {
  Eigen::SelfAdjointEigenSolver<typename Derived::PlainObject> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// Labelled density matrices ---------------------------------------------------

struct Factor {
  std::string label;
  int dim = 2;
  bool operator==(const Factor&) const = default;
};

std::string qubit_label(int q);
std::vector<std::string> qubit_labels(const Region& r);
std::vector<Factor> qubit_factors(const std::vector<std::string>& labels);
std::vector<Factor> qubit_factors(const Region& r);

/// Density operator on an ordered list of labelled factors; the first factor
/// is the most significant in the matrix index.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(std::vector<Factor> factors, Eigen::MatrixXcd m);

  static DensityMatrix pure(std::vector<Factor> factors, const Eigen::VectorXcd& psi);
  static DensityMatrix maximally_mixed(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  std::vector<std::string> labels() const;
  const Eigen::MatrixXcd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  bool has_label(const std::string& l) const;
  std::size_t index_of(const std::string& l) const;
  int dim_of(const std::vector<std::string>& labels) const;

  /// Same state with factors in the given order (a permutation of labels()).
  DensityMatrix permuted(const std::vector<std::string>& order) const;

  /// Smallest eigenvalue; throws NumericalError when below -tol.
  double check_positive(double tol = 1e-10) const;

 private:
  std::vector<Factor> factors_;
  Eigen::MatrixXcd m_;
};

/// Keeps the listed factors in the state's own order.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);
/// Reduced state with factors in the order given.
DensityMatrix marginal(const DensityMatrix& rho, const std::vector<std::string>& labels);

double entropy(const DensityMatrix& rho, double cutoff = 1e-12);
double entropy(const DensityMatrix& rho, const std::vector<std::string>& labels,
               double cutoff = 1e-12);
double cmi(const DensityMatrix& rho, const std::vector<std::string>& A,
           const std::vector<std::string>& B, const std::vector<std::string>& C);
double mutual_information(const DensityMatrix& rho, const std::vector<std::string>& A,
                          const std::vector<std::string>& B);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

DensityMatrix mix(const std::vector<DensityMatrix>& states, const std::vector<double>& probs);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Random state of the given rank from a Ginibre matrix (rank = dim gives the
/// Hilbert-Schmidt measure, rank 1 a Haar pure state).
DensityMatrix random_density_matrix(std::vector<Factor> factors, int rank, std::uint64_t seed);

/// Applies every gate of the circuit; gate qubit q acts on factor qubit_label(q).
DensityMatrix apply_unitary(const DensityMatrix& rho, const Circuit& circuit);
DensityMatrix apply_local_unitary(const DensityMatrix& rho, const std::vector<std::string>& labels,
                                  const Eigen::MatrixXcd& u);

/// X -> sum_k K_k X K_k^dagger from the input factors to the output factors.
struct QuantumChannel {
  std::string name;
  std::vector<Factor> inputs;
  std::vector<Factor> outputs;
  std::vector<Eigen::MatrixXcd> kraus;
  /// When set, inputs with weight outside this projector are rejected.
  std::optional<Eigen::MatrixXcd> input_support;

  /// || sum K^dagger K - P ||, with P the input support (or identity).
  double completeness_error() const;
};

QuantumChannel identity_channel(std::vector<Factor> factors);
QuantumChannel unitary_channel(std::vector<Factor> factors, const Eigen::MatrixXcd& u);
/// Traces out every input factor not listed in `keep`.
QuantumChannel partial_trace_channel(std::vector<Factor> inputs, const std::vector<std::string>& keep);
/// X -> V X V^dagger for an isometry V from inputs to outputs.
QuantumChannel isometry_channel(std::vector<Factor> inputs, std::vector<Factor> outputs,
                                const Eigen::MatrixXcd& v);
/// Channel reversing an isometry: X -> V^dagger X V + Tr[(1 - V V^dagger) X] omega.
QuantumChannel isometry_reversal(std::vector<Factor> inputs, std::vector<Factor> outputs,
                                 const Eigen::MatrixXcd& v);

/// Petz map B -> BC of a reference state on BC:
/// X -> rho_BC^{1/2} (rho_B^{-1/2} X rho_B^{-1/2} (x) 1_C) rho_BC^{1/2}.
QuantumChannel petz_map(const DensityMatrix& reference, const std::vector<std::string>& from,
                        const std::vector<std::string>& to, const DenseTolerances& tol = {});

/// `second` after `first`; second's inputs must be among first's outputs and
/// the remaining outputs of first pass through.
QuantumChannel compose(const QuantumChannel& first, const QuantumChannel& second);

/// Unitary of a circuit on the listed qubits (first qubit most significant).
Eigen::MatrixXcd circuit_unitary(const Circuit& circuit, const std::vector<int>& qubits);

DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& rho,
                            const DenseTolerances& tol = {}, int dense_limit = kDefaultDenseLimit);

/// Binary format: uint64 factor count, uint64 dims, then row-major complex128,
/// all little-endian. Labels go to a "<path>.labels" sidecar (one per line);
/// without it factors load as f0, f1, ...
void save_binary(const DensityMatrix& rho, const std::string& path);
DensityMatrix load_binary(const std::string& path);

}  // namespace teebound
