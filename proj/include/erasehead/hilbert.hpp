// Copyright 2026 The Erasehead Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Composite Hilbert spaces built from two-level elements and one truncated
// bosonic mode, plus the operator and state values living on them.
//
// Basis ordering: the first mode is the most significant digit of the
// composite index, i.e. the composite space is modes[0] (x) modes[1] (x) ...
// and index = sum_k occupation_k * stride_k with stride_k the product of the
// dimensions of the modes after k.

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace erasehead {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

enum class ModeKind { WorkingQubit, HeadQubit, Coupler, Resonator };

std::string_view to_string(ModeKind kind);

struct ModeSpec {
  std::string label;
  ModeKind kind = ModeKind::WorkingQubit;
  int dimension = 2;

  static ModeSpec two_level(std::string label, ModeKind kind) {
    return ModeSpec{std::move(label), kind, 2};
  }
  static ModeSpec resonator(std::string label, int fock_cutoff) {
    return ModeSpec{std::move(label), ModeKind::Resonator, fock_cutoff + 1};
  }
};

/// Ordered tensor product of modes. Immutable after construction.
class CompositeSpace {
 public:
  /// Throws InvalidModeError on bad dimensions or duplicate labels.
  explicit CompositeSpace(std::vector<ModeSpec> modes);

  const std::vector<ModeSpec>& modes() const { return modes_; }
  std::size_t num_modes() const { return modes_.size(); }
  Index total_dimension() const { return total_dimension_; }

  bool contains(std::string_view label) const;
  /// Position of `label` in the mode list; throws LookupError.
  std::size_t position(std::string_view label) const;
  const ModeSpec& mode(std::string_view label) const { return modes_[position(label)]; }
  Index stride(std::size_t position) const { return strides_[position]; }

  /// Occupation tuple of a composite basis index.
  std::vector<int> occupations(Index index) const;
  /// Composite basis index of an occupation tuple (one entry per mode).
  Index basis_index(std::span<const int> occupations) const;
  /// Composite index for a sparse label -> occupation map; unlisted modes are 0.
  Index basis_index(const std::map<std::string, int>& occupations) const;

 private:
  std::vector<ModeSpec> modes_;
  std::vector<Index> strides_;
  Index total_dimension_ = 1;
};

using SpacePtr = std::shared_ptr<const CompositeSpace>;

/// Square complex matrix acting on a composite space.
class Operator {
 public:
  Operator(SpacePtr space, SparseMatrix matrix);
  static Operator zero(SpacePtr space);
  static Operator identity(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  const CompositeSpace& composite() const { return *space_; }
  const SparseMatrix& matrix() const { return matrix_; }
  DenseMatrix dense() const { return DenseMatrix(matrix_); }
  Index dimension() const { return matrix_.rows(); }

  Operator adjoint() const;
  /// max |M - M^dagger| over all entries.
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() < tol; }

  Vector apply(const Vector& v) const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(cplx scale);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  void require_same_space(const Operator& other) const;

  SpacePtr space_;
  SparseMatrix matrix_;
};

Operator commutator(const Operator& a, const Operator& b);
/// max |entry| of a sparse matrix (0 for an empty matrix).
double max_abs(const SparseMatrix& m);

/// Unit-norm amplitude vector. The norm is checked to 1e-10 on construction.
class StateVector {
 public:
  explicit StateVector(Vector amplitudes);
  /// Normalizes first; throws ShapeError for a zero vector.
  static StateVector normalized(Vector amplitudes);
  static StateVector basis(Index dimension, Index index);

  const Vector& amplitudes() const { return amplitudes_; }
  Index dimension() const { return amplitudes_.size(); }

 private:
  Vector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix (checked on construction).
class DensityMatrix {
 public:
  explicit DensityMatrix(DenseMatrix matrix);
  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(Index dimension);

  const DenseMatrix& matrix() const { return matrix_; }
  Index dimension() const { return matrix_.rows(); }
  double purity() const;
  double min_eigenvalue() const;

 private:
  DenseMatrix matrix_;
};

/// Bosonic lowering operator truncated to `dimension` levels; sigma^- for d = 2.
SparseMatrix lowering_operator(int dimension);
SparseMatrix raising_operator(int dimension);

/// Kronecker embedding of a single-mode operator with identities elsewhere.
Operator embed(const SparseMatrix& local, std::string_view mode_label, const SpacePtr& space);

/// Kronecker product of one local state per mode, in mode order.
StateVector tensor_state(std::span<const Vector> locals, const CompositeSpace& space);

/// Occupation-basis state with the listed modes excited (others in ground).
StateVector basis_state(const std::map<std::string, int>& occupations, const CompositeSpace& space);

Operator number_operator(std::string_view mode_label, const SpacePtr& space);
/// Sum of number operators over every mode.
Operator total_excitation_operator(const SpacePtr& space);

/// Subspace spanned by occupation basis states with total excitation <= n_max.
class ExcitationSector {
 public:
  ExcitationSector(SpacePtr space, int n_max);

  const SpacePtr& space() const { return space_; }
  int n_max() const { return n_max_; }
  Index dimension() const { return static_cast<Index>(basis_.size()); }
  /// Composite indices of the sector basis, ascending.
  const std::vector<Index>& basis() const { return basis_; }

  /// Orthogonal projector on the full space.
  Operator projector() const;
  /// Full-dimension x sector-dimension isometry V with V^dagger V = 1.
  SparseMatrix isometry() const;

  SparseMatrix restrict(const SparseMatrix& full) const;
  SparseMatrix restrict(const Operator& full) const { return restrict(full.matrix()); }
  Vector restrict(const Vector& full) const;
  DenseMatrix restrict(const DenseMatrix& full) const;
  Vector lift(const Vector& restricted) const;
  DenseMatrix lift(const DenseMatrix& restricted) const;

 private:
  SpacePtr space_;
  int n_max_;
  std::vector<Index> basis_;
  std::vector<Index> position_;  // full index -> sector position or -1
};

ExcitationSector excitation_sector(const SpacePtr& space, int n_max);

}  // namespace erasehead
