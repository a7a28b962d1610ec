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

#include "erasehead/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Eigenvalues>

#include "erasehead/errors.hpp"

namespace erasehead {

std::string_view to_string(ModeKind kind) {
  switch (kind) {
    case ModeKind::WorkingQubit: return "working-qubit";
    case ModeKind::HeadQubit: return "head-qubit";
    case ModeKind::Coupler: return "coupler";
    case ModeKind::Resonator: return "resonator";
  }
  return "unknown";
}

CompositeSpace::CompositeSpace(std::vector<ModeSpec> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw InvalidModeError("composite space needs at least one mode");
  std::set<std::string> seen;
  for (const auto& m : modes_) {
    if (m.dimension < 2) {
      throw InvalidModeError("mode '" + m.label + "' has dimension " + std::to_string(m.dimension) +
                             " (must be >= 2)");
    }
    if (m.kind != ModeKind::Resonator && m.dimension != 2) {
      throw InvalidModeError("mode '" + m.label + "' of kind " + std::string(to_string(m.kind)) +
                             " must be two-level");
    }
    if (!seen.insert(m.label).second) throw InvalidModeError("duplicate mode label '" + m.label + "'");
  }
  strides_.assign(modes_.size(), 1);
  for (std::size_t k = modes_.size(); k-- > 0;) {
    strides_[k] = total_dimension_;
    total_dimension_ *= modes_[k].dimension;
  }
}

bool CompositeSpace::contains(std::string_view label) const {
  return std::any_of(modes_.begin(), modes_.end(), [&](const ModeSpec& m) { return m.label == label; });
}

std::size_t CompositeSpace::position(std::string_view label) const {
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (modes_[k].label == label) return k;
  }
  throw LookupError("unknown mode label '" + std::string(label) + "'");
}

std::vector<int> CompositeSpace::occupations(Index index) const {
  std::vector<int> occ(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    occ[k] = static_cast<int>((index / strides_[k]) % modes_[k].dimension);
  }
  return occ;
}

Index CompositeSpace::basis_index(std::span<const int> occupations) const {
  if (occupations.size() != modes_.size()) {
    throw ShapeError("expected " + std::to_string(modes_.size()) + " occupations, got " +
                     std::to_string(occupations.size()));
  }
  Index index = 0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (occupations[k] < 0 || occupations[k] >= modes_[k].dimension) {
      throw ShapeError("occupation " + std::to_string(occupations[k]) + " out of range for mode '" +
                       modes_[k].label + "'");
    }
    index += occupations[k] * strides_[k];
  }
  return index;
}

Index CompositeSpace::basis_index(const std::map<std::string, int>& occupations) const {
  std::vector<int> occ(modes_.size(), 0);
  for (const auto& [label, n] : occupations) occ[position(label)] = n;
  return basis_index(occ);
}

// ---------------------------------------------------------------------------

Operator::Operator(SpacePtr space, SparseMatrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (!space_) throw ShapeError("operator requires a space");
  const Index n = space_->total_dimension();
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw ShapeError("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                     std::to_string(matrix_.cols()) + ", space dimension is " + std::to_string(n));
  }
  matrix_.makeCompressed();
}

Operator Operator::zero(SpacePtr space) {
  const Index n = space->total_dimension();
  return Operator(std::move(space), SparseMatrix(n, n));
}

Operator Operator::identity(SpacePtr space) {
  const Index n = space->total_dimension();
  SparseMatrix id(n, n);
  id.setIdentity();
  return Operator(std::move(space), std::move(id));
}

Operator Operator::adjoint() const { return Operator(space_, SparseMatrix(matrix_.adjoint())); }

double max_abs(const SparseMatrix& m) {
  double best = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) best = std::max(best, std::abs(it.value()));
  }
  return best;
}

double Operator::hermiticity_defect() const {
  return max_abs(SparseMatrix(matrix_ - SparseMatrix(matrix_.adjoint())));
}

Vector Operator::apply(const Vector& v) const {
  if (v.size() != dimension()) throw ShapeError("vector length does not match operator dimension");
  return matrix_ * v;
}

void Operator::require_same_space(const Operator& other) const {
  if (space_ != other.space_ && space_->total_dimension() != other.space_->total_dimension()) {
    throw ShapeError("operators live on different spaces");
  }
}

Operator& Operator::operator+=(const Operator& other) {
  require_same_space(other);
  matrix_ += other.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_space(other);
  matrix_ -= other.matrix_;
  return *this;
}

Operator& Operator::operator*=(cplx scale) {
  matrix_ *= scale;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  a.require_same_space(b);
  return Operator(a.space_, SparseMatrix(a.matrix_ * b.matrix_));
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------

StateVector::StateVector(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw ShapeError("empty state vector");
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > 1e-10) {
    throw IntegrityError("state vector norm " + std::to_string(norm) + " differs from 1");
  }
}

StateVector StateVector::normalized(Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (norm == 0.0) throw ShapeError("cannot normalize the zero vector");
  return StateVector(amplitudes / norm);
}

StateVector StateVector::basis(Index dimension, Index index) {
  if (index < 0 || index >= dimension) throw ShapeError("basis index out of range");
  Vector v = Vector::Zero(dimension);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

DensityMatrix::DensityMatrix(DenseMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) throw ShapeError("density matrix must be square");
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10) throw IntegrityError("density matrix is not Hermitian (defect " + std::to_string(herm) + ")");
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) throw IntegrityError("density matrix trace " + std::to_string(tr) + " differs from 1");
  if (min_eigenvalue() < -1e-8) throw IntegrityError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Index dimension) {
  return DensityMatrix(DenseMatrix::Identity(dimension, dimension) / static_cast<double>(dimension));
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------

SparseMatrix lowering_operator(int dimension) {
  if (dimension < 2) throw InvalidModeError("lowering operator needs dimension >= 2, got " + std::to_string(dimension));
  SparseMatrix a(dimension, dimension);
  a.reserve(Eigen::VectorXi::Constant(dimension, 1));
  for (int i = 1; i < dimension; ++i) a.insert(i - 1, i) = std::sqrt(static_cast<double>(i));
  a.makeCompressed();
  return a;
}

SparseMatrix raising_operator(int dimension) { return SparseMatrix(lowering_operator(dimension).adjoint()); }

Operator embed(const SparseMatrix& local, std::string_view mode_label, const SpacePtr& space) {
  const std::size_t pos = space->position(mode_label);
  const ModeSpec& mode = space->modes()[pos];
  if (local.rows() != mode.dimension || local.cols() != mode.dimension) {
    throw ShapeError("local operator is " + std::to_string(local.rows()) + "x" + std::to_string(local.cols()) +
                     " but mode '" + mode.label + "' has dimension " + std::to_string(mode.dimension));
  }
  const Index n = space->total_dimension();
  const Index stride = space->stride(pos);
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(n / mode.dimension * local.nonZeros()));
  for (Index col = 0; col < n; ++col) {
    const Index occ = (col / stride) % mode.dimension;
    for (SparseMatrix::InnerIterator it(local, occ); it; ++it) {
      triplets.emplace_back(col + (it.row() - occ) * stride, col, it.value());
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(space, std::move(m));
}

StateVector tensor_state(std::span<const Vector> locals, const CompositeSpace& space) {
  if (locals.size() != space.num_modes()) {
    throw ShapeError("tensor_state expects " + std::to_string(space.num_modes()) + " local states, got " +
                     std::to_string(locals.size()));
  }
  Vector out = Vector::Ones(1);
  for (std::size_t k = 0; k < locals.size(); ++k) {
    const Vector& local = locals[k];
    if (local.size() != space.modes()[k].dimension) {
      throw ShapeError("local state for mode '" + space.modes()[k].label + "' has wrong dimension");
    }
    Vector next(out.size() * local.size());
    for (Index i = 0; i < out.size(); ++i) next.segment(i * local.size(), local.size()) = out(i) * local;
    out = std::move(next);
  }
  return StateVector::normalized(std::move(out));
}

StateVector basis_state(const std::map<std::string, int>& occupations, const CompositeSpace& space) {
  return StateVector::basis(space.total_dimension(), space.basis_index(occupations));
}

Operator number_operator(std::string_view mode_label, const SpacePtr& space) {
  const int d = space->mode(mode_label).dimension;
  return embed(SparseMatrix(raising_operator(d) * lowering_operator(d)), mode_label, space);
}

Operator total_excitation_operator(const SpacePtr& space) {
  const Index n = space->total_dimension();
  SparseMatrix m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Index i = 0; i < n; ++i) {
    const auto occ = space->occupations(i);
    m.insert(i, i) = static_cast<double>(std::accumulate(occ.begin(), occ.end(), 0));
  }
  return Operator(space, std::move(m));
}

// ---------------------------------------------------------------------------

ExcitationSector::ExcitationSector(SpacePtr space, int n_max) : space_(std::move(space)), n_max_(n_max) {
  if (n_max_ < 0) throw ShapeError("excitation sector needs n_max >= 0");
  const Index n = space_->total_dimension();
  position_.assign(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const auto occ = space_->occupations(i);
    if (std::accumulate(occ.begin(), occ.end(), 0) <= n_max_) {
      position_[static_cast<std::size_t>(i)] = static_cast<Index>(basis_.size());
      basis_.push_back(i);
    }
  }
}

Operator ExcitationSector::projector() const {
  const Index n = space_->total_dimension();
  SparseMatrix p(n, n);
  p.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Index i : basis_) p.insert(i, i) = 1.0;
  return Operator(space_, std::move(p));
}

SparseMatrix ExcitationSector::isometry() const {
  SparseMatrix v(space_->total_dimension(), dimension());
  v.reserve(Eigen::VectorXi::Constant(dimension(), 1));
  for (Index k = 0; k < dimension(); ++k) v.insert(basis_[static_cast<std::size_t>(k)], k) = 1.0;
  return v;
}

SparseMatrix ExcitationSector::restrict(const SparseMatrix& full) const {
  const Index n = space_->total_dimension();
  if (full.rows() != n || full.cols() != n) throw ShapeError("operator does not match the sector's space");
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (Index k = 0; k < full.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(full, k); it; ++it) {
      const Index r = position_[static_cast<std::size_t>(it.row())];
      const Index c = position_[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix out(dimension(), dimension());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Vector ExcitationSector::restrict(const Vector& full) const {
  if (full.size() != space_->total_dimension()) throw ShapeError("vector does not match the sector's space");
  Vector out(dimension());
  for (Index k = 0; k < dimension(); ++k) out(k) = full(basis_[static_cast<std::size_t>(k)]);
  return out;
}

DenseMatrix ExcitationSector::restrict(const DenseMatrix& full) const {
  if (full.rows() != space_->total_dimension()) throw ShapeError("matrix does not match the sector's space");
  DenseMatrix out(dimension(), dimension());
  for (Index c = 0; c < dimension(); ++c) {
    for (Index r = 0; r < dimension(); ++r) {
      out(r, c) = full(basis_[static_cast<std::size_t>(r)], basis_[static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

Vector ExcitationSector::lift(const Vector& restricted) const {
  if (restricted.size() != dimension()) throw ShapeError("vector does not match the sector dimension");
  Vector out = Vector::Zero(space_->total_dimension());
  for (Index k = 0; k < dimension(); ++k) out(basis_[static_cast<std::size_t>(k)]) = restricted(k);
  return out;
}

DenseMatrix ExcitationSector::lift(const DenseMatrix& restricted) const {
  if (restricted.rows() != dimension()) throw ShapeError("matrix does not match the sector dimension");
  const Index n = space_->total_dimension();
  DenseMatrix out = DenseMatrix::Zero(n, n);
  for (Index c = 0; c < dimension(); ++c) {
    for (Index r = 0; r < dimension(); ++r) {
      out(basis_[static_cast<std::size_t>(r)], basis_[static_cast<std::size_t>(c)]) = restricted(r, c);
    }
  }
  return out;
}

ExcitationSector excitation_sector(const SpacePtr& space, int n_max) { return ExcitationSector(space, n_max); }

}  // namespace erasehead
