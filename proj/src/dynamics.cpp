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

#include "erasehead/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <utility>
#include <vector>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "erasehead/errors.hpp"

namespace erasehead {
namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kTraceFlag = 1e-8;
constexpr double kTraceFatal = 1e-6;
constexpr double kImagTolerance = 1e-8;

void require_square(const SparseMatrix& m, Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << what << " is " << m.rows() << "x" << m.cols() << ", expected " << n << "x" << n;
    throw ShapeError(os.str());
  }
}

ode::Options to_options(const EvolutionConfig& config) {
  ode::Options opt;
  opt.rtol = config.rtol;
  opt.atol = config.atol;
  if (config.max_step > 0.0) opt.max_step = config.max_step;
  return opt;
}

TraceSet empty_traces(const std::vector<double>& grid, const std::vector<Observable>& observables) {
  TraceSet traces;
  traces.times = grid;
  for (const auto& o : observables) {
    traces.labels.push_back(o.label);
    traces.series.emplace_back(grid.size(), 0.0);
  }
  traces.trace_deviation.assign(grid.size(), 0.0);
  traces.purity.assign(grid.size(), 0.0);
  return traces;
}

// Compressed-row slice of an operator between two blocks.
struct Csr {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> start;
  std::vector<Index> col;
  std::vector<cplx> val;

  bool empty() const { return val.empty(); }
};

inline void fma(cplx& acc, cplx a, cplx b) {
  acc = {acc.real() + a.real() * b.real() - a.imag() * b.imag(), acc.imag() + a.real() * b.imag() + a.imag() * b.real()};
}

inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// out = alpha * a * b (accumulate: out += ...). Column-major b and out with
// leading dimensions equal to their row counts.
void csr_apply(const Csr& a, const cplx* b, Index b_cols, cplx* out, cplx alpha, bool accumulate) {
  for (Index j = 0; j < b_cols; ++j) {
    const cplx* bj = b + j * a.cols;
    cplx* oj = out + j * a.rows;
    for (Index i = 0; i < a.rows; ++i) {
      cplx s = 0.0;
      for (Index p = a.start[i]; p < a.start[i + 1]; ++p) fma(s, a.val[p], bj[a.col[p]]);
      oj[i] = accumulate ? oj[i] + mul(alpha, s) : mul(alpha, s);
    }
  }
}

class UnionFind {
 public:
  explicit UnionFind(Index n) : parent_(static_cast<std::size_t>(n)) {
    for (Index i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
  }
  Index find(Index i) {
    while (parent_[static_cast<std::size_t>(i)] != i) {
      auto& p = parent_[static_cast<std::size_t>(i)];
      p = parent_[static_cast<std::size_t>(p)];
      i = p;
    }
    return i;
  }
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    return true;
  }

 private:
  std::vector<Index> parent_;
};

// Master equation on a block-diagonal density matrix. Blocks are the smallest
// index partition that the Hamiltonian never couples, that each collapse
// operator maps block-to-block, and that holds every coherence of rho0; the
// dynamics then never populate off-block entries. Within a block:
//   X = -i H_eff rho,  d rho = X + X^dagger + sum_k L_k rho L_k^dagger
// with H_eff = H - (i/2) sum_k L_k^dagger L_k and L_k = sqrt(rate_k) * op_k.
// Valid for Hermitian rho, which every state the integrator visits is.
class BlockMaster {
 public:
  BlockMaster(const TimeDependentHamiltonian& h, const std::vector<CollapseChannel>& channels,
              const DenseMatrix& rho0) {
    n_ = h.dimension();
    SparseMatrix heff = h.constant();
    std::vector<SparseMatrix> jumps;
    for (const auto& ch : channels) {
      require_square(ch.op, n_, "collapse operator");
      if (ch.rate == 0.0) continue;
      SparseMatrix l = std::sqrt(ch.rate) * ch.op;
      heff -= 0.5 * kI * SparseMatrix(SparseMatrix(l.adjoint()) * l);
      jumps.push_back(std::move(l));
    }
    partition(heff, h.terms(), jumps, rho0);

    blocks_.resize(block_index_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      Block& blk = blocks_[b];
      blk.heff = slice(heff, static_cast<int>(b), static_cast<int>(b));
      for (const auto& term : h.terms()) {
        blk.terms.push_back({slice(term.op, static_cast<int>(b), static_cast<int>(b)),
                             slice(SparseMatrix(term.op.adjoint()), static_cast<int>(b), static_cast<int>(b)),
                             term.detuning});
      }
      blk.work.resize(dim(b), dim(b));
    }
    for (const auto& l : jumps) {
      for (std::size_t s = 0; s < blocks_.size(); ++s) {
        const int target = image_[&l - jumps.data()][s];
        if (target < 0) continue;
        Feed f{static_cast<int>(s), target, slice(l, target, static_cast<int>(s)), DenseMatrix()};
        f.work.resize(dim(static_cast<std::size_t>(target)), dim(s));
        feeds_.push_back(std::move(f));
      }
    }
  }

  Index packed_size() const { return offset_.back(); }
  std::vector<Index> block_dimensions() const {
    std::vector<Index> out;
    for (const auto& b : block_index_) out.push_back(static_cast<Index>(b.size()));
    return out;
  }

  Vector pack(const DenseMatrix& rho) const {
    Vector y(packed_size());
    for (std::size_t b = 0; b < block_index_.size(); ++b) {
      const auto& idx = block_index_[b];
      const Index d = dim(b);
      for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i < d; ++i) y(offset_[b] + i + j * d) = rho(idx[i], idx[j]);
      }
    }
    return y;
  }

  DenseMatrix unpack(const Vector& y) const {
    DenseMatrix rho = DenseMatrix::Zero(n_, n_);
    for (std::size_t b = 0; b < block_index_.size(); ++b) {
      const auto& idx = block_index_[b];
      const Index d = dim(b);
      for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i < d; ++i) rho(idx[i], idx[j]) = y(offset_[b] + i + j * d);
      }
    }
    return rho;
  }

  void operator()(double t, const Vector& y, Vector& dy) const {
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Block& blk = blocks_[b];
      const Index d = dim(b);
      const cplx* r = y.data() + offset_[b];
      csr_apply(blk.heff, r, d, blk.work.data(), -kI, false);
      for (const auto& term : blk.terms) {
        const cplx phase = std::polar(1.0, term.detuning * t);
        if (!term.op.empty()) csr_apply(term.op, r, d, blk.work.data(), -kI * phase, true);
        if (!term.adjoint.empty()) csr_apply(term.adjoint, r, d, blk.work.data(), -kI * std::conj(phase), true);
      }
      Eigen::Map<DenseMatrix> out(dy.data() + offset_[b], d, d);
      out.noalias() = blk.work + blk.work.adjoint();
    }
    for (const auto& f : feeds_) {
      const auto s = static_cast<std::size_t>(f.source);
      const auto b = static_cast<std::size_t>(f.target);
      // work = L rho_s; out += work L^dagger, column by column.
      csr_apply(f.l, y.data() + offset_[s], dim(s), f.work.data(), 1.0, false);
      Eigen::Map<DenseMatrix> out(dy.data() + offset_[b], dim(b), dim(b));
      for (Index j = 0; j < f.l.rows; ++j) {
        for (Index p = f.l.start[j]; p < f.l.start[j + 1]; ++p) out.col(j) += std::conj(f.l.val[p]) * f.work.col(f.l.col[p]);
      }
    }
  }

  /// Hermitian part of every block; returns the largest removed defect.
  double symmetrize(Vector& y) const {
    double defect = 0.0;
    for (std::size_t b = 0; b < block_index_.size(); ++b) {
      Eigen::Map<DenseMatrix> r(y.data() + offset_[b], dim(b), dim(b));
      defect = std::max(defect, (r - r.adjoint()).cwiseAbs().maxCoeff());
      r = 0.5 * (r + r.adjoint()).eval();
    }
    return defect;
  }

  cplx trace(const Vector& y) const {
    cplx acc = 0.0;
    for (std::size_t b = 0; b < block_index_.size(); ++b) {
      acc += Eigen::Map<const DenseMatrix>(y.data() + offset_[b], dim(b), dim(b)).trace();
    }
    return acc;
  }

  double min_eigenvalue(const Vector& y) const {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < block_index_.size(); ++b) {
      const Eigen::Map<const DenseMatrix> r(y.data() + offset_[b], dim(b), dim(b));
      Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
      lowest = std::min(lowest, solver.eigenvalues().minCoeff());
    }
    // Off-block entries are exactly zero; with more than one block the
    // spectrum is the union of the block spectra.
    return lowest;
  }

  /// (packed position, op(j, i)) pairs so that tr(rho op) = sum value * y[position].
  std::vector<std::pair<Index, cplx>> compile(const SparseMatrix& op) const {
    std::vector<std::pair<Index, cplx>> out;
    for (Index k = 0; k < op.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(op, k); it; ++it) {
        // op(row, col) pairs with rho(col, row).
        const Index i = it.col();
        const Index j = it.row();
        const int b = block_of_[static_cast<std::size_t>(i)];
        if (b != block_of_[static_cast<std::size_t>(j)]) continue;
        const Index d = dim(static_cast<std::size_t>(b));
        out.emplace_back(offset_[static_cast<std::size_t>(b)] + local_[static_cast<std::size_t>(i)] +
                             local_[static_cast<std::size_t>(j)] * d,
                         it.value());
      }
    }
    return out;
  }

 private:
  struct Term {
    Csr op;
    Csr adjoint;
    double detuning;
  };
  struct Block {
    Csr heff;
    std::vector<Term> terms;
    mutable DenseMatrix work;
  };
  struct Feed {
    int source;
    int target;
    Csr l;
    mutable DenseMatrix work;
  };

  Index dim(std::size_t b) const { return static_cast<Index>(block_index_[b].size()); }

  void partition(const SparseMatrix& heff, const std::vector<ModulatedTerm>& terms,
                 const std::vector<SparseMatrix>& jumps, const DenseMatrix& rho0) {
    UnionFind uf(n_);
    auto unite_pattern = [&](const SparseMatrix& m) {
      for (Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
          if (it.value() != cplx(0.0)) uf.unite(it.row(), it.col());
        }
      }
    };
    unite_pattern(heff);
    for (const auto& term : terms) unite_pattern(term.op);
    for (Index j = 0; j < n_; ++j) {
      for (Index i = 0; i < j; ++i) {
        if (rho0(i, j) != cplx(0.0) || rho0(j, i) != cplx(0.0)) uf.unite(i, j);
      }
    }
    // Each jump must send a whole block into a single block.
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& l : jumps) {
        std::vector<Index> image(static_cast<std::size_t>(n_), -1);
        for (Index k = 0; k < l.outerSize(); ++k) {
          for (SparseMatrix::InnerIterator it(l, k); it; ++it) {
            if (it.value() == cplx(0.0)) continue;
            auto& slot = image[static_cast<std::size_t>(uf.find(it.col()))];
            if (slot < 0) {
              slot = it.row();
            } else if (uf.unite(slot, it.row())) {
              changed = true;
            }
          }
        }
      }
    }

    std::vector<int> root_block(static_cast<std::size_t>(n_), -1);
    block_of_.assign(static_cast<std::size_t>(n_), -1);
    local_.assign(static_cast<std::size_t>(n_), 0);
    for (Index i = 0; i < n_; ++i) {
      auto& rb = root_block[static_cast<std::size_t>(uf.find(i))];
      if (rb < 0) {
        rb = static_cast<int>(block_index_.size());
        block_index_.emplace_back();
      }
      block_of_[static_cast<std::size_t>(i)] = rb;
      local_[static_cast<std::size_t>(i)] = static_cast<Index>(block_index_[static_cast<std::size_t>(rb)].size());
      block_index_[static_cast<std::size_t>(rb)].push_back(i);
    }
    offset_.assign(1, 0);
    for (const auto& b : block_index_) offset_.push_back(offset_.back() + static_cast<Index>(b.size() * b.size()));

    for (const auto& l : jumps) {
      std::vector<int> image(block_index_.size(), -1);
      for (Index k = 0; k < l.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(l, k); it; ++it) {
          if (it.value() == cplx(0.0)) continue;
          image[static_cast<std::size_t>(block_of_[static_cast<std::size_t>(it.col())])] =
              block_of_[static_cast<std::size_t>(it.row())];
        }
      }
      image_.push_back(std::move(image));
    }
  }

  Csr slice(const SparseMatrix& m, int row_block, int col_block) const {
    Csr out;
    out.rows = dim(static_cast<std::size_t>(row_block));
    out.cols = dim(static_cast<std::size_t>(col_block));
    std::vector<std::vector<std::pair<Index, cplx>>> rows(static_cast<std::size_t>(out.rows));
    for (Index k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        if (it.value() == cplx(0.0)) continue;
        if (block_of_[static_cast<std::size_t>(it.row())] != row_block ||
            block_of_[static_cast<std::size_t>(it.col())] != col_block) {
          continue;
        }
        rows[static_cast<std::size_t>(local_[static_cast<std::size_t>(it.row())])].emplace_back(
            local_[static_cast<std::size_t>(it.col())], it.value());
      }
    }
    out.start.push_back(0);
    for (auto& r : rows) {
      std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [c, v] : r) {
        out.col.push_back(c);
        out.val.push_back(v);
      }
      out.start.push_back(static_cast<Index>(out.col.size()));
    }
    return out;
  }

  Index n_ = 0;
  std::vector<std::vector<Index>> block_index_;
  std::vector<int> block_of_;
  std::vector<Index> local_;
  std::vector<Index> offset_;
  std::vector<std::vector<int>> image_;  // per jump: source block -> target block (-1: none)
  std::vector<Block> blocks_;
  std::vector<Feed> feeds_;
};

class SchrodingerGenerator {
 public:
  explicit SchrodingerGenerator(const TimeDependentHamiltonian& h) : h_(h.constant()) {
    for (const auto& term : h.terms()) terms_.push_back({term.op, SparseMatrix(term.op.adjoint()), term.detuning});
  }

  void operator()(double t, const Vector& psi, Vector& dpsi) const {
    dpsi.noalias() = h_ * psi;
    for (const auto& term : terms_) {
      const cplx phase = std::polar(1.0, term.detuning * t);
      dpsi.noalias() += phase * (term.op * psi);
      dpsi.noalias() += std::conj(phase) * (term.adjoint * psi);
    }
    dpsi *= -kI;
  }

 private:
  struct Term {
    SparseMatrix op, adjoint;
    double detuning;
  };
  SparseMatrix h_;
  std::vector<Term> terms_;
};

double checked_real(cplx value, const std::string& what) {
  if (std::abs(value.imag()) > kImagTolerance * std::max(1.0, std::abs(value.real()))) {
    std::ostringstream os;
    os << "expectation of " << what << " has imaginary part " << value.imag();
    throw IntegrityError(os.str());
  }
  return value.real();
}

}  // namespace

CollapseChannel::CollapseChannel(SparseMatrix op_, double rate_) : op(std::move(op_)), rate(rate_) {
  if (!(rate >= 0.0)) throw PreconditionError("collapse rate must be non-negative");
  if (op.rows() != op.cols()) throw ShapeError("collapse operator must be square");
}

CollapseChannel CollapseChannel::restricted(const ExcitationSector& sector) const {
  return CollapseChannel(sector.restrict(op), rate);
}

void EvolutionConfig::validate() const {
  if (points.empty()) {
    if (!(t_end > t_start)) throw PreconditionError("evolution window needs t_end > t_start");
    if (!(grid_step > 0.0)) throw PreconditionError("output grid step must be positive");
  } else {
    if (points.front() < t_start) throw PreconditionError("output points precede t_start");
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (!(points[i] > points[i - 1])) throw PreconditionError("output points must be strictly increasing");
    }
  }
  if (!(rtol > 0.0) || !(atol > 0.0)) throw PreconditionError("tolerances must be positive");
}

std::vector<double> EvolutionConfig::grid() const {
  validate();
  if (!points.empty()) return points;
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((t_end - t_start) / grid_step + 1e-9));
  out.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k) out.push_back(t_start + static_cast<double>(k) * grid_step);
  if (out.back() < t_end - 1e-9 * grid_step) {
    out.push_back(t_end);
  } else {
    out.back() = t_end;
  }
  return out;
}

bool TraceSet::has(const std::string& label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

const std::vector<double>& TraceSet::operator[](const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw LookupError("trace set has no series '" + label + "'");
  return series[static_cast<std::size_t>(it - labels.begin())];
}

DenseMatrix lindblad_rhs(const DenseMatrix& rho, const SparseMatrix& hamiltonian,
                         const std::vector<CollapseChannel>& channels) {
  const Index n = rho.rows();
  if (rho.cols() != n) throw ShapeError("density matrix must be square");
  require_square(hamiltonian, n, "Hamiltonian");
  DenseMatrix out = -kI * (hamiltonian * rho - rho * hamiltonian);
  for (const auto& ch : channels) {
    require_square(ch.op, n, "collapse operator");
    const SparseMatrix ldag = ch.op.adjoint();
    const SparseMatrix ldl = ldag * ch.op;
    out += ch.rate * ((ch.op * rho) * ldag - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

DenseMatrix lindblad_rhs(const DensityMatrix& rho, const Operator& hamiltonian,
                         const std::vector<CollapseChannel>& channels) {
  return lindblad_rhs(rho.matrix(), hamiltonian.matrix(), channels);
}

double trace_expectation(const DenseMatrix& rho, const SparseMatrix& op) {
  if (rho.rows() != op.rows()) throw ShapeError("observable does not match the state dimension");
  cplx acc = 0.0;
  for (Index k = 0; k < op.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(op, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  }
  return checked_real(acc, "observable");
}

double state_expectation(const Vector& psi, const SparseMatrix& op) {
  if (psi.size() != op.rows()) throw ShapeError("observable does not match the state dimension");
  return checked_real(psi.dot(op * psi), "observable");
}

TraceSet evolve_master(const DensityMatrix& rho0, const TimeDependentHamiltonian& hamiltonian,
                       const std::vector<CollapseChannel>& channels, const EvolutionConfig& config,
                       const std::vector<Observable>& observables) {
  const Index n = rho0.dimension();
  require_square(hamiltonian.constant(), n, "Hamiltonian");
  for (const auto& o : observables) require_square(o.op, n, ("observable " + o.label).c_str());

  const std::vector<double> grid = config.grid();
  TraceSet traces = empty_traces(grid, observables);
  const BlockMaster generator(hamiltonian, channels, rho0.matrix());
  traces.block_dimensions = generator.block_dimensions();
  std::vector<std::vector<std::pair<Index, cplx>>> compiled;
  for (const auto& o : observables) compiled.push_back(generator.compile(o.op));

  auto observe = [&](std::size_t i, double, const Vector& y) {
    for (std::size_t k = 0; k < compiled.size(); ++k) {
      cplx acc = 0.0;
      for (const auto& [pos, value] : compiled[k]) acc += value * y(pos);
      traces.series[k][i] = checked_real(acc, observables[k].label);
    }
    traces.trace_deviation[i] = std::abs(generator.trace(y).real() - 1.0);
    traces.purity[i] = y.squaredNorm();
  };
  auto after_step = [&](double t, Vector& y) {
    traces.max_hermiticity_correction = std::max(traces.max_hermiticity_correction, generator.symmetrize(y));
    const double dev = std::abs(generator.trace(y).real() - 1.0);
    traces.max_trace_deviation = std::max(traces.max_trace_deviation, dev);
    if (dev > kTraceFlag) traces.flagged = true;
    if (dev > kTraceFatal) {
      std::ostringstream os;
      os << "trace drifted by " << dev << " at t = " << t << " ns";
      throw IntegrityError(os.str());
    }
  };

  Vector final_state;
  auto observe_and_keep = [&](std::size_t i, double t, const Vector& y) {
    observe(i, t, y);
    if (i + 1 == grid.size()) final_state = y;
  };
  traces.stats = ode::integrate(generator, generator.pack(rho0.matrix()), config.t_start, grid, to_options(config),
                                observe_and_keep, after_step);
  if (final_state.size() > 0) {
    traces.final_min_eigenvalue = generator.min_eigenvalue(final_state);
    traces.final_state = generator.unpack(final_state);
  }
  return traces;
}

TraceSet evolve_state(const StateVector& psi0, const TimeDependentHamiltonian& hamiltonian,
                      const EvolutionConfig& config, const std::vector<Observable>& observables) {
  const Index n = psi0.dimension();
  require_square(hamiltonian.constant(), n, "Hamiltonian");
  for (const auto& o : observables) require_square(o.op, n, ("observable " + o.label).c_str());

  const std::vector<double> grid = config.grid();
  TraceSet traces = empty_traces(grid, observables);
  const SchrodingerGenerator generator(hamiltonian);

  auto observe = [&](std::size_t i, double, const Vector& psi) {
    for (std::size_t k = 0; k < observables.size(); ++k) {
      traces.series[k][i] = state_expectation(psi, observables[k].op);
    }
    const double norm2 = psi.squaredNorm();
    traces.trace_deviation[i] = std::abs(norm2 - 1.0);
    traces.purity[i] = 1.0;
  };
  auto after_step = [&](double t, Vector& psi) {
    const double dev = std::abs(psi.squaredNorm() - 1.0);
    traces.max_trace_deviation = std::max(traces.max_trace_deviation, dev);
    if (dev > kTraceFlag) traces.flagged = true;
    if (dev > kTraceFatal) {
      std::ostringstream os;
      os << "state norm drifted by " << dev << " at t = " << t << " ns";
      throw IntegrityError(os.str());
    }
  };
  traces.stats =
      ode::integrate(generator, psi0.amplitudes(), config.t_start, grid, to_options(config), observe, after_step);
  return traces;
}

ConvergenceReport convergence_probe(const std::function<TraceSet(int cutoff)>& scenario, int cutoff,
                                    double tolerance) {
  if (cutoff < 1) throw PreconditionError("convergence probe needs cutoff >= 1");
  auto low = std::async(std::launch::async, scenario, cutoff);
  auto high = std::async(std::launch::async, scenario, cutoff + 1);
  const TraceSet a = low.get();
  const TraceSet b = high.get();
  if (a.times != b.times) throw ShapeError("convergence probe runs used different time grids");

  ConvergenceReport report;
  report.cutoff = cutoff;
  report.tolerance = tolerance;
  for (std::size_t k = 0; k < a.labels.size(); ++k) {
    if (!b.has(a.labels[k])) continue;
    const auto& sa = a.series[k];
    const auto& sb = b[a.labels[k]];
    double diff = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) diff = std::max(diff, std::abs(sa[i] - sb[i]));
    report.labels.push_back(a.labels[k]);
    report.max_difference.push_back(diff);
    report.worst = std::max(report.worst, diff);
  }
  report.passed = report.worst < tolerance;
  return report;
}

}  // namespace erasehead
