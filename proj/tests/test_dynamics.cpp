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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "erasehead/dynamics.hpp"
#include "erasehead/errors.hpp"
#include "erasehead/model.hpp"
#include "oracles.hpp"

namespace eh = erasehead;

namespace {

eh::SpacePtr cavity(int cutoff) {
  return std::make_shared<const eh::CompositeSpace>(std::vector<eh::ModeSpec>{eh::ModeSpec::resonator("r", cutoff)});
}

eh::EvolutionConfig window(double t_end, double step) {
  eh::EvolutionConfig c;
  c.t_end = t_end;
  c.grid_step = step;
  return c;
}

std::vector<eh::Observable> populations(const eh::SpacePtr& space) {
  std::vector<eh::Observable> out;
  for (const auto& m : space->modes()) out.push_back({m.label, eh::number_operator(m.label, space).matrix()});
  return out;
}

oracle::Mat random_matrix(eh::Index n, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  oracle::Mat m(n, n);
  for (eh::Index i = 0; i < m.size(); ++i) m(i) = {normal(rng), normal(rng)};
  return m;
}

oracle::Mat random_density(eh::Index n, std::mt19937& rng) {
  const oracle::Mat a = random_matrix(n, rng);
  oracle::Mat rho = a * a.adjoint();
  return rho / rho.trace();
}

// One working qubit with a cutoff-1 resonator: 16 states.
eh::DeviceParams small_device() {
  eh::DeviceParams p = eh::DeviceParams::two_qubit_reference();
  p.omega_q.resize(1);
  p.omega_c = {eh::from_ghz(3.1)};
  p.fock_cutoff = 1;
  p.kappa = eh::from_mhz(150.0);
  return p;
}

}  // namespace

TEST(Master, BareCavityDecay) {
  const auto space = cavity(3);
  const double kappa = eh::from_mhz(30.0);
  const auto a = eh::embed(eh::lowering_operator(4), "r", space);
  const auto rho0 = eh::DensityMatrix::pure(eh::basis_state({{"r", 1}}, *space));
  const auto traces = eh::evolve_master(rho0, eh::TimeDependentHamiltonian(eh::SparseMatrix(4, 4)),
                                        {eh::CollapseChannel(a.matrix(), kappa)}, window(200.0, 1.0), populations(space));
  double worst = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    worst = std::max(worst, std::abs(traces["r"][i] - std::exp(-kappa * traces.times[i])));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Master, CoherentCavityDecay) {
  // Coherent amplitude decays as alpha e^{-kappa t / 2}; the populations follow |alpha|^2 e^{-kappa t}.
  const auto space = cavity(12);
  const double kappa = 0.4;
  const double alpha = 1.2;
  eh::Vector psi(13);
  double fact = 1.0;
  for (int n = 0; n <= 12; ++n) {
    if (n > 0) fact *= n;
    psi(n) = std::exp(-alpha * alpha / 2.0) * std::pow(alpha, n) / std::sqrt(fact);
  }
  const auto rho0 = eh::DensityMatrix::pure(eh::StateVector::normalized(psi));
  const auto a = eh::embed(eh::lowering_operator(13), "r", space);
  const auto traces = eh::evolve_master(rho0, eh::TimeDependentHamiltonian(eh::SparseMatrix(13, 13)),
                                        {eh::CollapseChannel(a.matrix(), kappa)}, window(5.0, 0.5), populations(space));
  const double n0 = traces["r"][0];
  for (std::size_t i = 0; i < traces.size(); ++i) {
    EXPECT_NEAR(traces["r"][i], n0 * std::exp(-kappa * traces.times[i]), 1e-7);
  }
}

TEST(Master, RhsMatchesVectorizedLiouvillian) {
  std::mt19937 rng(3);
  for (eh::Index n : {3, 6, 9}) {
    oracle::Mat h = random_matrix(n, rng);
    h = (h + h.adjoint()).eval();
    const oracle::Mat l1 = random_matrix(n, rng), l2 = random_matrix(n, rng);
    const double r1 = 0.3, r2 = 1.7;
    const oracle::Mat rho = random_density(n, rng);
    const eh::DenseMatrix got = eh::lindblad_rhs(rho, eh::SparseMatrix(h.sparseView()),
                                                 {eh::CollapseChannel(l1.sparseView(), r1),
                                                  eh::CollapseChannel(l2.sparseView(), r2)});
    const oracle::Mat liou = oracle::liouvillian(h, {std::sqrt(r1) * l1, std::sqrt(r2) * l2});
    const Eigen::VectorXcd v = liou * Eigen::Map<const Eigen::VectorXcd>(rho.data(), n * n);
    const oracle::Mat expected = Eigen::Map<const oracle::Mat>(v.data(), n, n);
    EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-12) << n;
  }
}

// Property: evolve_master agrees with exp(L t) vec(rho0) on random dense problems.
TEST(Property, MasterMatchesMatrixExponential) {
  std::mt19937 rng(42);
  for (eh::Index n : {2, 5, 8, 16, 32}) {
    oracle::Mat h = random_matrix(n, rng);
    h = (0.5 * (h + h.adjoint())).eval();
    const oracle::Mat l = 0.5 * random_matrix(n, rng);
    const double rate = 0.2;
    const oracle::Mat rho0 = random_density(n, rng);
    const auto space = std::make_shared<const eh::CompositeSpace>(
        std::vector<eh::ModeSpec>{eh::ModeSpec{"x", eh::ModeKind::Resonator, static_cast<int>(n)}});
    const std::vector<eh::Observable> obs{{"x", eh::number_operator("x", space).matrix()}};
    const auto traces = eh::evolve_master(eh::DensityMatrix(rho0), eh::TimeDependentHamiltonian(h.sparseView()),
                                          {eh::CollapseChannel(l.sparseView(), rate)}, window(2.0, 0.5), obs);
    const oracle::Mat liou = oracle::liouvillian(h, {std::sqrt(rate) * l});
    const oracle::Mat number = eh::number_operator("x", space).dense();
    // Uniform grid: one propagator step per output.
    const oracle::Mat step = oracle::Mat(liou * 0.5).exp();
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), n * n);
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const oracle::Mat rho_t = Eigen::Map<const oracle::Mat>(v.data(), n, n);
      EXPECT_NEAR(traces["x"][i], (rho_t * number).trace().real(), 1e-7) << "n = " << n;
      if (i + 1 == traces.size()) EXPECT_LT((traces.final_state - rho_t).cwiseAbs().maxCoeff(), 1e-7) << "n = " << n;
      v = (step * v).eval();
    }
    EXPECT_LT(traces.max_trace_deviation, 1e-8);
    EXPECT_GT(traces.final_min_eigenvalue, -1e-6);
  }
}

TEST(Master, DeviceMatchesMatrixExponential) {
  const eh::DeviceParams p = small_device();
  const auto space = eh::build_space(p, 1);
  ASSERT_EQ(space->total_dimension(), 16);
  const auto h = eh::rotating_frame_hamiltonian(p, space, p.omega_r);
  const auto a = eh::embed(eh::lowering_operator(2), "r", space);
  const auto psi = eh::basis_state({{"q1", 1}}, *space);
  eh::EvolutionConfig cfg = window(40.0, 2.0);
  const auto traces = eh::evolve_master(eh::DensityMatrix::pure(psi), h, {eh::CollapseChannel(a.matrix(), p.kappa)},
                                        cfg, populations(space));
  const oracle::Mat liou = oracle::liouvillian(oracle::Mat(h.constant()), {std::sqrt(p.kappa) * oracle::Mat(a.dense())});
  const oracle::Mat rho0 = eh::DensityMatrix::pure(psi).matrix();
  for (std::size_t i = 0; i < traces.size(); i += 5) {
    const oracle::Mat rho_t = oracle::evolve(liou, rho0, traces.times[i]);
    for (const auto& label : traces.labels) {
      const double expected = (rho_t * eh::number_operator(label, space).dense()).trace().real();
      EXPECT_NEAR(traces[label][i], expected, 1e-7) << label << " t = " << traces.times[i];
    }
  }
}

TEST(Master, BlocksFollowCoherences) {
  const eh::DeviceParams p = small_device();
  const auto space = eh::build_space(p, 1);
  const auto h = eh::rotating_frame_hamiltonian(p, space, p.omega_r);
  const auto a = eh::embed(eh::lowering_operator(2), "r", space);
  const auto pure = eh::DensityMatrix::pure(eh::basis_state({{"q1", 1}}, *space));
  const auto t1 = eh::evolve_master(pure, h, {eh::CollapseChannel(a.matrix(), p.kappa)}, window(1.0, 1.0), {});
  eh::Index total = 0;
  for (auto d : t1.block_dimensions) total += d;
  EXPECT_EQ(total, 16);
  EXPECT_GT(t1.block_dimensions.size(), 1u);

  // Coherence between the vacuum and the fully excited state merges those two
  // excitation classes; the three others stay separate.
  const auto mixed = eh::DensityMatrix::maximally_mixed(16);
  eh::DenseMatrix m = mixed.matrix();
  m(0, 15) = m(15, 0) = 0.01;
  const auto t2 = eh::evolve_master(eh::DensityMatrix(m), h, {eh::CollapseChannel(a.matrix(), p.kappa)},
                                    window(1.0, 1.0), {});
  EXPECT_EQ(t2.block_dimensions.size(), 4u);
}

TEST(Master, SectorMatchesFullSpace) {
  eh::DeviceParams p = eh::DeviceParams::two_qubit_reference();
  p.omega_c = {eh::from_ghz(3.1), eh::from_ghz(2.9)};
  p.fock_cutoff = 2;
  const auto space = eh::build_space(p, 2);
  const auto h = eh::rotating_frame_hamiltonian(p, space, p.omega_r);
  const eh::CollapseChannel decay(eh::embed(eh::lowering_operator(3), "r", space).matrix(), p.kappa);
  const auto psi = eh::basis_state({{"q1", 1}}, *space);
  const auto obs = populations(space);
  auto cfg = window(60.0, 1.0);
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  const auto full = eh::evolve_master(eh::DensityMatrix::pure(psi), h, {decay}, cfg, obs);

  const auto sector = eh::excitation_sector(space, 1);
  std::vector<eh::Observable> restricted_obs;
  for (const auto& o : obs) restricted_obs.push_back({o.label, sector.restrict(o.op)});
  const auto reduced = eh::evolve_master(eh::DensityMatrix::pure(eh::StateVector(sector.restrict(psi.amplitudes()))),
                                         h.restricted(sector), {decay.restricted(sector)}, cfg, restricted_obs);
  for (const auto& label : full.labels) {
    for (std::size_t i = 0; i < full.size(); ++i) EXPECT_NEAR(full[label][i], reduced[label][i], 1e-8) << label;
  }
}

TEST(Master, RotatingFrameMatchesInteractionPicture) {
  eh::DeviceParams p = small_device();
  p.omega_c = {eh::from_ghz(3.3)};
  const auto space = eh::build_space(p, 1);
  const eh::CollapseChannel decay(eh::embed(eh::lowering_operator(2), "r", space).matrix(), p.kappa);
  const auto rho0 = eh::DensityMatrix::pure(eh::basis_state({{"q1", 1}}, *space));
  const auto obs = populations(space);
  const auto cfg = window(30.0, 0.5);
  const auto rot = eh::evolve_master(rho0, eh::rotating_frame_hamiltonian(p, space, p.omega_r), {decay}, cfg, obs);
  const auto ip = eh::evolve_master(rho0, eh::interaction_picture(p, space), {decay}, cfg, obs);
  for (const auto& label : rot.labels) {
    for (std::size_t i = 0; i < rot.size(); ++i) EXPECT_NEAR(rot[label][i], ip[label][i], 1e-7) << label;
  }
}

TEST(Master, LabFrameSpotCheck) {
  eh::DeviceParams p = small_device();
  const auto space = eh::build_space(p, 1);
  const eh::CollapseChannel decay(eh::embed(eh::lowering_operator(2), "r", space).matrix(), p.kappa);
  const auto rho0 = eh::DensityMatrix::pure(eh::basis_state({{"q1", 1}}, *space));
  const auto obs = populations(space);
  eh::EvolutionConfig cfg = window(2.0, 0.25);
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  const auto lab = eh::evolve_master(rho0, eh::TimeDependentHamiltonian(eh::build_hamiltonians(p, space).total.matrix()),
                                     {decay}, cfg, obs);
  const auto rot = eh::evolve_master(rho0, eh::rotating_frame_hamiltonian(p, space, p.omega_r), {decay}, cfg, obs);
  for (const auto& label : lab.labels) {
    for (std::size_t i = 0; i < lab.size(); ++i) EXPECT_NEAR(lab[label][i], rot[label][i], 1e-7) << label;
  }
}

TEST(State, RabiHalfPeriod) {
  const auto space = std::make_shared<const eh::CompositeSpace>(std::vector<eh::ModeSpec>{
      eh::ModeSpec::two_level("a", eh::ModeKind::WorkingQubit), eh::ModeSpec::two_level("b", eh::ModeKind::HeadQubit)});
  const double g = 0.7;
  const auto sm = eh::lowering_operator(2);
  const auto hop = eh::embed(eh::raising_operator(2), "a", space) * eh::embed(sm, "b", space);
  const auto h = g * (hop + hop.adjoint());
  eh::EvolutionConfig cfg;
  cfg.points = {std::numbers::pi / (2.0 * g)};
  cfg.t_end = cfg.points.back();
  const auto traces = eh::evolve_state(eh::basis_state({{"b", 1}}, *space), eh::TimeDependentHamiltonian(h.matrix()),
                                       cfg, populations(space));
  EXPECT_NEAR(traces["a"][0], 1.0, 1e-8);
  EXPECT_NEAR(traces["b"][0], 0.0, 1e-8);
  EXPECT_LT(traces.max_trace_deviation, 1e-8);
}

TEST(State, EigenstateIsStationary) {
  const eh::DeviceParams p = small_device();
  const auto space = eh::build_space(p, 1);
  const auto h = eh::rotating_frame_hamiltonian(p, space, p.omega_r);
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es{oracle::Mat(h.constant())};
  const auto psi = eh::StateVector::normalized(es.eigenvectors().col(5));
  const auto obs = populations(space);
  const auto traces = eh::evolve_state(psi, h, window(20.0, 1.0), obs);
  for (const auto& label : traces.labels) {
    for (std::size_t i = 0; i < traces.size(); ++i) EXPECT_NEAR(traces[label][i], traces[label][0], 1e-8) << label;
  }
}

TEST(State, MatchesUnitaryOracle) {
  const eh::DeviceParams p = small_device();
  const auto space = eh::build_space(p, 1);
  const auto h = eh::rotating_frame_hamiltonian(p, space, p.omega_r);
  const auto psi = eh::basis_state({{"q1", 1}}, *space);
  auto cfg = window(10.0, 2.0);
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  const auto traces = eh::evolve_state(psi, h, cfg, populations(space));
  const oracle::cplx i{0.0, 1.0};
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const Eigen::VectorXcd psi_t = oracle::Mat(-i * traces.times[k] * oracle::Mat(h.constant())).exp() * psi.amplitudes();
    EXPECT_NEAR(traces["q1"][k], std::norm(psi_t(space->basis_index(std::map<std::string, int>{{"q1", 1}}))), 1e-8);
  }
}

TEST(Evolution, ConfigValidation) {
  eh::EvolutionConfig c;
  c.t_end = 0.0;
  EXPECT_THROW(c.validate(), eh::PreconditionError);
  c.t_end = 1.0;
  c.grid_step = 0.0;
  EXPECT_THROW(c.validate(), eh::PreconditionError);
  c.grid_step = 0.3;
  const auto g = c.grid();
  EXPECT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  c.points = {0.5, 0.2};
  EXPECT_THROW(c.validate(), eh::PreconditionError);
  EXPECT_THROW(eh::CollapseChannel(eh::SparseMatrix(2, 2), -1.0), eh::PreconditionError);
}

TEST(Evolution, ExpectationIntegrity) {
  const eh::DenseMatrix rho = eh::DensityMatrix::maximally_mixed(2).matrix();
  eh::SparseMatrix op(2, 2);
  op.insert(0, 0) = eh::cplx(0.0, 1.0);
  EXPECT_THROW(eh::trace_expectation(rho, op), eh::IntegrityError);
  EXPECT_THROW(eh::trace_expectation(rho, eh::SparseMatrix(3, 3)), eh::ShapeError);
}

namespace {

eh::TraceSet probe_run(int cutoff, const std::map<std::string, int>& occupations) {
  eh::DeviceParams p = eh::DeviceParams::two_qubit_reference();
  p.omega_c = {eh::from_ghz(3.1), eh::from_ghz(3.1)};
  p.fock_cutoff = cutoff;
  const auto space = eh::build_space(p, 2);
  int n = 0;
  for (const auto& [label, k] : occupations) n += k;
  const auto sector = eh::excitation_sector(space, n);
  const eh::CollapseChannel decay(eh::embed(eh::lowering_operator(cutoff + 1), "r", space).matrix(), p.kappa);
  std::vector<eh::Observable> obs;
  for (const auto& o : populations(space)) obs.push_back({o.label, sector.restrict(o.op)});
  const auto psi = eh::StateVector(sector.restrict(eh::basis_state(occupations, *space).amplitudes()));
  return eh::evolve_master(eh::DensityMatrix::pure(psi), eh::rotating_frame_hamiltonian(p, space, p.omega_r).restricted(sector),
                           {decay.restricted(sector)}, window(60.0, 1.0), obs);
}

}  // namespace

TEST(Convergence, SingleExcitationIsCutoffIndependent) {
  const auto report = eh::convergence_probe([](int k) { return probe_run(k, {{"q1", 1}}); }, 2);
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.worst, 1e-10);
  EXPECT_EQ(report.labels.size(), 6u);
}

TEST(Convergence, TwoExcitationsFailAtCutoffOne) {
  const auto report = eh::convergence_probe([](int k) { return probe_run(k, {{"q1", 1}, {"q2", 1}}); }, 1);
  EXPECT_FALSE(report.passed);
  EXPECT_GT(report.worst, 1e-3);
  const auto good = eh::convergence_probe([](int k) { return probe_run(k, {{"q1", 1}, {"q2", 1}}); }, 2);
  EXPECT_LT(good.worst, 1e-8);
  EXPECT_THROW(eh::convergence_probe([](int k) { return probe_run(k, {{"q1", 1}}); }, 0), eh::PreconditionError);
}
