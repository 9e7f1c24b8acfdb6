#include <benchmark/benchmark.h>

#include <random>

#include "usde/estimator.hpp"
#include "usde/scenario.hpp"
#include "usde/simulation.hpp"

using namespace usde;

namespace {

ManipulatorModel planar2r() {
  LinkParams l;
  l.mass = 1.0;
  l.length = 1.0;
  l.com = Eigen::Vector3d(0.5, 0.0, 0.0);
  l.inertia = 1.0;
  return ManipulatorModel::planar_two_link({l, l},
                                           Eigen::Vector3d(0.0, -9.81, 0.0));
}

const ScenarioFile& flagship() {
  static const ScenarioFile sf =
      load_scenario_file(std::string(USDE_SCENARIO_DIR) + "/paper7dof.toml");
  return sf;
}

JointVec rand_vec(std::mt19937_64& rng, int n, double s) {
  std::uniform_real_distribution<double> u(-s, s);
  JointVec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

void BM_mass_matrix(benchmark::State& state, const ManipulatorModel& m) {
  std::mt19937_64 rng(1);
  const JointVec q = rand_vec(rng, m.dof(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.mass_matrix(q));
  }
}

void BM_coriolis(benchmark::State& state, const ManipulatorModel& m) {
  std::mt19937_64 rng(2);
  const JointVec q = rand_vec(rng, m.dof(), 1.0);
  const JointVec qd = rand_vec(rng, m.dof(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.coriolis_matrix(q, qd));
  }
}

void BM_bias(benchmark::State& state, const ManipulatorModel& m) {
  std::mt19937_64 rng(3);
  const JointVec q = rand_vec(rng, m.dof(), 1.0);
  const JointVec qd = rand_vec(rng, m.dof(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.bias_torque(q, qd));
  }
}

void BM_forward_dynamics(benchmark::State& state, const ManipulatorModel& m) {
  std::mt19937_64 rng(4);
  const JointVec q = rand_vec(rng, m.dof(), 1.0);
  const JointVec qd = rand_vec(rng, m.dof(), 1.0);
  const JointVec tau = rand_vec(rng, m.dof(), 5.0);
  const JointVec d = JointVec::Zero(m.dof());
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.forward_dynamics(q, qd, tau, d));
  }
}

void BM_estimator_update(benchmark::State& state) {
  const int n = 7;
  UsdeEstimator est(n, 0.08);
  std::mt19937_64 rng(5);
  const JointVec P = rand_vec(rng, n, 2.0);
  const JointVec H = rand_vec(rng, n, 20.0);
  const JointVec tau = rand_vec(rng, n, 20.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.update(P, H, tau, 1e-3));
  }
}

void BM_control_period_7dof(benchmark::State& state) {
  // One full closed-loop second at 1 kHz on the flagship scenario,
  // fixed-gain controller.
  const ScenarioFile& sf = flagship();
  Scenario sc = sf.scenario;
  sc.duration = 1.0;
  sc.payload.mass = 0.0;  // the full payload timeline does not fit 1 s
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_scenario(sc, ControllerVariant::Fg, sf.control));
  }
}

}  // namespace

int main(int argc, char** argv) {
  const auto p2 = planar2r();
  const auto& c7 = flagship().scenario.nominal;
  benchmark::RegisterBenchmark("mass_matrix/planar2r",
                               [&](benchmark::State& s) { BM_mass_matrix(s, p2); });
  benchmark::RegisterBenchmark("mass_matrix/chain7",
                               [&](benchmark::State& s) { BM_mass_matrix(s, c7); });
  benchmark::RegisterBenchmark("coriolis/planar2r",
                               [&](benchmark::State& s) { BM_coriolis(s, p2); });
  benchmark::RegisterBenchmark("coriolis/chain7",
                               [&](benchmark::State& s) { BM_coriolis(s, c7); });
  benchmark::RegisterBenchmark("bias/chain7",
                               [&](benchmark::State& s) { BM_bias(s, c7); });
  benchmark::RegisterBenchmark(
      "forward_dynamics/chain7",
      [&](benchmark::State& s) { BM_forward_dynamics(s, c7); });
  benchmark::RegisterBenchmark("estimator_update/7dof", BM_estimator_update);
  benchmark::RegisterBenchmark("closed_loop_1s/chain7_fg",
                               BM_control_period_7dof)
      ->Unit(benchmark::kMillisecond);

  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
