#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "test_support.hpp"
#include "usde/analysis.hpp"

using namespace usde;

namespace {

Trace synthetic_trace(const std::vector<double>& enorms) {
  Trace tr;
  tr.dof = 1;
  tr.control_dt = 1.0;
  tr.phase_times = {0.0, static_cast<double>(enorms.size())};
  for (size_t i = 0; i < enorms.size(); ++i) {
    TraceRecord r;
    r.t = static_cast<double>(i);
    r.e = JointVec::Constant(1, enorms[i]);
    r.q = r.qd = r.q_des = r.S = r.tau_cmd = r.tau_applied = r.d_hat =
        r.d_true = r.d_ref = JointVec::Zero(1);
    tr.records.push_back(r);
  }
  return tr;
}

}  // namespace

TEST_CASE("metrics of a constant error norm") {
  const Trace tr = synthetic_trace({0.3, 0.3, 0.3, 0.3});
  const auto m = compute_metrics(tr, 0.0, 3.0);
  CHECK(m.mean == doctest::Approx(0.3));
  CHECK(m.median == doctest::Approx(0.3));
  CHECK(m.rms == doctest::Approx(0.3));
}

TEST_CASE("metrics of alternating-sign errors use the norm") {
  const Trace tr = synthetic_trace({0.2, -0.2, 0.2, -0.2});
  const auto m = compute_metrics(tr, 0.0, 3.0);
  CHECK(m.mean == doctest::Approx(0.2));
  CHECK(m.median == doctest::Approx(0.2));
  CHECK(m.rms == doctest::Approx(0.2));
}

TEST_CASE("metrics of the two-step trace {0, 1}") {
  const Trace tr = synthetic_trace({0.0, 1.0});
  const auto m = compute_metrics(tr, 0.0, 1.0);
  CHECK(m.mean == doctest::Approx(0.5));
  CHECK(m.median == doctest::Approx(0.5));
  CHECK(m.rms == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("empty metrics window throws") {
  const Trace tr = synthetic_trace({0.1, 0.2});
  CHECK_THROWS_AS(compute_metrics(tr, 5.0, 6.0), std::invalid_argument);
}

TEST_CASE("gain certificate matches the frozen oracle (T1=4, T2=12)") {
  // Frozen against a numeric eigenvalue oracle; also equals the exact
  // algebra -(A^T P + P A) of the unperturbed loop.
  const auto c = st_gain_certificate(4.0, 12.0, 0.0, 0.0);
  CHECK(c.P(0, 0) == doctest::Approx(32.0));
  CHECK(c.P(0, 1) == doctest::Approx(-2.0));
  CHECK(c.P(1, 1) == doctest::Approx(1.0));
  CHECK(c.Q(0, 0) == doctest::Approx(80.0));
  CHECK(c.Q(0, 1) == doctest::Approx(-8.0));
  CHECK(c.Q(1, 1) == doctest::Approx(2.0));
  CHECK(c.pd_ok);
  CHECK(c.gamma == doctest::Approx(0.0345174267898273).epsilon(1e-10));
}

TEST_CASE("gain certificate for the wrist gains (T1=2, T2=4)") {
  const auto c = st_gain_certificate(2.0, 4.0, 0.05, 0.05);
  CHECK(c.pd_ok);
  CHECK(c.gamma == doctest::Approx(0.0534818202284906).epsilon(1e-10));
}

TEST_CASE("huge delta2 breaks the certificate") {
  const auto c = st_gain_certificate(4.0, 12.0, 0.0, 1000.0);
  CHECK(!c.pd_ok);
}

TEST_CASE("certificate is monotone in the perturbation bounds") {
  // growing delta1/delta2 never turns pd_ok from false to true
  for (const auto [t1, t2] : {std::pair{4.0, 12.0}, {2.0, 4.0}, {1.0, 2.0}}) {
    bool seen_false = false;
    for (double d = 0.0; d < 3.0; d += 0.1) {
      const auto c = st_gain_certificate(t1, t2, d, 2.0 * d);
      if (seen_false) CHECK(!c.pd_ok);
      if (!c.pd_ok) seen_false = true;
    }
  }
}

TEST_CASE("P stays positive definite for any positive T2") {
  for (double t1 = 0.5; t1 < 8.0; t1 += 0.7) {
    for (double t2 = 0.1; t2 < 20.0; t2 += 1.3) {
      const auto c = st_gain_certificate(t1, t2, 0.0, 0.0);
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c.P);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("certificate rejects non-positive gains") {
  CHECK_THROWS_AS(st_gain_certificate(0.0, 1.0, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(st_gain_certificate(1.0, -1.0, 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("finite-time bound arithmetic") {
  CHECK(finite_time_bound(0.0, 2.0, 0.5) == doctest::Approx(0.0));
  CHECK(finite_time_bound(1.0, 2.0, 0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(finite_time_bound(1.0, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(finite_time_bound(1.0, 2.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(finite_time_bound(-1.0, 2.0, 0.5), std::invalid_argument);
}

TEST_CASE("V1 monitor arithmetic") {
  const auto m = test::unit_planar2r();
  TraceRecord r;
  r.q = JointVec::Zero(2);
  r.S = JointVec::Zero(2);
  r.d_true = JointVec::Zero(2);
  r.d_hat = JointVec::Zero(2);
  CHECK(lyapunov_v1(r, m) == doctest::Approx(0.0));

  r.d_true = (JointVec(2) << 2.0, 0.0).finished();  // |dtilde| = 2
  CHECK(lyapunov_v1(r, m) == doctest::Approx(2.0));
}

TEST_CASE("V3 is positive away from the origin for certified gains") {
  const auto m = test::unit_planar2r();
  auto cfg = test::planar_config();
  std::mt19937_64 rng(41);
  TraceRecord r;
  r.q = JointVec::Zero(2);
  r.Sigma = JointVec::Zero(2);
  r.d_hat = JointVec::Zero(2);
  r.d_true = JointVec::Zero(2);
  r.S = JointVec::Zero(2);
  CHECK(lyapunov_v3(r, m, cfg) == doctest::Approx(0.0));
  for (int it = 0; it < 50; ++it) {
    r.S = test::random_vec(rng, 2, 1.0);
    r.Sigma = test::random_vec(rng, 2, 2.0);
    r.d_true = test::random_vec(rng, 2, 2.0);
    if (r.S.norm() + r.Sigma.norm() + r.d_true.norm() < 1e-9) continue;
    CHECK(lyapunov_v3(r, m, cfg) > 0.0);
  }
}

TEST_CASE("V1 decrease check holds on the planar fixed-gain run") {
  Scenario sc = test::planar_scenario(4.0);
  sc.external.constant = (JointVec(2) << 2.0, -1.0).finished();
  const auto cfg = test::planar_config();
  const Trace tr = run_scenario(sc, ControllerVariant::Fg, cfg);
  const auto res = check_v1_decrease(tr, sc.nominal, cfg, 1.0);
  CHECK(res.alpha1 > 0.0);
  CHECK(res.fraction_ok >= 0.99);
}

TEST_CASE("V1 decrease check requires k < gamma1") {
  Scenario sc = test::planar_scenario(1.0);
  auto cfg = test::planar_config();
  const Trace tr = run_scenario(sc, ControllerVariant::Fg, cfg);
  cfg.filter_k = 50.0;
  CHECK_THROWS_AS(check_v1_decrease(tr, sc.nominal, cfg, 0.5),
                  std::invalid_argument);
}

TEST_CASE("measured perturbation bounds are finite and scale with safety") {
  Scenario sc = test::planar_scenario(3.0);
  sc.external.constant = (JointVec(2) << 1.0, -0.5).finished();
  const auto cfg = test::planar_config();
  const Trace tr = run_scenario(sc, ControllerVariant::St, cfg);
  const auto b1 = measure_st_bounds(tr, sc.nominal, cfg, 1.0);
  const auto b2 = measure_st_bounds(tr, sc.nominal, cfg, 2.0);
  CHECK(b1.delta1.allFinite());
  CHECK(b1.delta2.allFinite());
  CHECK(b1.delta2.minCoeff() > 0.0);
  CHECK((b2.delta2 - 2.0 * b1.delta2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scalar super-twisting loop meets its finite-time bound") {
  const auto r = scalar_st_experiment(4.0, 12.0, 2.0, 0.2, 0.5, 0.08, 0.5,
                                      1e-3, 1e-5, 60.0);
  CHECK(r.certified);
  CHECK(r.stayed);
  CHECK(r.entry_time <= r.t_f);
  CHECK(r.delta1 <= 0.2 + 1e-9);
  CHECK(r.delta2 <= 0.5 + 1e-9);
}

TEST_CASE("adaptive-gain constants search reports feasibility honestly") {
  const JointVec pi = JointVec::Constant(7, 70.0);
  // Leakage of order one admits positive E
  const auto ok = ag_constants_search(8.0, 0.08, 5.0, pi,
                                      JointVec::Constant(7, 1.0));
  CHECK(ok.feasible);
  CHECK(ok.E > 0.0);
  CHECK(ok.alpha2 > 0.0);
  // Tiny leakage cannot dominate the 1/gamma2 term with gamma2 < gamma1
  const auto bad = ag_constants_search(8.0, 0.08, 5.0, pi,
                                       JointVec::Constant(7, 0.02));
  CHECK(!bad.feasible);
}

TEST_CASE("identical variants give identical comparison metrics") {
  Scenario sc = test::planar_scenario(2.0);
  sc.external.constant = (JointVec(2) << 1.0, -0.5).finished();
  const auto cfg = test::planar_config();
  const auto rep = compare_controllers(
      sc, cfg, {ControllerVariant::Ctc, ControllerVariant::Ctc}, 0.0, 2.0, 2);
  REQUIRE(rep.results.size() == 2);
  CHECK(rep.results[0].window.rms == rep.results[1].window.rms);
  CHECK(rep.results[0].window.mean == rep.results[1].window.mean);
  CHECK(rep.results[0].chattering == rep.results[1].chattering);
}

TEST_CASE("report files are written and well-formed") {
  Scenario sc = test::planar_scenario(1.0);
  sc.external.constant = (JointVec(2) << 1.0, -0.5).finished();
  const auto cfg = test::planar_config();
  const auto rep = compare_controllers(
      sc, cfg, {ControllerVariant::Ctc, ControllerVariant::Fg}, 0.0, 1.0, 1);
  const std::string dir = "analysis_report_test";
  std::filesystem::create_directories(dir);
  write_metrics_csv(dir + "/metrics.csv", rep);
  write_report_markdown(dir + "/report.md", rep);
  write_long_csv(dir + "/long.csv", rep.results[1].trace, 50);

  std::ifstream mcsv(dir + "/metrics.csv");
  std::string header;
  std::getline(mcsv, header);
  CHECK(header.find("variant") == 0);
  std::ifstream lcsv(dir + "/long.csv");
  std::getline(lcsv, header);
  CHECK(header == "t,series,joint,value");
  std::filesystem::remove_all(dir);
}
