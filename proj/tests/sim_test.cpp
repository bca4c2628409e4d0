#include <doctest.h>

#include <cmath>

#include "rayflow/errors.hpp"
#include "rayflow/generators.hpp"
#include "rayflow/rng.hpp"
#include "rayflow/sim.hpp"

using namespace rayflow;

namespace {

const Matrix kDemoA{2, {-2.0, 1.0, 1.0, -2.0}};
const std::vector<double> kDemoB{1.0, 1.0};

Matrix ones_offdiag(int m) {
  Matrix w = Matrix::zero(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) w(i, j) = 1.0;
  return w;
}

}  // namespace

TEST_CASE("config validation") {
  const auto model = LinearModel::metzler(kDemoA, kDemoB);
  IntegratorConfig cfg;
  cfg.step = 0.0;
  CHECK_THROWS_AS(integrate(*model, {0.0, 0.0}, cfg), ConfigError);
  cfg.step = 1e-3;
  cfg.t_end = cfg.t0;
  CHECK_THROWS_AS(integrate(*model, {0.0, 0.0}, cfg), ConfigError);
  cfg.t_end = 1.0;
  cfg.sample_every = 0;
  CHECK_THROWS_AS(integrate(*model, {0.0, 0.0}, cfg), ConfigError);
  cfg.sample_every = 1;
  CHECK_THROWS_AS(integrate(*model, {0.0}, cfg), StructuralError);
  CHECK_THROWS_AS(integrate(*model, {-1.0, 0.0}, cfg), DomainError);
}

TEST_CASE("linear demo converges to the equilibrium") {
  const auto model = LinearModel::metzler(kDemoA, kDemoB);
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  const Trajectory traj = integrate(*model, {0.0, 0.0}, cfg);
  const LinearEquilibrium eq = linear_equilibrium(*model);
  CHECK(std::abs(traj.states.back()[0] - eq.equilibrium[0]) < 1e-6);
  CHECK(std::abs(traj.states.back()[1] - eq.equilibrium[1]) < 1e-6);
  CHECK(std::abs(traj.states.back()[0] - 1.0) < 1e-6);
}

TEST_CASE("ratio run endpoint agrees with a fine-step reference") {
  const auto model = RatioConsensusModel::constant(ones_offdiag(2));
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  const Trajectory traj = integrate(*model, {3.0, 1.0}, cfg);

  IntegratorConfig fine = cfg;
  fine.step = 1e-5;
  fine.sample_every = 2000;
  const Trajectory ref = integrate(*model, {3.0, 1.0}, fine);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(traj.states.back()[static_cast<std::size_t>(i)] -
                   ref.states.back()[static_cast<std::size_t>(i)]) < 1e-6);

  // endpoint is on the ray, between the initial extremes
  const double a = traj.states.back()[0], b = traj.states.back()[1];
  CHECK(std::abs(a - b) < 1e-6);
  CHECK(a > 1.0);
  CHECK(a < 3.0);
}

TEST_CASE("equilibrium start yields a bitwise-constant trajectory") {
  const auto model = RatioConsensusModel::constant(ones_offdiag(3));
  IntegratorConfig cfg;
  cfg.t_end = 5.0;
  const Trajectory traj = integrate(*model, {2.5, 2.5, 2.5}, cfg);
  for (const auto& state : traj.states) {
    CHECK(state[0] == 2.5);
    CHECK(state[1] == 2.5);
    CHECK(state[2] == 2.5);
  }
}

TEST_CASE("trajectory invariants: ordered times, constant width, honored decimation") {
  const auto model = RatioConsensusModel::constant(ones_offdiag(3));
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  cfg.step = 1e-3;
  cfg.sample_every = 7;  // does not divide the step count
  const Trajectory traj = integrate(*model, {3.0, 1.0, 2.0}, cfg);
  REQUIRE_FALSE(traj.times.empty());
  CHECK(traj.times.front() == cfg.t0);
  CHECK(traj.times.back() == doctest::Approx(cfg.t_end));
  for (std::size_t k = 1; k < traj.times.size(); ++k)
    CHECK(traj.times[k] > traj.times[k - 1]);
  for (const auto& state : traj.states) CHECK(state.size() == 3);
  // 1000 steps: retained at t0, every 7th step, and the endpoint
  CHECK(traj.states.size() == 1 + 1000 / 7 + 1);
}

TEST_CASE("integration is a pure function of its inputs") {
  const auto model = RatioConsensusModel::constant(ones_offdiag(2));
  IntegratorConfig cfg;
  cfg.t_end = 3.0;
  const Trajectory a = integrate(*model, {3.0, 1.0}, cfg);
  const Trajectory b = integrate(*model, {3.0, 1.0}, cfg);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) CHECK(a.states[k] == b.states[k]);
}

TEST_CASE("fourth-order convergence against the closed-form solution") {
  // From the origin the demo system follows 1 - exp(-t) in both components.
  const auto model = LinearModel::metzler(kDemoA, kDemoB);
  auto endpoint_error = [&](double h) {
    IntegratorConfig cfg;
    cfg.step = h;
    cfg.t_end = 1.0;
    cfg.sample_every = 1;
    const Trajectory traj = integrate(*model, {0.0, 0.0}, cfg);
    const double exact = 1.0 - std::exp(-1.0);
    return std::max(std::abs(traj.states.back()[0] - exact),
                    std::abs(traj.states.back()[1] - exact));
  };
  const double ratio = endpoint_error(0.05) / endpoint_error(0.025);
  CHECK(ratio > 8.0);
  CHECK(ratio < 32.0);
}

TEST_CASE("refinement pass records the half-step discrepancy") {
  const auto model = LinearModel::metzler(kDemoA, kDemoB);
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  cfg.step = 0.05;
  cfg.refine = true;
  const Trajectory traj = integrate(*model, {3.0, 0.0}, cfg);
  REQUIRE(traj.refinement_discrepancy.has_value());
  CHECK(*traj.refinement_discrepancy > 0.0);
  CHECK(*traj.refinement_discrepancy < 1e-6);
}

TEST_CASE("field is constant along rays for scale-invariant models") {
  const auto model = RatioConsensusModel::constant(ones_offdiag(3));
  IntegratorConfig cfg;
  cfg.t_end = 5.0;
  const Trajectory traj = integrate(*model, {3.0, 1.0, 0.5}, cfg);
  for (std::size_t k = 0; k < traj.states.size(); k += 37) {
    const DensityVector& e = traj.states[k];
    DensityVector doubled(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) doubled[i] = 2.0 * e[i];
    CHECK(model->eval(traj.times[k], doubled) == model->eval(traj.times[k], e));
  }
}

TEST_CASE("positivity monitor passes random substitute-coupled systems") {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const MetzlerInstance inst = random_metzler_instance(rng, 8);
    IntegratorConfig cfg;
    cfg.step = 1e-2;
    cfg.t_end = 20.0;
    cfg.sample_every = 100;
    const Trajectory traj = integrate(*inst.model, inst.start, cfg);
    const PositivityReport report = monitor_positivity(traj);
    CHECK(report.ok);
    CHECK(traj.min_component >= -1e-9);
  }
}

TEST_CASE("positivity monitor flags the planted violation") {
  // rate of the first component at the start is -3: it immediately crosses
  const LinearModel model(Matrix{2, {-2.0, -3.0, 1.0, -2.0}}, {0.0, 0.0});
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  const Trajectory traj = integrate(model, {0.0, 1.0}, cfg);
  const PositivityReport report = monitor_positivity(traj);
  CHECK_FALSE(report.ok);
  REQUIRE(report.first_violation.has_value());
  CHECK(report.first_violation->component == 0);
  CHECK(report.first_violation->t < 0.1);
  CHECK(report.first_violation->value < -1e-9);
}

TEST_CASE("origin with zero offset stays identically zero") {
  const auto model = LinearModel::metzler(kDemoA, {0.0, 0.0});
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  const Trajectory traj = integrate(*model, {0.0, 0.0}, cfg);
  for (const auto& state : traj.states) {
    CHECK(state[0] == 0.0);
    CHECK(state[1] == 0.0);
  }
  CHECK(monitor_positivity(traj).ok);
}

TEST_CASE("box monitor: ratio run stays inside the initial box") {
  const auto model = RatioConsensusModel::constant(ones_offdiag(2));
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  const Trajectory traj = integrate(*model, {3.0, 1.0}, cfg);
  const BoxReport report = monitor_box(traj, *model);
  CHECK(report.applicable);
  CHECK(report.ok);
  CHECK(traj.initial_max == 3.0);
  CHECK(traj.initial_min == 1.0);
  for (const auto& state : traj.states)
    for (double x : state) {
      CHECK(x <= 3.0 + 1e-9);
      CHECK(x >= 1.0 - 1e-9);
    }
}

TEST_CASE("box monitor: on-ray start is a vacuous pass") {
  const auto model = RatioConsensusModel::constant(ones_offdiag(2));
  IntegratorConfig cfg;
  cfg.t_end = 5.0;
  const Trajectory traj = integrate(*model, {2.0, 2.0}, cfg);
  const BoxReport report = monitor_box(traj, *model);
  CHECK(report.applicable);
  CHECK(report.ok);
}

TEST_CASE("box monitor: symmetric difference consensus contracts the same way") {
  const LaplacianModel model(Matrix{2, {0.0, 1.0, 1.0, 0.0}});
  IntegratorConfig cfg;
  cfg.t_end = 10.0;
  const Trajectory traj = integrate(model, {1.0, 3.0}, cfg);
  const BoxReport report = monitor_box(traj, model);
  CHECK(report.applicable);
  CHECK(report.ok);
  // v_max falls at rate 2 initially
  const DensityVector& after = traj.states[1];
  const double dt = traj.times[1] - traj.times[0];
  CHECK(after[1] == doctest::Approx(3.0 - 2.0 * dt).epsilon(1e-3));
}

TEST_CASE("box monitor fails when the trajectory escapes the domain") {
  // Near-one-way coupling, still irreducible so the contraction claim (and
  // with it the box monitor) applies: a coarse step walks the second
  // component through zero. A ratio field can never push the running max
  // up or the running min down by more than its own step rates, so escape
  // is the monitor's observable failure mode.
  const auto model =
      RatioConsensusModel::constant(Matrix{2, {0.0, 1e-9, 1.0, 0.0}});
  CHECK(model->claimed_classes().has(ModelClass::RayContracting));
  IntegratorConfig cfg;
  cfg.step = 0.5;
  cfg.t_end = 4.0;
  const Trajectory traj = integrate(*model, {1e-6, 1.0}, cfg);
  REQUIRE(traj.domain_exit_at.has_value());
  const BoxReport report = monitor_box(traj, *model);
  CHECK(report.applicable);
  CHECK_FALSE(report.ok);
}

TEST_CASE("box monitor is gated on the contraction claim") {
  const auto model = LinearModel::metzler(kDemoA, kDemoB);
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  const Trajectory traj = integrate(*model, {3.0, 1.0}, cfg);
  const BoxReport report = monitor_box(traj, *model);
  CHECK_FALSE(report.applicable);
}

TEST_CASE("open-cone guard truncates with a domain exit") {
  // One-way coupling: e_1' = e_0/e_1 - 1 ~ -1 while e_0 stays frozen near
  // the floor, so a coarse step walks e_1 straight through zero.
  const auto model = RatioConsensusModel::constant(Matrix{2, {0.0, 0.0, 1.0, 0.0}});
  IntegratorConfig cfg;
  cfg.t_end = 4.0;
  cfg.step = 0.5;
  const Trajectory traj = integrate(*model, {1e-6, 1.0}, cfg);
  REQUIRE(traj.domain_exit_at.has_value());
  CHECK(*traj.domain_exit_at <= 2.0);
  CHECK(traj.times.back() < 4.0);  // truncated
  // the last good state is retained and is still inside the domain
  CHECK(traj.times.back() == *traj.domain_exit_at - cfg.step);
  CHECK(traj.states.back()[0] > 0.0);
  CHECK(traj.states.back()[1] > 0.0);
  CHECK_FALSE(monitor_positivity(traj).ok);
}

TEST_CASE("epsilon study: shifted endpoints approach the base linearly") {
  const auto model = LinearModel::metzler(kDemoA, kDemoB);
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  const EpsilonStudy study =
      epsilon_limit_study(model, {3.0, 1.0}, {1e-2, 1e-3, 1e-4}, cfg);
  REQUIRE(study.entries.size() == 3);
  CHECK(study.decreasing);
  CHECK(study.entries[0].endpoint_discrepancy >
        study.entries[1].endpoint_discrepancy);
  CHECK(study.entries[1].endpoint_discrepancy >
        study.entries[2].endpoint_discrepancy);
  // perturbation theory: discrepancy ~ eps * ||A^{-1} 1|| = eps
  CHECK(study.entries[0].endpoint_discrepancy == doctest::Approx(1e-2).epsilon(1e-3));
  CHECK(study.loglog_slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("epsilon study: zero entry has exactly zero discrepancy") {
  const auto model = LinearModel::metzler(kDemoA, kDemoB);
  IntegratorConfig cfg;
  cfg.t_end = 5.0;
  const EpsilonStudy study = epsilon_limit_study(model, {1.0, 2.0}, {1e-2, 0.0}, cfg);
  CHECK(study.entries[1].endpoint_discrepancy == 0.0);
}

TEST_CASE("epsilon study: boundary starts become interior immediately") {
  const auto model = LinearModel::metzler(kDemoA, {0.0, 0.0});
  const ModelPtr shifted = add_epsilon(model, 1e-3);
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  cfg.sample_every = 1;
  const Trajectory traj = integrate(*shifted, {0.0, 0.0}, cfg);
  CHECK(traj.states[1][0] > 0.0);
  CHECK(traj.states[1][1] > 0.0);
  CHECK(monitor_positivity(traj).ok);
}

TEST_CASE("epsilon study requires the boundary-nonnegative claim") {
  const auto ratio = RatioConsensusModel::constant(ones_offdiag(2));
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  CHECK_THROWS_AS(
      epsilon_limit_study(ratio, {1.0, 1.0}, {1e-2}, cfg), ConfigError);
}

TEST_CASE("non-finite states raise a numeric error with the last good time") {
  // unstable linear growth with a huge step overflows quickly
  const LinearModel model(Matrix{1, {-1.0}}, {0.0});
  IntegratorConfig cfg;
  cfg.step = 3.0;  // |1 + z + z^2/2 + z^3/6 + z^4/24| > 1 at z = -3
  cfg.t_end = 3e5;
  cfg.sample_every = 1000000;
  try {
    integrate(model, {1.0}, cfg);
    FAIL("expected NumericError");
  } catch (const NumericError& err) {
    CHECK(err.last_good_time > 0.0);
  }
}
