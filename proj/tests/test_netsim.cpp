#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ionlink/dataset.hpp"
#include "ionlink/linalg.hpp"
#include "ionlink/metrics.hpp"
#include "ionlink/netsim.hpp"

using namespace ionlink;

namespace {

NodeParams noiseless_node() {
  NodeParams n;
  n.dark_rate_per_detector = 0.0;
  n.dephasing_error = 0.0;
  n.rotation_error_per_pulse = 0.0;
  return n;
}

AnalyserParams ideal_analyser() {
  AnalyserParams ap;
  ap.mode_overlap = 1.0;
  return ap;
}

DensityMatrix ideal_ion_photon() { return DensityMatrix::from_pure(bell_state(BellLabel::phi_plus)); }

}  // namespace

TEST_SUITE("netsim") {

TEST_CASE("success probability: Eq.-(2) arithmetic and degenerate limits") {
  NodeParams unit;
  unit.p_down = unit.p_excite = unit.p_s_decay = unit.p_click = 1.0;
  CHECK(success_probability(unit, unit) == doctest::Approx(0.5));

  NodeParams sym;
  sym.p_click = 0.023;
  const double q = 0.99 * 0.97 * 0.95 * 0.023;
  CHECK(success_probability(sym, sym) == doctest::Approx(0.5 * q * q).epsilon(1e-12));
  CHECK(0.5 * q * q == doctest::Approx(2.20e-4).epsilon(5e-3));
  // close to the measured 1/4578
  CHECK(std::abs(success_probability(sym, sym) - 2.18e-4) < 4e-6);

  NodeParams dead = sym;
  dead.p_click = 0.0;
  CHECK(success_probability(dead, sym) == doctest::Approx(0.0));
}

TEST_CASE("success probability is monotone in every factor") {
  const NodeParams base;
  auto p = [&](auto mutate) {
    NodeParams n = base;
    mutate(n);
    return success_probability(n, base);
  };
  const double p0 = success_probability(base, base);
  CHECK(p([](NodeParams& n) { n.p_down *= 0.9; }) < p0);
  CHECK(p([](NodeParams& n) { n.p_excite *= 0.9; }) < p0);
  CHECK(p([](NodeParams& n) { n.p_s_decay *= 0.9; }) < p0);
  CHECK(p([](NodeParams& n) { n.p_click *= 0.9; }) < p0);
}

TEST_CASE("effective attempt rate") {
  const ProtocolTiming t;
  CHECK(effective_attempt_rate(t) == doctest::Approx(2.5e6 / 3.0).epsilon(1e-12));
  CHECK(std::llround(effective_attempt_rate(t)) == 833333);

  ProtocolTiming no_cool = t;
  no_cool.cooling_duration = 1e-300;
  CHECK(effective_attempt_rate(no_cool) == doctest::Approx(1e6).epsilon(1e-9));

  ProtocolTiming short_loop = t;
  short_loop.attempts_per_loop = 100;
  CHECK(effective_attempt_rate(short_loop) == doctest::Approx(500000.0).epsilon(1e-12));

  ProtocolTiming bad = t;
  bad.attempt_period = 100e-9;  // internals no longer fit
  CHECK_THROWS_AS(effective_attempt_rate(bad), ValidationError);
}

TEST_CASE("entanglement rate") {
  CHECK(entanglement_rate(2.18e-4, 2.5e6 / 3.0) == doctest::Approx(181.67).epsilon(1e-3));
  CHECK(entanglement_rate(1.0 / 4578.0, 833333.0) == doctest::Approx(182.0).epsilon(1e-2));
  CHECK(entanglement_rate(0.0, 833333.0) == doctest::Approx(0.0));
}

TEST_CASE("geometric attempt sampling") {
  const std::vector<long long> ones = sample_attempts_until_success(1.0, 3, 100);
  for (long long v : ones) CHECK(v == 1);

  const double p = 2.18e-4;
  const long n = 100000;
  const std::vector<long long> draws = sample_attempts_until_success(p, 42, n);
  const double mean =
      std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(n);
  const double sigma_mean = std::sqrt((1.0 - p) / (p * p * n));
  CHECK(std::abs(mean - 1.0 / p) < 3.0 * sigma_mean);

  // determinism
  const std::vector<long long> again = sample_attempts_until_success(p, 42, n);
  CHECK(draws == again);

  const auto hist = attempt_histogram(draws, 40);
  CHECK(hist.size() == 40);
  long long total = 0;
  for (const auto& b : hist) total += b.count;
  CHECK(total == n);
  CHECK(hist[0].count > hist[10].count);  // exponential shape
}

TEST_CASE("herald classification") {
  const AnalyserParams ap;
  CHECK(herald_classify({0, 2}, ap) == HeraldClass::psi_minus);
  CHECK(herald_classify({3, 1}, ap) == HeraldClass::psi_minus);
  CHECK(herald_classify({0, 1}, ap) == HeraldClass::psi_plus);
  CHECK(herald_classify({2, 3}, ap) == HeraldClass::psi_plus);
  CHECK(herald_classify({0, 3}, ap) == HeraldClass::invalid);  // unmapped pair
  CHECK(herald_classify({3}, ap) == HeraldClass::invalid);
  CHECK(herald_classify({}, ap) == HeraldClass::invalid);
  CHECK(herald_classify({0, 1, 2}, ap) == HeraldClass::invalid);
  CHECK(herald_classify({1, 1}, ap) == HeraldClass::invalid);
}

TEST_CASE("heralded_state: ideal inputs give exact Bell states") {
  const auto outcomes = heralded_state(ideal_ion_photon(), ideal_ion_photon(), ideal_analyser(),
                                       noiseless_node(), noiseless_node(), ProtocolTiming{});
  REQUIRE(outcomes.size() == 4);
  for (const HeraldOutcome& o : outcomes) {
    const BellLabel expect = o.pattern.bell_label == BellHerald::psi_minus
                                 ? BellLabel::psi_minus
                                 : BellLabel::psi_plus;
    CHECK(std::abs(fidelity_to_pure(o.state, bell_state(expect)) - 1.0) < 1e-10);
  }
}

TEST_CASE("heralded_state: pattern plus invalid probabilities sum to the two-photon rate") {
  const NodeParams a = noiseless_node();
  NodeParams b = noiseless_node();
  b.p_click = 0.024;
  AnalyserParams ap;
  ap.mode_overlap = 0.93;
  const auto outcomes =
      heralded_state(ideal_ion_photon(), ideal_ion_photon(), ap, a, b, ProtocolTiming{});
  const double p2 = a.emission_click_probability() * b.emission_click_probability();
  double heralds = 0.0;
  for (const HeraldOutcome& o : outcomes) heralds += o.probability;
  // ideal photonic marginal is I/4: half the two-photon mass lies in the
  // HV/VH span regardless of mode overlap, the rest is invalid
  const double invalid = p2 - heralds;
  CHECK(heralds == doctest::Approx(0.5 * p2).epsilon(1e-10));
  CHECK(invalid == doctest::Approx(0.5 * p2).epsilon(1e-10));
}

TEST_CASE("heralded_state: mode mismatch maps to ion-ion infidelity") {
  AnalyserParams ap;
  ap.mode_overlap = 1.0 - 2.0 * 0.013;
  const auto outcomes = heralded_state(ideal_ion_photon(), ideal_ion_photon(), ap,
                                       noiseless_node(), noiseless_node(), ProtocolTiming{});
  for (const HeraldOutcome& o : outcomes) {
    const BellLabel expect = o.pattern.bell_label == BellHerald::psi_minus
                                 ? BellLabel::psi_minus
                                 : BellLabel::psi_plus;
    const double infidelity = 1.0 - fidelity_to_pure(o.state, bell_state(expect));
    CHECK(infidelity >= 0.010);
    CHECK(infidelity <= 0.017);
  }
}

TEST_CASE("heralded_state: bell_phase shifts the heralded phase") {
  AnalyserParams ap = ideal_analyser();
  ap.bell_phase = 0.7;
  const auto outcomes = heralded_state(ideal_ion_photon(), ideal_ion_photon(), ap,
                                       noiseless_node(), noiseless_node(), ProtocolTiming{});
  for (const HeraldOutcome& o : outcomes) {
    const BellLabel expect = o.pattern.bell_label == BellHerald::psi_minus
                                 ? BellLabel::psi_minus
                                 : BellLabel::psi_plus;
    CHECK(std::abs(fidelity_to_pure(o.state, bell_state(expect, 0.7)) - 1.0) < 1e-10);
    CHECK(fidelity_to_pure(o.state, bell_state(expect)) < 1.0 - 1e-3);
  }
}

TEST_CASE("heralded_state: dark counts at the paper's scale") {
  NodeParams node;  // defaults carry the error budget values
  node.p_click = 0.023;
  NodeParams clean = node;
  clean.dark_rate_per_detector = 0.0;
  AnalyserParams ap;  // mode_overlap 0.987
  const DensityMatrix in = ideal_ion_photon();
  const auto with_dark = heralded_state(in, in, ap, node, node, ProtocolTiming{});
  const auto no_dark = heralded_state(in, in, ap, clean, clean, ProtocolTiming{});
  for (size_t k = 0; k < with_dark.size(); ++k) {
    const BellLabel expect = with_dark[k].pattern.bell_label == BellHerald::psi_minus
                                 ? BellLabel::psi_minus
                                 : BellLabel::psi_plus;
    const double contribution = fidelity_to_pure(no_dark[k].state, bell_state(expect)) -
                                fidelity_to_pure(with_dark[k].state, bell_state(expect));
    CHECK(contribution > 0.0);
    CHECK(contribution <= 5e-4);
  }
}

TEST_CASE("heralded_state: zero click probability is a degenerate herald") {
  NodeParams dead = noiseless_node();
  dead.p_click = 0.0;
  CHECK_THROWS_AS(heralded_state(ideal_ion_photon(), ideal_ion_photon(), ideal_analyser(), dead,
                                 dead, ProtocolTiming{}),
                  NumericalError);
}

TEST_CASE("heralded_state: detector efficiency asymmetry skews herald counts") {
  AnalyserParams ap = ideal_analyser();
  ap.detector_efficiency = {0.9, 1.0, 1.0, 1.0};  // APD0 slightly weak
  const auto outcomes = heralded_state(ideal_ion_photon(), ideal_ion_photon(), ap,
                                       noiseless_node(), noiseless_node(), ProtocolTiming{});
  // patterns containing APD0 (apd0-apd2, apd0-apd1) lose probability
  CHECK(outcomes[0].probability < outcomes[1].probability);
  CHECK(outcomes[2].probability < outcomes[3].probability);

  const SimulatedExperiment sim = simulate_experiment(outcomes, 100, 4, 5);
  CHECK(sim.tables[0].total() < sim.tables[1].total());
  CHECK(sim.tables[2].total() < sim.tables[3].total());
}

TEST_CASE("simulate_experiment: schedule, determinism and anticorrelation") {
  const auto outcomes = heralded_state(ideal_ion_photon(), ideal_ion_photon(), ideal_analyser(),
                                       noiseless_node(), noiseless_node(), ProtocolTiming{});
  const SimulatedExperiment sim = simulate_experiment(outcomes, 1000, 4, 99);
  CHECK(sim.attempts.size() == 36000);
  double grand = 0.0;
  for (const CountTable& t : sim.tables) grand += t.total();
  CHECK(grand == doctest::Approx(36000));

  // per-setting grand totals are scheduled: 4000 per basis across patterns
  for (size_t r = 0; r < 9; ++r) {
    double row_total = 0.0;
    for (const CountTable& t : sim.tables) {
      for (double c : t.rows[r].counts) row_total += c;
    }
    CHECK(row_total == doctest::Approx(4000));
  }

  // ideal Psi- pattern: ZZ row is anticorrelated, (0, N/2, N/2, 0)-shaped
  const CountTable& first = sim.tables[0];
  CHECK(first.rows[0].counts[0] == doctest::Approx(0.0));
  CHECK(first.rows[0].counts[3] == doctest::Approx(0.0));
  CHECK(first.rows[0].counts[1] + first.rows[0].counts[2] ==
        doctest::Approx(first.total() / 9.0).epsilon(0.2));

  // bit-reproducible under the same seed; same totals under another seed
  const SimulatedExperiment again = simulate_experiment(outcomes, 1000, 4, 99);
  CHECK(again.attempts == sim.attempts);
  for (size_t k = 0; k < 4; ++k) CHECK(again.tables[k].to_csv() == sim.tables[k].to_csv());
  const SimulatedExperiment other = simulate_experiment(outcomes, 1000, 4, 100);
  double grand_other = 0.0;
  for (const CountTable& t : other.tables) grand_other += t.total();
  CHECK(grand_other == doctest::Approx(36000));
  CHECK(other.tables[0].to_csv() != sim.tables[0].to_csv());
}

TEST_CASE("round trip: simulated tables refit close to the generating states") {
  // generate from the builtin MLE fits and refit
  const Dataset ds = builtin_dataset();
  const std::vector<MeasurementSetting> settings = pauli_settings_all();
  std::vector<HeraldOutcome> outcomes;
  const AnalyserParams ap;
  std::vector<DensityMatrix> gen_states;
  for (int k = 0; k < 4; ++k) {
    const MleResult fit = mle_rrr(ds.tables[static_cast<size_t>(k)], settings, MleOptions{});
    gen_states.push_back(fit.state);
    outcomes.push_back({ap.herald_map[static_cast<size_t>(k)], fit.state, 5.5e-5});
  }
  const SimulatedExperiment sim = simulate_experiment(outcomes, 1000, 4, 2024);
  for (int k = 0; k < 4; ++k) {
    const MleResult refit = mle_rrr(sim.tables[static_cast<size_t>(k)], settings, MleOptions{});
    const double gen_fef = fully_entangled_fraction(gen_states[static_cast<size_t>(k)]);
    const double ref_fef = fully_entangled_fraction(refit.state);
    CHECK(std::abs(ref_fef - gen_fef) < 0.02);  // ~3 sigma at N ~ 9000
  }
}

TEST_CASE("config parse: defaults, overrides and rejects") {
  const NetsimConfig def = NetsimConfig::parse(NetsimConfig::default_text());
  CHECK(def.alice.p_click == doctest::Approx(0.021));
  CHECK(def.bob.p_click == doctest::Approx(0.024));
  CHECK(def.analyser.mode_overlap == doctest::Approx(0.987));
  CHECK(def.timing.attempts_per_loop == 500);

  const NetsimConfig tweaked = NetsimConfig::parse(
      "alice.p_click = 0.05\nherald_map = 0:3=psi_minus;1:2=psi_minus;0:1=psi_plus;"
      "2:3=psi_plus\n");
  CHECK(tweaked.alice.p_click == doctest::Approx(0.05));
  CHECK(tweaked.analyser.herald_map[0].detector_b == 3);

  CHECK_THROWS_AS(NetsimConfig::parse("bogus_key = 1\n"), ValidationError);
  CHECK_THROWS_AS(NetsimConfig::parse("alice.p_click = banana\n"), ValidationError);
  CHECK_THROWS_AS(NetsimConfig::parse("alice.p_click = 1.5\n"), ValidationError);
}

}  // TEST_SUITE
