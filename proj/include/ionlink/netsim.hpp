#pragma once

#include <array>
#include <string>
#include <vector>

#include "ionlink/measure.hpp"
#include "ionlink/tomo.hpp"
#include "ionlink/types.hpp"

namespace ionlink {

/// Attempt-loop timing, seconds. Defaults are the experiment's sequence
/// numbers: 1 MHz attempts in bursts of 500 interleaved with 100 us of
/// cooling; each attempt holds 350 ns state preparation, a 100 ns settle
/// delay, a 30 ns detection window opening 30 ns after the excitation
/// pulse, and a 100 ns branch decision.
struct ProtocolTiming {
  double cooling_duration = 100e-6;
  double attempt_period = 1e-6;
  long attempts_per_loop = 500;
  double state_prep = 350e-9;
  double prep_to_pulse_delay = 100e-9;
  double detection_window = 30e-9;
  double window_latency = 30e-9;
  double branch_decision = 100e-9;

  void validate() const;
};

/// Per-node physics parameters: ground-state preparation, pulsed
/// excitation, S-manifold branching, net click probability, detector dark
/// rate, and the two single-qubit error magnitudes.
struct NodeParams {
  double p_down = 0.99;
  double p_excite = 0.97;
  double p_s_decay = 0.95;
  double p_click = 0.023;
  double dark_rate_per_detector = 60.0;  // s^-1
  double dephasing_error = 0.014;        // phase-flip probability per ion
  double rotation_error_per_pulse = 0.003;

  static NodeParams alice();  // p_click 0.021
  static NodeParams bob();    // p_click 0.024

  void validate() const;
  double emission_click_probability() const;  // p_down * p_excite * p_s_decay * p_click
};

enum class BellHerald { psi_plus, psi_minus };
enum class HeraldClass { psi_plus, psi_minus, invalid };

struct HeraldPattern {
  int detector_a = 0;  // APD indices, distinct
  int detector_b = 2;
  BellHerald bell_label = BellHerald::psi_minus;

  std::string name() const;  // e.g. "apd0-apd2"
};

/// Bell-state analyser model: photon mode overlap v, the detector-pair ->
/// Bell-state herald map, the heralded-state phase, and relative
/// per-detector efficiencies.
struct AnalyserParams {
  double mode_overlap = 0.987;
  double bell_phase = 0.0;
  std::array<double, 4> detector_efficiency = {1.0, 1.0, 1.0, 1.0};
  std::vector<HeraldPattern> herald_map = default_herald_map();

  static std::vector<HeraldPattern> default_herald_map();
  void validate() const;
};

/// Herald probability per attempt: only two of the four two-photon Bell
/// states produce valid coincidences, so
/// P = 1/2 * prod_n (P_down P_e P_S P_click)_n.
double success_probability(const NodeParams& a, const NodeParams& b);

/// attempts_per_loop / (attempts_per_loop * attempt_period + cooling).
double effective_attempt_rate(const ProtocolTiming& t);

double entanglement_rate(double p_success, double attempt_rate);

/// Geometric attempt counts (support >= 1) until a herald; deterministic
/// under the seed.
std::vector<long long> sample_attempts_until_success(double p, uint64_t seed, long n_draws);

struct HistogramBin {
  double lo, hi;
  long long count;
};
std::vector<HistogramBin> attempt_histogram(const std::vector<long long>& draws, int bins);

/// Classify a detector click set within one window: exactly two distinct
/// detectors forming a mapped pair give the pair's Bell label; everything
/// else is invalid.
HeraldClass herald_classify(const std::vector<int>& clicks, const AnalyserParams& ap);

struct HeraldOutcome {
  HeraldPattern pattern;
  DensityMatrix state;   // ion-ion state conditioned on this pattern
  double probability;    // absolute herald probability per attempt
};

/// Bell-state-analyser forward model. Projects the photons of
/// rho_a (x) rho_b with the pattern's herald effect
/// E = v |Psi+-><Psi+-| + (1-v)(|HV><HV| + |VH><VH|)/2, adds the
/// dark-count false-coincidence branch, traces out the photons and applies
/// the per-ion dephasing and rotation-error channels.
std::vector<HeraldOutcome> heralded_state(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                          const AnalyserParams& ap, const NodeParams& node_a,
                                          const NodeParams& node_b, const ProtocolTiming& timing);

struct SimulatedExperiment {
  std::vector<std::string> pattern_names;  // canonical order of ap.herald_map
  std::vector<CountTable> tables;          // one per pattern, 9 Pauli rows
  std::vector<long long> attempts;         // attempts before each herald
  double herald_probability = 0.0;         // per attempt, summed over patterns
};

/// Schedule `sweeps` passes through a seeded random permutation of the
/// nine Pauli bases, `heralds_per_setting` heralded states each; assign
/// each herald to a pattern by probability and draw the measurement
/// outcome by the Born rule. Per-setting grand totals are scheduled, not
/// sampled.
SimulatedExperiment simulate_experiment(const std::vector<HeraldOutcome>& outcomes,
                                        long heralds_per_setting, int sweeps, uint64_t seed);

/// All protocol knobs in one place, parsed from a flat key-value file.
struct NetsimConfig {
  ProtocolTiming timing;
  NodeParams alice = NodeParams::alice();
  NodeParams bob = NodeParams::bob();
  AnalyserParams analyser;

  static NetsimConfig parse(const std::string& text);
  static std::string default_text();  // documented sample config
};

}  // namespace ionlink
