#include "ionlink/netsim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ionlink/linalg.hpp"
#include "ionlink/rng.hpp"

namespace ionlink {

namespace {

// photon basis |H> = 0, |V> = 1; Psi+-(phi) = (|VH> +- e^{i phi}|HV>)/sqrt2
ComplexMatrix herald_effect(BellHerald label, double v, double phase) {
  std::vector<cd> amp(4, cd(0.0));
  const double s = 1.0 / std::sqrt(2.0);
  amp[2] = s;  // |VH>
  amp[1] = (label == BellHerald::psi_plus ? 1.0 : -1.0) * std::polar(s, phase);
  const PureState bell(4, amp);
  ComplexMatrix e = bell.projector() * cd(v);
  e.at(1, 1) += (1.0 - v) * 0.5;  // |HV><HV|
  e.at(2, 2) += (1.0 - v) * 0.5;  // |VH><VH|
  return e;
}

ComplexMatrix conj_single_qubit(const ComplexMatrix& rho4, const ComplexMatrix& op, int qubit) {
  const ComplexMatrix full = qubit == 0 ? tensor(op, ComplexMatrix::identity(2))
                                        : tensor(ComplexMatrix::identity(2), op);
  return full * rho4 * full.adjoint();
}

ComplexMatrix phase_flip(const ComplexMatrix& rho4, int qubit, double p) {
  if (p <= 0.0) return rho4;
  return rho4 * cd(1.0 - p) + conj_single_qubit(rho4, pauli_matrix(Pauli::Z), qubit) * cd(p);
}

ComplexMatrix depolarize(const ComplexMatrix& rho4, int qubit, double p) {
  if (p <= 0.0) return rho4;
  ComplexMatrix mixed = rho4 * cd(0.25);
  mixed += conj_single_qubit(rho4, pauli_matrix(Pauli::X), qubit) * cd(0.25);
  mixed += conj_single_qubit(rho4, pauli_matrix(Pauli::Y), qubit) * cd(0.25);
  mixed += conj_single_qubit(rho4, pauli_matrix(Pauli::Z), qubit) * cd(0.25);
  return rho4 * cd(1.0 - p) + mixed * cd(p);
}

}  // namespace

void ProtocolTiming::validate() const {
  const double internals =
      state_prep + prep_to_pulse_delay + window_latency + detection_window + branch_decision;
  for (double v : {cooling_duration, attempt_period, state_prep, prep_to_pulse_delay,
                   detection_window, window_latency, branch_decision})
    if (v <= 0.0) throw ValidationError("protocol durations must be positive");
  if (attempts_per_loop < 1) throw ValidationError("attempts_per_loop must be >= 1");
  if (internals > attempt_period)
    throw ValidationError("attempt internals exceed the attempt period");
}

NodeParams NodeParams::alice() {
  NodeParams n;
  n.p_click = 0.021;
  return n;
}

NodeParams NodeParams::bob() {
  NodeParams n;
  n.p_click = 0.024;
  return n;
}

void NodeParams::validate() const {
  for (double p : {p_down, p_excite, p_s_decay, p_click, dephasing_error, rotation_error_per_pulse})
    if (p < 0.0 || p > 1.0) throw ValidationError("node probabilities must be in [0, 1]");
  if (dark_rate_per_detector < 0.0) throw ValidationError("dark rate must be >= 0");
}

double NodeParams::emission_click_probability() const {
  return p_down * p_excite * p_s_decay * p_click;
}

std::string HeraldPattern::name() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "apd%d-apd%d", detector_a, detector_b);
  return buf;
}

std::vector<HeraldPattern> AnalyserParams::default_herald_map() {
  // opposite NPBS sides -> Psi-, same side -> Psi+; canonical pattern order
  return {{0, 2, BellHerald::psi_minus},
          {1, 3, BellHerald::psi_minus},
          {0, 1, BellHerald::psi_plus},
          {2, 3, BellHerald::psi_plus}};
}

void AnalyserParams::validate() const {
  if (mode_overlap < 0.0 || mode_overlap > 1.0)
    throw ValidationError("mode_overlap must be in [0, 1]");
  if (herald_map.size() != 4) throw ValidationError("herald_map must cover 4 patterns");
  std::array<bool, 16> seen{};
  for (const HeraldPattern& hp : herald_map) {
    if (hp.detector_a < 0 || hp.detector_a > 3 || hp.detector_b < 0 || hp.detector_b > 3 ||
        hp.detector_a == hp.detector_b)
      throw ValidationError("herald pattern detectors must be a distinct pair of APD0..APD3");
    const int lo = std::min(hp.detector_a, hp.detector_b);
    const int hi = std::max(hp.detector_a, hp.detector_b);
    if (seen[static_cast<size_t>(lo * 4 + hi)])
      throw ValidationError("herald_map lists a detector pair twice");
    seen[static_cast<size_t>(lo * 4 + hi)] = true;
  }
  for (double e : detector_efficiency)
    if (e < 0.0 || e > 1.0) throw ValidationError("detector efficiencies must be in [0, 1]");
}

double success_probability(const NodeParams& a, const NodeParams& b) {
  a.validate();
  b.validate();
  return 0.5 * a.emission_click_probability() * b.emission_click_probability();
}

double effective_attempt_rate(const ProtocolTiming& t) {
  t.validate();
  const double loop = static_cast<double>(t.attempts_per_loop) * t.attempt_period + t.cooling_duration;
  return static_cast<double>(t.attempts_per_loop) / loop;
}

double entanglement_rate(double p_success, double attempt_rate) {
  if (p_success < 0.0 || attempt_rate < 0.0)
    throw ValidationError("entanglement_rate: inputs must be nonnegative");
  return p_success * attempt_rate;
}

std::vector<long long> sample_attempts_until_success(double p, uint64_t seed, long n_draws) {
  if (p <= 0.0 || p > 1.0) throw ValidationError("success probability must be in (0, 1]");
  Rng rng(seed);
  std::vector<long long> out;
  out.reserve(static_cast<size_t>(n_draws));
  for (long i = 0; i < n_draws; ++i) out.push_back(rng.geometric(p));
  return out;
}

std::vector<HistogramBin> attempt_histogram(const std::vector<long long>& draws, int bins) {
  if (draws.empty() || bins < 1) throw ValidationError("attempt_histogram: empty input");
  const double maxv = static_cast<double>(*std::max_element(draws.begin(), draws.end()));
  const double width = std::max(1.0, maxv / bins);
  std::vector<HistogramBin> out;
  for (int b = 0; b < bins; ++b)
    out.push_back({b * width, (b + 1) * width, 0});
  for (long long d : draws) {
    int b = static_cast<int>(static_cast<double>(d - 1) / width);
    b = std::clamp(b, 0, bins - 1);
    ++out[static_cast<size_t>(b)].count;
  }
  return out;
}

HeraldClass herald_classify(const std::vector<int>& clicks, const AnalyserParams& ap) {
  ap.validate();
  if (clicks.size() != 2 || clicks[0] == clicks[1]) return HeraldClass::invalid;
  for (const HeraldPattern& hp : ap.herald_map) {
    const bool match = (clicks[0] == hp.detector_a && clicks[1] == hp.detector_b) ||
                       (clicks[0] == hp.detector_b && clicks[1] == hp.detector_a);
    if (match)
      return hp.bell_label == BellHerald::psi_plus ? HeraldClass::psi_plus
                                                   : HeraldClass::psi_minus;
  }
  return HeraldClass::invalid;
}

std::vector<HeraldOutcome> heralded_state(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                          const AnalyserParams& ap, const NodeParams& node_a,
                                          const NodeParams& node_b, const ProtocolTiming& timing) {
  if (rho_a.dim() != 4 || rho_b.dim() != 4)
    throw ValidationError("heralded_state: ion-photon inputs must be 4-dimensional");
  ap.validate();
  node_a.validate();
  node_b.validate();
  timing.validate();

  const std::vector<int> dims = {2, 2, 2, 2};  // ionA, photonA, ionB, photonB
  const ComplexMatrix rho16 = tensor(rho_a.matrix(), rho_b.matrix());

  const double qa = node_a.emission_click_probability();
  const double qb = node_b.emission_click_probability();
  const double p2 = qa * qb;
  const double dark_rate =
      0.5 * (node_a.dark_rate_per_detector + node_b.dark_rate_per_detector);
  const double p_dark = dark_rate * timing.detection_window;
  // single real photon at one named detector, partner undetected
  const double p_single_named = (qa * (1.0 - qb) + qb * (1.0 - qa)) / 4.0;

  // false-coincidence branch leaves the photon-traced marginal product state
  const ComplexMatrix marginal = partial_trace(rho16, {0, 2}, dims);

  std::vector<HeraldOutcome> out;
  for (const HeraldPattern& hp : ap.herald_map) {
    const ComplexMatrix effect =
        herald_effect(hp.bell_label, ap.mode_overlap, ap.bell_phase);
    const ComplexMatrix full = embed_pair(effect, 1, 3, dims);
    const ComplexMatrix projected = full * rho16;
    const double p_cond = projected.trace().real();
    const double eff_a = ap.detector_efficiency[static_cast<size_t>(hp.detector_a)];
    const double eff_b = ap.detector_efficiency[static_cast<size_t>(hp.detector_b)];
    // the Bell label's probability splits evenly over its two patterns
    const double p_true = p2 * 0.5 * p_cond * eff_a * eff_b;
    const double p_false = p_dark * p_single_named * (eff_a + eff_b);
    const double p_herald = p_true + p_false;
    if (p_herald < 1e-15)
      throw NumericalError("heralded_state: degenerate herald for pattern " + hp.name());

    ComplexMatrix ion = partial_trace(projected, {0, 2}, dims) * cd(p_true / std::max(p_cond, 1e-300));
    ion += marginal * cd(p_false);
    ion = ion * cd(1.0 / p_herald);
    ion = (ion + ion.adjoint()) * cd(0.5);

    ion = phase_flip(ion, 0, node_a.dephasing_error);
    ion = phase_flip(ion, 1, node_b.dephasing_error);
    ion = depolarize(ion, 0, node_a.rotation_error_per_pulse);
    ion = depolarize(ion, 1, node_b.rotation_error_per_pulse);

    out.push_back({hp, DensityMatrix::repaired(ion), p_herald});
  }
  return out;
}

SimulatedExperiment simulate_experiment(const std::vector<HeraldOutcome>& outcomes,
                                        long heralds_per_setting, int sweeps, uint64_t seed) {
  if (outcomes.empty()) throw ValidationError("simulate_experiment: no herald outcomes");
  if (heralds_per_setting < 1 || sweeps < 1)
    throw ValidationError("simulate_experiment: plan must be positive");

  const std::vector<MeasurementSetting> settings = pauli_settings_all();
  std::vector<double> herald_probs;
  double p_total = 0.0;
  for (const HeraldOutcome& o : outcomes) {
    herald_probs.push_back(o.probability);
    p_total += o.probability;
  }
  // outcome probabilities per (pattern, setting) computed once
  std::vector<std::vector<std::vector<double>>> born(outcomes.size());
  for (size_t k = 0; k < outcomes.size(); ++k)
    for (const MeasurementSetting& s : settings)
      born[k].push_back(s.probabilities(outcomes[k].state));

  SimulatedExperiment sim;
  sim.herald_probability = p_total;
  for (const HeraldOutcome& o : outcomes) {
    sim.pattern_names.push_back(o.pattern.name());
    CountTable t;
    for (const MeasurementSetting& s : settings) t.rows.push_back({s.label, {0, 0, 0, 0}});
    sim.tables.push_back(std::move(t));
  }

  Rng rng(seed);
  std::vector<int> order(settings.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    rng.shuffle(order);
    for (int setting_idx : order) {
      for (long h = 0; h < heralds_per_setting; ++h) {
        const int pattern = rng.categorical(herald_probs);
        const int outcome = rng.categorical(born[static_cast<size_t>(pattern)]
                                                [static_cast<size_t>(setting_idx)]);
        sim.tables[static_cast<size_t>(pattern)]
            .rows[static_cast<size_t>(setting_idx)]
            .counts[static_cast<size_t>(outcome)] += 1.0;
        sim.attempts.push_back(rng.geometric(std::min(1.0, p_total)));
      }
    }
  }
  return sim;
}

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = true;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
      if (!blank)
        throw ValidationError("config line " + std::to_string(lineno) + " is not key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      const size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

double as_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ValidationError("config value for '" + key + "' is not a number: '" + v + "'");
  }
}

}  // namespace

NetsimConfig NetsimConfig::parse(const std::string& text) {
  NetsimConfig c;
  auto kv = parse_kv(text);
  auto take = [&](const std::string& key, double& target) {
    auto it = kv.find(key);
    if (it != kv.end()) {
      target = as_double(it->second, key);
      kv.erase(it);
    }
  };
  take("cooling_duration", c.timing.cooling_duration);
  take("attempt_period", c.timing.attempt_period);
  double apl = static_cast<double>(c.timing.attempts_per_loop);
  take("attempts_per_loop", apl);
  c.timing.attempts_per_loop = static_cast<long>(apl);
  take("state_prep", c.timing.state_prep);
  take("prep_to_pulse_delay", c.timing.prep_to_pulse_delay);
  take("detection_window", c.timing.detection_window);
  take("window_latency", c.timing.window_latency);
  take("branch_decision", c.timing.branch_decision);

  auto take_node = [&](const std::string& prefix, NodeParams& n) {
    take(prefix + ".p_down", n.p_down);
    take(prefix + ".p_excite", n.p_excite);
    take(prefix + ".p_s_decay", n.p_s_decay);
    take(prefix + ".p_click", n.p_click);
    take(prefix + ".dark_rate_per_detector", n.dark_rate_per_detector);
    take(prefix + ".dephasing_error", n.dephasing_error);
    take(prefix + ".rotation_error_per_pulse", n.rotation_error_per_pulse);
  };
  take_node("alice", c.alice);
  take_node("bob", c.bob);

  take("mode_overlap", c.analyser.mode_overlap);
  take("bell_phase", c.analyser.bell_phase);
  for (int d = 0; d < 4; ++d)
    take("detector_efficiency_apd" + std::to_string(d),
         c.analyser.detector_efficiency[static_cast<size_t>(d)]);

  auto hm = kv.find("herald_map");
  if (hm != kv.end()) {
    // e.g. herald_map = 0:2=psi_minus;1:3=psi_minus;0:1=psi_plus;2:3=psi_plus
    std::vector<HeraldPattern> map;
    std::istringstream ss(hm->second);
    std::string entry;
    while (std::getline(ss, entry, ';')) {
      int da = 0, db = 0;
      char label[16] = {0};
      if (std::sscanf(entry.c_str(), "%d:%d=%15s", &da, &db, label) != 3)
        throw ValidationError("bad herald_map entry '" + entry + "'");
      BellHerald bl;
      if (std::string(label) == "psi_plus")
        bl = BellHerald::psi_plus;
      else if (std::string(label) == "psi_minus")
        bl = BellHerald::psi_minus;
      else
        throw ValidationError("herald_map label must be psi_plus or psi_minus");
      map.push_back({da, db, bl});
    }
    c.analyser.herald_map = std::move(map);
    kv.erase(hm);
  }
  if (!kv.empty()) throw ValidationError("unknown config key '" + kv.begin()->first + "'");

  c.timing.validate();
  c.alice.validate();
  c.bob.validate();
  c.analyser.validate();
  return c;
}

std::string NetsimConfig::default_text() {
  return
      "# Attempt-loop timing (seconds)\n"
      "cooling_duration = 100e-6\n"
      "attempt_period = 1e-6\n"
      "attempts_per_loop = 500\n"
      "state_prep = 350e-9\n"
      "prep_to_pulse_delay = 100e-9\n"
      "detection_window = 30e-9\n"
      "window_latency = 30e-9\n"
      "branch_decision = 100e-9\n"
      "\n"
      "# Node parameters (probabilities; dark rate in 1/s)\n"
      "alice.p_down = 0.99\n"
      "alice.p_excite = 0.97\n"
      "alice.p_s_decay = 0.95\n"
      "alice.p_click = 0.021\n"
      "alice.dark_rate_per_detector = 60\n"
      "alice.dephasing_error = 0.014\n"
      "alice.rotation_error_per_pulse = 0.003\n"
      "bob.p_down = 0.99\n"
      "bob.p_excite = 0.97\n"
      "bob.p_s_decay = 0.95\n"
      "bob.p_click = 0.024\n"
      "bob.dark_rate_per_detector = 60\n"
      "bob.dephasing_error = 0.014\n"
      "bob.rotation_error_per_pulse = 0.003\n"
      "\n"
      "# Bell-state analyser\n"
      "mode_overlap = 0.987\n"
      "bell_phase = 0\n"
      "detector_efficiency_apd0 = 1\n"
      "detector_efficiency_apd1 = 1\n"
      "detector_efficiency_apd2 = 1\n"
      "detector_efficiency_apd3 = 1\n"
      "herald_map = 0:2=psi_minus;1:3=psi_minus;0:1=psi_plus;2:3=psi_plus\n";
}

}  // namespace ionlink
