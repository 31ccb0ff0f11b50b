#include "ionlink/ionlink.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "ionlink/dataset.hpp"
#include "ionlink/linalg.hpp"
#include "ionlink/metrics.hpp"
#include "ionlink/netsim.hpp"
#include "ionlink/optics.hpp"
#include "ionlink/tomo.hpp"

using namespace ionlink;

struct ionlink_table {
  CountTable t;
};
struct ionlink_dataset {
  Dataset ds;
};
struct ionlink_state {
  DensityMatrix rho;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
ionlink_status guarded(Fn&& fn) {
  try {
    fn();
    return IONLINK_OK;
  } catch (const ValidationError& e) {
    g_last_error = e.what();
    return IONLINK_ERR_VALIDATION;
  } catch (const NumericalError& e) {
    g_last_error = e.what();
    return IONLINK_ERR_NUMERICAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IONLINK_ERR_NUMERICAL;
  }
}

ionlink_status need(bool ok, const char* what) {
  if (!ok) {
    g_last_error = std::string("null argument: ") + what;
    return IONLINK_ERR_VALIDATION;
  }
  return IONLINK_OK;
}

MetricFn metric_by_name(const std::string& name) {
  if (name == "fef")
    return [](const DensityMatrix& r) { return fully_entangled_fraction(r); };
  if (name == "concurrence")
    return [](const DensityMatrix& r) { return concurrence(r); };
  if (name == "ef")
    return [](const DensityMatrix& r) { return entanglement_of_formation(r); };
  throw ValidationError("unknown metric '" + name + "' (use fef, concurrence or ef)");
}

}  // namespace

extern "C" {

const char* ionlink_last_error(void) { return g_last_error.c_str(); }

void ionlink_string_free(char* s) { std::free(s); }

ionlink_status ionlink_table_parse(const char* csv_text, ionlink_table** out) {
  if (auto s = need(csv_text && out, "table_parse")) return s;
  return guarded([&] { *out = new ionlink_table{CountTable::parse_csv(csv_text)}; });
}

ionlink_status ionlink_table_load(const char* path, ionlink_table** out) {
  if (auto s = need(path && out, "table_load")) return s;
  return guarded([&] { *out = new ionlink_table{CountTable::parse_csv(read_text_file(path))}; });
}

ionlink_status ionlink_table_to_csv(const ionlink_table* t, char** out_csv) {
  if (auto s = need(t && out_csv, "table_to_csv")) return s;
  return guarded([&] { *out_csv = dup_string(t->t.to_csv()); });
}

ionlink_status ionlink_table_total(const ionlink_table* t, double* out_total) {
  if (auto s = need(t && out_total, "table_total")) return s;
  return guarded([&] { *out_total = t->t.total(); });
}

void ionlink_table_free(ionlink_table* t) { delete t; }

ionlink_status ionlink_dataset_builtin(ionlink_dataset** out) {
  if (auto s = need(out != nullptr, "dataset_builtin")) return s;
  return guarded([&] { *out = new ionlink_dataset{builtin_dataset()}; });
}

ionlink_status ionlink_dataset_load(const char* const paths[4], ionlink_dataset** out) {
  if (auto s = need(paths && out, "dataset_load")) return s;
  return guarded([&] {
    Dataset ds = builtin_dataset();  // canonical pattern names
    for (int k = 0; k < 4; ++k) {
      if (!paths[k]) throw ValidationError("dataset_load: path " + std::to_string(k) + " is null");
      ds.tables[static_cast<size_t>(k)] = CountTable::parse_csv(read_text_file(paths[k]));
      ds.provenance = "loaded from files";
    }
    ds.validate();
    *out = new ionlink_dataset{std::move(ds)};
  });
}

ionlink_status ionlink_dataset_table(const ionlink_dataset* ds, int pattern, ionlink_table** out) {
  if (auto s = need(ds && out, "dataset_table")) return s;
  return guarded([&] {
    if (pattern < 0 || pattern > 3) throw ValidationError("pattern index must be 0..3");
    *out = new ionlink_table{ds->ds.tables[static_cast<size_t>(pattern)]};
  });
}

ionlink_status ionlink_dataset_pattern_name(const ionlink_dataset* ds, int pattern,
                                            char** out_name) {
  if (auto s = need(ds && out_name, "dataset_pattern_name")) return s;
  return guarded([&] {
    if (pattern < 0 || pattern > 3) throw ValidationError("pattern index must be 0..3");
    *out_name = dup_string(ds->ds.pattern_names[static_cast<size_t>(pattern)]);
  });
}

void ionlink_dataset_free(ionlink_dataset* ds) { delete ds; }

ionlink_status ionlink_state_load(const char* path, ionlink_state** out) {
  if (auto s = need(path && out, "state_load")) return s;
  return guarded([&] { *out = new ionlink_state{density_from_text(read_text_file(path))}; });
}

ionlink_status ionlink_state_parse(const char* text, ionlink_state** out) {
  if (auto s = need(text && out, "state_parse")) return s;
  return guarded([&] { *out = new ionlink_state{density_from_text(text)}; });
}

ionlink_status ionlink_state_to_text(const ionlink_state* s, char** out_text) {
  if (auto st = need(s && out_text, "state_to_text")) return st;
  return guarded([&] { *out_text = dup_string(density_to_text(s->rho)); });
}

void ionlink_state_free(ionlink_state* s) { delete s; }

ionlink_status ionlink_fit(const ionlink_table* t, const char* method, double tolerance,
                           long max_iterations, ionlink_state** out_state, char** out_diag_kv) {
  if (auto s = need(t && method && out_state, "fit")) return s;
  return guarded([&] {
    MleOptions opts;
    if (tolerance > 0.0) opts.tolerance = tolerance;
    if (max_iterations > 0) opts.max_iterations = max_iterations;
    const std::vector<MeasurementSetting> settings = pauli_settings_all();
    MleResult r = [&] {
      const std::string m(method);
      if (m == "rrr") return mle_rrr(t->t, settings, opts);
      if (m == "direct") return mle_direct(t->t, settings, opts);
      throw ValidationError("unknown fit method '" + m + "' (use rrr or direct)");
    }();
    *out_state = new ionlink_state{r.state};
    if (out_diag_kv) *out_diag_kv = dup_string(r.diagnostics_kv());
  });
}

ionlink_status ionlink_bootstrap(const ionlink_table* t, const char* mode, const char* metric,
                                 int replicates, uint64_t seed, int threads, char** out_kv) {
  if (auto s = need(t && mode && metric && out_kv, "bootstrap")) return s;
  return guarded([&] {
    const std::vector<MeasurementSetting> settings = pauli_settings_all();
    const MetricFn fn = metric_by_name(metric);
    BootstrapResult r = [&] {
      const std::string m(mode);
      if (m == "parametric") {
        MleResult fit = mle_rrr(t->t, settings, MleOptions{});
        return bootstrap_parametric(fit.state, settings, t->t, replicates, fn, metric, seed,
                                    MleOptions{}, threads);
      }
      if (m == "nonparametric")
        return bootstrap_nonparametric(t->t, settings, replicates, fn, metric, seed, MleOptions{},
                                       threads);
      throw ValidationError("unknown bootstrap mode '" + m + "'");
    }();
    *out_kv = dup_string(r.to_kv());
  });
}

ionlink_status ionlink_bayes(const ionlink_table* t, const char* metric, long chain_length,
                             long burn_in, long thinning, uint64_t seed, char** out_kv) {
  if (auto s = need(t && metric && out_kv, "bayes")) return s;
  return guarded([&] {
    ChainOptions chain;
    if (chain_length > 0) chain.chain_length = chain_length;
    if (burn_in > 0) chain.burn_in = burn_in;
    if (thinning > 0) chain.thinning = thinning;
    PosteriorSample p = bayes_mh(t->t, pauli_settings_all(), chain, metric_by_name(metric), seed);
    *out_kv = dup_string(std::string("metric = ") + metric + "\n" + p.to_kv());
  });
}

ionlink_status ionlink_state_metrics(const ionlink_state* s, char** out_kv) {
  if (auto st = need(s && out_kv, "state_metrics")) return st;
  return guarded([&] {
    std::string kv = merit_report(s->rho).to_kv();
    char buf[256];
    const struct {
      const char* name;
      BellLabel label;
    } bells[4] = {{"phi_plus", BellLabel::phi_plus},
                  {"phi_minus", BellLabel::phi_minus},
                  {"psi_plus", BellLabel::psi_plus},
                  {"psi_minus", BellLabel::psi_minus}};
    for (const auto& b : bells) {
      std::snprintf(buf, sizeof(buf), "fidelity_%s = %.12g\n", b.name,
                    fidelity_to_pure(s->rho, bell_state(b.label)));
      kv += buf;
    }
    *out_kv = dup_string(kv);
  });
}

ionlink_status ionlink_state_rotate_to_bell(const ionlink_state* s, const char* target,
                                            ionlink_state** out_rotated, double* out_overlap) {
  if (auto st = need(s && target && out_rotated, "rotate_to_bell")) return st;
  return guarded([&] {
    const std::string t(target);
    BellLabel label;
    if (t == "phi_plus")
      label = BellLabel::phi_plus;
    else if (t == "phi_minus")
      label = BellLabel::phi_minus;
    else if (t == "psi_plus")
      label = BellLabel::psi_plus;
    else if (t == "psi_minus")
      label = BellLabel::psi_minus;
    else
      throw ValidationError("unknown Bell target '" + t + "'");
    LocalRotation r = nearest_bell_rotation(s->rho, bell_state(label));
    *out_rotated = new ionlink_state{r.rotated};
    if (out_overlap) *out_overlap = r.overlap;
  });
}

ionlink_status ionlink_report(const ionlink_dataset* ds, int bootstrap_b, uint64_t seed,
                              int threads, const char* out_dir, char** out_kv) {
  if (auto s = need(ds && out_kv, "report")) return s;
  return guarded([&] {
    PipelineOptions opts;
    opts.bootstrap_b = bootstrap_b;
    opts.seed = seed;
    opts.threads = threads;
    if (out_dir) opts.out_dir = out_dir;
    RunReport r = run_pipeline(ds->ds, opts);
    *out_kv = dup_string(r.summary_kv());
  });
}

ionlink_status ionlink_pauli_bars(const ionlink_dataset* ds, int bootstrap_b, uint64_t seed,
                                  int threads, char** out_csv) {
  if (auto s = need(ds && out_csv, "pauli_bars")) return s;
  return guarded([&] {
    PipelineOptions popts;
    popts.seed = seed;
    popts.threads = threads;
    RunReport report = run_pipeline(ds->ds, popts);
    PlotInputs in;
    in.dataset = &ds->ds;
    in.report = &report;
    in.bootstrap_b = bootstrap_b > 0 ? bootstrap_b : 200;
    in.seed = seed;
    in.threads = threads;
    *out_csv = dup_string(emit_plot_data(PlotKind::pauli_bars, in));
  });
}

ionlink_status ionlink_simulate(const char* config_path, uint64_t seed, long heralds_per_setting,
                                const char* out_dir, char** out_kv) {
  if (auto s = need(out_dir && out_kv, "simulate")) return s;
  return guarded([&] {
    const NetsimConfig cfg = config_path ? NetsimConfig::parse(read_text_file(config_path))
                                         : NetsimConfig::parse(NetsimConfig::default_text());
    // ideal mode-matched ion-photon inputs; imperfections enter via the
    // analyser and node error channels
    const DensityMatrix ion_photon = DensityMatrix::from_pure(bell_state(BellLabel::phi_plus));
    const std::vector<HeraldOutcome> outcomes =
        heralded_state(ion_photon, ion_photon, cfg.analyser, cfg.alice, cfg.bob, cfg.timing);
    const long per_setting = heralds_per_setting > 0 ? heralds_per_setting : 250;
    SimulatedExperiment sim = simulate_experiment(outcomes, per_setting, 4, seed);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (size_t k = 0; k < sim.tables.size(); ++k)
      write_text_file((fs::path(out_dir) / (sim.pattern_names[k] + ".csv")).string(),
                      sim.tables[k].to_csv());
    std::string attempts = "attempts\n";
    for (long long a : sim.attempts) attempts += std::to_string(a) + "\n";
    write_text_file((fs::path(out_dir) / "attempts.csv").string(), attempts);
    PlotInputs hist;
    hist.attempts = sim.attempts;
    write_text_file((fs::path(out_dir) / "attempts_histogram.csv").string(),
                    emit_plot_data(PlotKind::histogram, hist));

    const double p = success_probability(cfg.alice, cfg.bob);
    const double rate = effective_attempt_rate(cfg.timing);
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "success_probability = %.6g\nherald_probability = %.6g\n"
                  "attempt_rate = %.6g\nentanglement_rate = %.6g\nheralds = %zu\n"
                  "seed = %llu\n",
                  p, sim.herald_probability, rate, entanglement_rate(sim.herald_probability, rate),
                  sim.attempts.size(), static_cast<unsigned long long>(seed));
    write_text_file((fs::path(out_dir) / "summary.txt").string(), buf);
    *out_kv = dup_string(buf);
  });
}

ionlink_status ionlink_default_config(char** out_text) {
  if (auto s = need(out_text != nullptr, "default_config")) return s;
  return guarded([&] { *out_text = dup_string(NetsimConfig::default_text()); });
}

ionlink_status ionlink_optics_curve(const double* na_grid, int n, int quadrature_points,
                                    char** out_csv) {
  if (auto s = need(na_grid && out_csv, "optics_curve")) return s;
  return guarded([&] {
    if (n < 1) throw ValidationError("optics_curve: empty grid");
    std::vector<double> grid(na_grid, na_grid + n);
    const int qp = quadrature_points > 0 ? quadrature_points : 256;
    *out_csv = dup_string(curve_csv(curve_scan(grid, qp)));
  });
}

}  // extern "C"
