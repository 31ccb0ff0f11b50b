// ionlink command-line interface. Talks to the toolkit exclusively through
// the C API in ionlink/ionlink.h.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ionlink/ionlink.h"

namespace {

struct StringOut {
  char* s = nullptr;
  ~StringOut() { ionlink_string_free(s); }
};

int finish(ionlink_status st) {
  if (st != IONLINK_OK) std::fprintf(stderr, "error: %s\n", ionlink_last_error());
  return static_cast<int>(st);
}

void write_or_print(const std::string& path, const char* text) {
  if (path.empty()) {
    std::fputs(text, stdout);
    return;
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw CLI::RuntimeError("cannot open " + path, 1);
  std::fputs(text, f);
  std::fclose(f);
}

using DatasetPtr = std::unique_ptr<ionlink_dataset, decltype(&ionlink_dataset_free)>;
using TablePtr = std::unique_ptr<ionlink_table, decltype(&ionlink_table_free)>;

// --builtin or exactly four pattern CSVs
ionlink_status open_dataset(bool builtin, const std::vector<std::string>& files,
                            DatasetPtr& out) {
  ionlink_dataset* ds = nullptr;
  ionlink_status st;
  if (builtin) {
    st = ionlink_dataset_builtin(&ds);
  } else {
    const char* paths[4] = {files[0].c_str(), files[1].c_str(), files[2].c_str(),
                            files[3].c_str()};
    st = ionlink_dataset_load(paths, &ds);
  }
  out = DatasetPtr(ds, ionlink_dataset_free);
  return st;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-node trapped-ion entanglement link analysis toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed/--threads may follow the subcommand

  uint64_t seed = 12345;  // every randomized command defaults to this seed
  int threads = 1;
  app.add_option("--seed", seed, "RNG seed (default 12345)")->capture_default_str();
  app.add_option("--threads", threads, "worker threads for bootstrap replicates")
      ->capture_default_str();

  // fit
  auto* fit = app.add_subcommand("fit", "Maximum-likelihood tomography of one count table");
  std::string fit_table, fit_method = "rrr", fit_out, fit_diag;
  double fit_tol = 0.0;
  long fit_maxit = 0;
  fit->add_option("table", fit_table, "count-table CSV path")->required();
  fit->add_option("--method", fit_method, "rrr or direct")->capture_default_str();
  fit->add_option("--tol", fit_tol, "mean log-likelihood tolerance");
  fit->add_option("--max-iter", fit_maxit, "iteration budget");
  fit->add_option("--out", fit_out, "density-matrix output path (default stdout)");
  fit->add_option("--diagnostics", fit_diag, "diagnostics output path");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Entanglement figures of merit of a state");
  std::string met_state, met_rotate;
  metrics->add_option("state", met_state, "density-matrix text path")->required();
  metrics->add_option("--rotate-to", met_rotate,
                      "also report the local rotation onto this Bell state "
                      "(phi_plus, phi_minus, psi_plus, psi_minus)");

  // bootstrap
  auto* boot = app.add_subcommand("bootstrap", "Bootstrap sem of a tomography metric");
  std::string boot_table, boot_mode = "parametric", boot_metric = "fef";
  int boot_b = 1000;
  boot->add_option("table", boot_table, "count-table CSV path")->required();
  boot->add_option("--mode", boot_mode, "parametric or nonparametric")->capture_default_str();
  boot->add_option("--metric", boot_metric, "fef, concurrence or ef")->capture_default_str();
  boot->add_option("-B,--replicates", boot_b, "bootstrap replicates")->capture_default_str();

  // bayes
  auto* bayes = app.add_subcommand("bayes", "Bayesian posterior of a tomography metric");
  std::string bayes_table, bayes_metric = "fef";
  long chain = 0, burn = 0, thin = 0;
  bayes->add_option("table", bayes_table, "count-table CSV path")->required();
  bayes->add_option("--metric", bayes_metric, "fef, concurrence or ef")->capture_default_str();
  bayes->add_option("--chain", chain, "chain length (default 200000)");
  bayes->add_option("--burn-in", burn, "burn-in steps (default 20000)");
  bayes->add_option("--thinning", thin, "thinning stride (default 10)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Heralded-entanglement protocol simulation");
  std::string sim_config, sim_out;
  long sim_heralds = 250;
  bool sim_print_config = false;
  sim->add_option("--config", sim_config, "protocol config file (defaults when omitted)");
  sim->add_option("--heralds-per-setting", sim_heralds, "heralds per basis per sweep")
      ->capture_default_str();
  sim->add_option("--out-dir", sim_out, "output directory");
  sim->add_flag("--print-default-config", sim_print_config,
                "print the documented default config and exit");

  // optics-curve
  auto* optics = app.add_subcommand("optics-curve", "Collection efficiency/fidelity vs NA");
  std::vector<double> na_grid;
  double na_min = 0.05, na_max = 0.9;
  int na_points = 18, quad = 256;
  std::string optics_out;
  optics->add_option("--na", na_grid, "explicit NA grid values");
  optics->add_option("--min", na_min, "grid start")->capture_default_str();
  optics->add_option("--max", na_max, "grid end")->capture_default_str();
  optics->add_option("--points", na_points, "grid size")->capture_default_str();
  optics->add_option("--quadrature-points", quad, "Gauss-Legendre points per axis")
      ->capture_default_str();
  optics->add_option("--out", optics_out, "CSV output path (default stdout)");

  // report
  auto* report = app.add_subcommand("report", "Full pipeline over a four-pattern dataset");
  bool rep_builtin = false;
  std::vector<std::string> rep_files;
  std::string rep_out_dir;
  int rep_b = 0;
  bool rep_bars = false;
  report->add_flag("--builtin", rep_builtin, "use the embedded dataset");
  report->add_option("tables", rep_files, "four count-table CSVs in pattern order")
      ->expected(0, 4);
  report->add_option("-B,--replicates", rep_b, "bootstrap replicates (0 disables)")
      ->capture_default_str();
  report->add_option("--out-dir", rep_out_dir, "output directory");
  report->add_flag("--pauli-bars", rep_bars, "also emit measured-vs-predicted bar data");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      TablePtr t(nullptr, ionlink_table_free);
      {
        ionlink_table* raw = nullptr;
        if (auto st = ionlink_table_load(fit_table.c_str(), &raw)) return finish(st);
        t.reset(raw);
      }
      ionlink_state* state = nullptr;
      StringOut diag;
      if (auto st = ionlink_fit(t.get(), fit_method.c_str(), fit_tol, fit_maxit, &state, &diag.s))
        return finish(st);
      StringOut text;
      ionlink_state_to_text(state, &text.s);
      ionlink_state_free(state);
      write_or_print(fit_out, text.s);
      if (!fit_diag.empty())
        write_or_print(fit_diag, diag.s);
      else if (!fit_out.empty())
        std::fputs(diag.s, stdout);
      return 0;
    }

    if (metrics->parsed()) {
      ionlink_state* state = nullptr;
      if (auto st = ionlink_state_load(met_state.c_str(), &state)) return finish(st);
      StringOut kv;
      auto st = ionlink_state_metrics(state, &kv.s);
      if (st == IONLINK_OK) {
        std::fputs(kv.s, stdout);
        if (!met_rotate.empty()) {
          ionlink_state* rotated = nullptr;
          double overlap = 0.0;
          st = ionlink_state_rotate_to_bell(state, met_rotate.c_str(), &rotated, &overlap);
          if (st == IONLINK_OK) {
            std::printf("rotated_overlap_%s = %.12g\n", met_rotate.c_str(), overlap);
            ionlink_state_free(rotated);
          }
        }
      }
      ionlink_state_free(state);
      return finish(st);
    }

    if (boot->parsed()) {
      TablePtr t(nullptr, ionlink_table_free);
      {
        ionlink_table* raw = nullptr;
        if (auto st = ionlink_table_load(boot_table.c_str(), &raw)) return finish(st);
        t.reset(raw);
      }
      StringOut kv;
      auto st = ionlink_bootstrap(t.get(), boot_mode.c_str(), boot_metric.c_str(), boot_b, seed,
                                  threads, &kv.s);
      if (st == IONLINK_OK) std::fputs(kv.s, stdout);
      return finish(st);
    }

    if (bayes->parsed()) {
      TablePtr t(nullptr, ionlink_table_free);
      {
        ionlink_table* raw = nullptr;
        if (auto st = ionlink_table_load(bayes_table.c_str(), &raw)) return finish(st);
        t.reset(raw);
      }
      StringOut kv;
      auto st = ionlink_bayes(t.get(), bayes_metric.c_str(), chain, burn, thin, seed, &kv.s);
      if (st == IONLINK_OK) std::fputs(kv.s, stdout);
      return finish(st);
    }

    if (sim->parsed()) {
      if (sim_print_config) {
        StringOut cfg;
        if (auto st = ionlink_default_config(&cfg.s)) return finish(st);
        std::fputs(cfg.s, stdout);
        return 0;
      }
      if (sim_out.empty()) {
        std::fprintf(stderr, "error: simulate requires --out-dir\n");
        return 1;
      }
      StringOut kv;
      auto st = ionlink_simulate(sim_config.empty() ? nullptr : sim_config.c_str(), seed,
                                 sim_heralds, sim_out.c_str(), &kv.s);
      if (st == IONLINK_OK) std::fputs(kv.s, stdout);
      return finish(st);
    }

    if (optics->parsed()) {
      if (na_grid.empty()) {
        if (na_points < 1 || na_min <= 0.0 || na_max >= 1.0 || na_min > na_max) {
          std::fprintf(stderr, "error: bad NA grid\n");
          return 1;
        }
        for (int i = 0; i < na_points; ++i)
          na_grid.push_back(na_points == 1
                                ? na_min
                                : na_min + (na_max - na_min) * i / (na_points - 1));
      }
      StringOut csv;
      auto st = ionlink_optics_curve(na_grid.data(), static_cast<int>(na_grid.size()), quad,
                                     &csv.s);
      if (st != IONLINK_OK) return finish(st);
      write_or_print(optics_out, csv.s);
      return 0;
    }

    if (report->parsed()) {
      if (!rep_builtin && rep_files.size() != 4) {
        std::fprintf(stderr, "error: report needs --builtin or four table files\n");
        return 1;
      }
      DatasetPtr ds(nullptr, ionlink_dataset_free);
      if (auto st = open_dataset(rep_builtin, rep_files, ds)) return finish(st);
      StringOut kv;
      auto st = ionlink_report(ds.get(), rep_b, seed, threads,
                               rep_out_dir.empty() ? nullptr : rep_out_dir.c_str(), &kv.s);
      if (st != IONLINK_OK) return finish(st);
      std::fputs(kv.s, stdout);
      if (rep_bars) {
        StringOut bars;
        st = ionlink_pauli_bars(ds.get(), rep_b > 0 ? rep_b : 200, seed, threads, &bars.s);
        if (st != IONLINK_OK) return finish(st);
        write_or_print(rep_out_dir.empty() ? "" : rep_out_dir + "/pauli_bars.csv", bars.s);
      }
      return 0;
    }
  } catch (const CLI::RuntimeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.get_exit_code();
  }
  return 0;
}
