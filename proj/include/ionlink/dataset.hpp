#pragma once

#include <array>
#include <string>
#include <vector>

#include "ionlink/metrics.hpp"
#include "ionlink/netsim.hpp"
#include "ionlink/tomo.hpp"

namespace ionlink {

/// Four herald patterns' worth of ion-ion tomography counts.
struct Dataset {
  std::array<std::string, 4> pattern_names;  // canonical order
  std::array<CountTable, 4> tables;
  std::string provenance;

  void validate() const;
  double grand_total() const;
};

/// The embedded ion-ion tomography dataset (pattern totals 8884, 9082,
/// 8512, 9522; grand total 36000).
Dataset builtin_dataset();

struct PatternResult {
  std::string name;
  MleResult fit;
  MeritReport merit;
  BootstrapResult fef_boot;  // populated when bootstrap_b > 0
  BootstrapResult ef_boot;
  bool fitted = false;
};

struct RunReport {
  std::array<PatternResult, 4> patterns;
  MeritReport averaged;           // arithmetic mean over the four patterns
  double sem_fef = 0.0;           // mean per-pattern parametric-bootstrap sem
  double sem_ef = 0.0;
  int bootstrap_b = 0;
  uint64_t seed = 0;
  bool partial = false;           // a pattern failed to fit
  std::string failed_pattern;

  std::string summary_kv() const;
};

struct PipelineOptions {
  MleOptions mle;
  int bootstrap_b = 0;        // 0 disables bootstrapping
  uint64_t seed = 12345;
  int threads = 1;
  std::string out_dir;        // empty disables file output
};

/// Fit all four patterns, compute merits and (optionally) per-pattern
/// parametric bootstrap sems; write per-pattern subdirectories and the
/// summary when out_dir is set. Deterministic under the seed.
RunReport run_pipeline(const Dataset& ds, const PipelineOptions& opts);

enum class PlotKind { histogram, na_curves, pauli_bars };

struct PlotInputs {
  // histogram
  std::vector<long long> attempts;
  int bins = 60;
  // na_curves
  std::vector<double> na_grid;
  int quadrature_points = 256;
  // pauli_bars
  const Dataset* dataset = nullptr;
  const RunReport* report = nullptr;
  int bootstrap_b = 200;
  uint64_t seed = 12345;
  int threads = 1;
};

/// CSV plot data: attempt histogram, collection curves vs NA, or measured
/// vs MLE-predicted Pauli expectations with bootstrap 95% bands.
std::string emit_plot_data(PlotKind kind, const PlotInputs& inputs);

}  // namespace ionlink
