#include "ionlink/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ionlink/linalg.hpp"
#include "ionlink/optics.hpp"

namespace ionlink {

namespace {

// Ion-ion tomography counts per herald pattern, rows ZZ..YY, outcome
// columns ++, -+, +-, --.
constexpr long long kCountsApd0Apd2[9][4] = {
    {4, 424, 564, 10},   {255, 217, 297, 194}, {283, 218, 316, 193},
    {212, 222, 271, 263}, {259, 236, 227, 289}, {28, 463, 477, 26},
    {178, 213, 288, 285}, {424, 32, 32, 524},   {249, 223, 193, 295}};
constexpr long long kCountsApd1Apd3[9][4] = {
    {3, 533, 425, 11},   {210, 256, 233, 287}, {204, 294, 232, 252},
    {263, 278, 235, 231}, {273, 239, 228, 332}, {38, 508, 425, 26},
    {254, 280, 267, 250}, {451, 30, 27, 495},   {287, 233, 180, 312}};
constexpr long long kCountsApd0Apd1[9][4] = {
    {1, 449, 459, 18},   {206, 259, 249, 236}, {247, 260, 224, 185},
    {234, 237, 260, 251}, {224, 250, 257, 192}, {467, 28, 30, 399},
    {221, 249, 220, 263}, {21, 441, 450, 36},   {227, 301, 259, 202}};
constexpr long long kCountsApd2Apd3[9][4] = {
    {5, 531, 544, 19},   {270, 321, 292, 218}, {271, 278, 309, 234},
    {262, 236, 282, 263}, {221, 264, 295, 214}, {535, 21, 29, 500},
    {240, 261, 242, 289}, {20, 511, 482, 24},   {240, 305, 267, 227}};

const char* kRowLabels[9] = {"ZZ", "ZX", "ZY", "XZ", "XX", "XY", "YZ", "YX", "YY"};

CountTable table_from(const long long counts[9][4]) {
  CountTable t;
  for (int r = 0; r < 9; ++r) {
    CountTable::Row row;
    row.setting_label = kRowLabels[r];
    for (int c = 0; c < 4; ++c) row.counts.push_back(static_cast<double>(counts[r][c]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

void Dataset::validate() const {
  const std::vector<MeasurementSetting> settings = pauli_settings_all();
  for (const CountTable& t : tables) {
    if (t.rows.size() != 9) throw ValidationError("dataset table must have 9 rows");
    t.validate_against(settings);
  }
}

double Dataset::grand_total() const {
  double n = 0.0;
  for (const CountTable& t : tables) n += t.total();
  return n;
}

Dataset builtin_dataset() {
  Dataset ds;
  ds.pattern_names = {"apd0-apd2", "apd1-apd3", "apd0-apd1", "apd2-apd3"};
  ds.tables = {table_from(kCountsApd0Apd2), table_from(kCountsApd1Apd3),
               table_from(kCountsApd0Apd1), table_from(kCountsApd2Apd3)};
  ds.provenance = "builtin ion-ion tomography dataset";
  ds.validate();
  return ds;
}

std::string RunReport::summary_kv() const {
  char buf[1024];
  std::string out;
  std::snprintf(buf, sizeof(buf),
                "fef_averaged = %.12g\nconcurrence_averaged = %.12g\nef_averaged = %.12g\n",
                averaged.fully_entangled_fraction, averaged.concurrence,
                averaged.entanglement_of_formation);
  out += buf;
  if (bootstrap_b > 0) {
    std::snprintf(buf, sizeof(buf), "sem_fef = %.6g\nsem_ef = %.6g\nbootstrap_b = %d\n", sem_fef,
                  sem_ef, bootstrap_b);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "seed = %llu\npartial = %d\n",
                static_cast<unsigned long long>(seed), partial ? 1 : 0);
  out += buf;
  if (partial) out += "failed_pattern = " + failed_pattern + "\n";
  for (const PatternResult& p : patterns) {
    if (!p.fitted) continue;
    std::snprintf(buf, sizeof(buf), "%s.fef = %.12g\n%s.concurrence = %.12g\n%s.ef = %.12g\n",
                  p.name.c_str(), p.merit.fully_entangled_fraction, p.name.c_str(),
                  p.merit.concurrence, p.name.c_str(), p.merit.entanglement_of_formation);
    out += buf;
  }
  return out;
}

RunReport run_pipeline(const Dataset& ds, const PipelineOptions& opts) {
  ds.validate();
  const std::vector<MeasurementSetting> settings = pauli_settings_all();
  RunReport report;
  report.bootstrap_b = opts.bootstrap_b;
  report.seed = opts.seed;

  double fef_sum = 0.0, conc_sum = 0.0, ef_sum = 0.0, sem_fef_sum = 0.0, sem_ef_sum = 0.0;
  int fitted = 0;
  for (int k = 0; k < 4; ++k) {
    PatternResult& pr = report.patterns[static_cast<size_t>(k)];
    pr.name = ds.pattern_names[static_cast<size_t>(k)];
    try {
      pr.fit = mle_rrr(ds.tables[static_cast<size_t>(k)], settings, opts.mle);
      pr.merit = merit_report(pr.fit.state);
      pr.fitted = true;
    } catch (const NumericalError& e) {
      report.partial = true;
      report.failed_pattern = pr.name;
      continue;
    }
    ++fitted;
    fef_sum += pr.merit.fully_entangled_fraction;
    conc_sum += pr.merit.concurrence;
    ef_sum += pr.merit.entanglement_of_formation;

    if (opts.bootstrap_b > 0) {
      const uint64_t pattern_seed = opts.seed + 1000003ULL * static_cast<uint64_t>(k);
      pr.fef_boot = bootstrap_parametric(
          pr.fit.state, settings, ds.tables[static_cast<size_t>(k)], opts.bootstrap_b,
          [](const DensityMatrix& r) { return fully_entangled_fraction(r); },
          "fully_entangled_fraction", pattern_seed, opts.mle, opts.threads);
      pr.ef_boot = bootstrap_parametric(
          pr.fit.state, settings, ds.tables[static_cast<size_t>(k)], opts.bootstrap_b,
          [](const DensityMatrix& r) { return entanglement_of_formation(r); },
          "entanglement_of_formation", pattern_seed + 1, opts.mle, opts.threads);
      sem_fef_sum += pr.fef_boot.sem;
      sem_ef_sum += pr.ef_boot.sem;
    }
  }
  if (fitted > 0) {
    report.averaged.fully_entangled_fraction = fef_sum / fitted;
    report.averaged.concurrence = conc_sum / fitted;
    report.averaged.entanglement_of_formation = ef_sum / fitted;
    if (opts.bootstrap_b > 0) {
      report.sem_fef = sem_fef_sum / fitted;
      report.sem_ef = sem_ef_sum / fitted;
    }
  }

  if (!opts.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);
    for (const PatternResult& pr : report.patterns) {
      if (!pr.fitted) continue;
      const fs::path dir = fs::path(opts.out_dir) / pr.name;
      fs::create_directories(dir);
      write_text_file((dir / "rho.csv").string(), density_to_text(pr.fit.state));
      write_text_file((dir / "diagnostics.txt").string(), pr.fit.diagnostics_kv());
      write_text_file((dir / "merit.txt").string(), pr.merit.to_kv());
      if (opts.bootstrap_b > 0) {
        write_text_file((dir / "bootstrap_fef.txt").string(), pr.fef_boot.to_kv());
        write_text_file((dir / "bootstrap_ef.txt").string(), pr.ef_boot.to_kv());
      }
    }
    write_text_file((fs::path(opts.out_dir) / "report.txt").string(), report.summary_kv());
  }
  return report;
}

namespace {

std::string histogram_csv(const std::vector<long long>& attempts, int bins) {
  if (attempts.empty()) throw ValidationError("histogram: no attempt data");
  std::string out = "bin_lo,bin_hi,count\n";
  char buf[96];
  for (const HistogramBin& b : attempt_histogram(attempts, bins)) {
    std::snprintf(buf, sizeof(buf), "%.8g,%.8g,%lld\n", b.lo, b.hi, b.count);
    out += buf;
  }
  return out;
}

std::string pauli_bars_csv(const Dataset& ds, const RunReport& report, int B, uint64_t seed,
                           int threads) {
  const std::vector<MeasurementSetting> settings = pauli_settings_all();
  std::string out = "pattern,basis_a,basis_b,measured,predicted,ci95_lo,ci95_hi\n";
  char buf[192];
  for (int k = 0; k < 4; ++k) {
    const PatternResult& pr = report.patterns[static_cast<size_t>(k)];
    if (!pr.fitted) continue;
    const CountTable& table = ds.tables[static_cast<size_t>(k)];
    for (size_t r = 0; r < table.rows.size(); ++r) {
      const CountTable::Row& row = table.rows[r];
      const ComplexMatrix op = tensor(pauli_matrix(pauli_from_label(row.setting_label[0])),
                                      pauli_matrix(pauli_from_label(row.setting_label[1])));
      double n = 0.0, signed_sum = 0.0;
      const double sign[4] = {+1.0, -1.0, -1.0, +1.0};  // ++, -+, +-, --
      for (int c = 0; c < 4; ++c) {
        n += row.counts[static_cast<size_t>(c)];
        signed_sum += sign[c] * row.counts[static_cast<size_t>(c)];
      }
      const double measured = n > 0.0 ? signed_sum / n : 0.0;
      const double predicted = expectation(pr.fit.state, op);

      // bootstrap 95% band of the MLE-predicted expectation
      BootstrapResult boot = bootstrap_parametric(
          pr.fit.state, settings, table, B,
          [&op](const DensityMatrix& rho) { return expectation(rho, op); },
          "pauli_expectation", seed + 7919ULL * static_cast<uint64_t>(k * 9 + static_cast<int>(r)),
          MleOptions{}, threads);
      std::vector<double> reps = boot.replicates;
      std::sort(reps.begin(), reps.end());
      auto q = [&](double p) {
        const double pos = p * static_cast<double>(reps.size() - 1);
        const size_t i = static_cast<size_t>(pos);
        const double f = pos - static_cast<double>(i);
        return i + 1 < reps.size() ? reps[i] * (1 - f) + reps[i + 1] * f : reps[i];
      };
      std::snprintf(buf, sizeof(buf), "%s,%c,%c,%.8g,%.8g,%.8g,%.8g\n", pr.name.c_str(),
                    row.setting_label[0], row.setting_label[1], measured, predicted, q(0.025),
                    q(0.975));
      out += buf;
    }
  }
  return out;
}

}  // namespace

std::string emit_plot_data(PlotKind kind, const PlotInputs& inputs) {
  switch (kind) {
    case PlotKind::histogram:
      return histogram_csv(inputs.attempts, inputs.bins);
    case PlotKind::na_curves:
      if (inputs.na_grid.empty()) throw ValidationError("na_curves: empty grid");
      return curve_csv(curve_scan(inputs.na_grid, inputs.quadrature_points));
    case PlotKind::pauli_bars:
      if (inputs.dataset == nullptr || inputs.report == nullptr)
        throw ValidationError("pauli_bars: dataset and report required");
      return pauli_bars_csv(*inputs.dataset, *inputs.report, inputs.bootstrap_b, inputs.seed,
                            inputs.threads);
  }
  throw ValidationError("unknown plot kind");
}

}  // namespace ionlink
