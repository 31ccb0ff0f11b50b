#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ionlink/measure.hpp"
#include "ionlink/types.hpp"

namespace ionlink {

/// Per-setting outcome counts. Counts are stored as doubles so synthetic
/// exact-proportion tables can be fitted; parsed experimental tables are
/// validated to hold nonnegative integers.
struct CountTable {
  struct Row {
    std::string setting_label;
    std::vector<double> counts;
  };
  std::vector<Row> rows;

  double total() const;
  /// Every row label must resolve to a setting with matching outcome count.
  void validate_against(const std::vector<MeasurementSetting>& settings) const;

  /// Nine-row Pauli CSV, header `basis_a,basis_b,pp,mp,pm,mm`, rows in
  /// canonical order ZZ, ZX, ZY, XZ, XX, XY, YZ, YX, YY. Bit-exact format.
  static CountTable parse_csv(const std::string& text);
  std::string to_csv() const;
};

struct MleOptions {
  double dilution_initial = 1.0;
  double tolerance = 1e-10;      // change in mean log-likelihood per click
  long max_iterations = 100000;
  std::optional<DensityMatrix> seed_state;  // default: maximally mixed
  bool fit_efficiency = false;   // mle_direct only; needs no-click effects
  int direct_starts = 4;         // mle_direct multi-start count
};

struct MleDiagnostics {
  long iterations = 0;
  double final_log_likelihood = 0.0;
  double gradient_norm = 0.0;  // ||R/S - I|| for rrr, |grad|_inf for direct
  bool converged = false;
  double efficiency = 1.0;     // fitted value when fit_efficiency is set
};

struct MleResult {
  DensityMatrix state;
  MleDiagnostics diagnostics;

  MleResult() : state(DensityMatrix::maximally_mixed(2)) {}
  MleResult(DensityMatrix s, MleDiagnostics d) : state(std::move(s)), diagnostics(d) {}

  std::string diagnostics_kv() const;
};

/// Thrown when an iteration budget runs out; carries the best state found.
class MleConvergenceError : public NumericalError {
 public:
  MleConvergenceError(const std::string& what, MleResult best)
      : NumericalError(what), best_result(std::move(best)) {}
  MleResult best_result;
};

/// Sum_j n_j ln tr(rho E_j); zero-count outcomes contribute nothing and
/// probabilities are clamped at 1e-300 inside the log.
double log_likelihood(const DensityMatrix& rho, const CountTable& table,
                      const std::vector<MeasurementSetting>& settings);

/// Diluted fixed-point iteration rho <- N[(I + eps R)rho(I + eps R)] with
/// per-setting frequency normalization; eps halves whenever the likelihood
/// would decrease and never increases. Accepted steps are monotone in
/// log-likelihood.
MleResult mle_rrr(const CountTable& table, const std::vector<MeasurementSetting>& settings,
                  const MleOptions& opts = {});

/// Direct likelihood maximization over rho = T^dag T / tr(T^dag T) with T
/// lower triangular (d^2 real parameters, one redundant), plus an optional
/// scalar detection efficiency. Steepest ascent on central-difference
/// numerical gradients with Barzilai-Borwein steps, multi-start.
MleResult mle_direct(const CountTable& table, const std::vector<MeasurementSetting>& settings,
                     const MleOptions& opts = {});

struct BootstrapResult {
  std::string metric_name;
  double point_estimate = 0.0;
  double sem = 0.0;  // sample standard deviation over replicates (B - 1)
  std::vector<double> replicates;
  int dropped = 0;   // replicates whose refit failed

  std::string to_kv() const;
};

using MetricFn = std::function<double(const DensityMatrix&)>;

/// Synthetic tables drawn from Born probabilities of rho_hat with the same
/// per-setting totals as counts_plan, each refitted with mle_rrr.
/// Deterministic under (seed); replicate r uses stream (seed, r).
BootstrapResult bootstrap_parametric(const DensityMatrix& rho_hat,
                                     const std::vector<MeasurementSetting>& settings,
                                     const CountTable& counts_plan, int B, const MetricFn& metric,
                                     const std::string& metric_name, uint64_t seed,
                                     const MleOptions& opts = {}, int threads = 1);

/// Per-setting multinomial resampling of the observed outcome frequencies.
BootstrapResult bootstrap_nonparametric(const CountTable& table,
                                        const std::vector<MeasurementSetting>& settings, int B,
                                        const MetricFn& metric, const std::string& metric_name,
                                        uint64_t seed, const MleOptions& opts = {},
                                        int threads = 1);

struct ChainOptions {
  long chain_length = 200000;
  long burn_in = 20000;
  long thinning = 10;
  double initial_step = 0.08;
};

struct PosteriorSample {
  std::vector<double> samples;  // thinned metric values after burn-in
  double acceptance_rate = 0.0;
  long chain_length = 0, burn_in = 0, thinning = 0;

  double mean() const;
  double stddev() const;
  /// Monte-Carlo error of the mean by batch means (30 batches).
  double mc_error() const;
  /// Central credible interval, e.g. level = 0.95.
  std::pair<double, double> credible(double level) const;
  std::string to_kv() const;
};

/// Random-walk Metropolis-Hastings over a complex Ginibre matrix G with
/// standard-normal prior on all components (rho = G G^dag / tr G G^dag is
/// then Hilbert-Schmidt uniform). Step size tunes toward 20-40% acceptance
/// during burn-in.
PosteriorSample bayes_mh(const CountTable& table,
                         const std::vector<MeasurementSetting>& settings,
                         const ChainOptions& chain, const MetricFn& metric, uint64_t seed);

}  // namespace ionlink
