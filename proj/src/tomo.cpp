#include "ionlink/tomo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "ionlink/linalg.hpp"
#include "ionlink/rng.hpp"

namespace ionlink {

namespace {

constexpr double kProbFloor = 1e-300;

const MeasurementSetting& find_setting(const std::vector<MeasurementSetting>& settings,
                                       const std::string& label) {
  for (const MeasurementSetting& s : settings)
    if (s.label == label) return s;
  throw ValidationError("no measurement setting labeled '" + label + "'");
}

double ll_from_probs(const CountTable& table, const std::vector<std::vector<double>>& probs) {
  double ll = 0.0;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const std::vector<double>& counts = table.rows[r].counts;
    for (size_t j = 0; j < counts.size(); ++j) {
      if (counts[j] <= 0.0) continue;
      ll += counts[j] * std::log(std::max(probs[r][j], kProbFloor));
    }
  }
  return ll;
}

std::vector<std::vector<double>> born_probs(const DensityMatrix& rho, const CountTable& table,
                                            const std::vector<const MeasurementSetting*>& resolved) {
  std::vector<std::vector<double>> probs(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    probs[r].reserve(resolved[r]->effects.size());
    for (const PovmEffect& e : resolved[r]->effects) {
      const double p = trace_product_real(rho.matrix(), e.op);
      if (p < -1e-9)
        throw NumericalError("negative Born probability " + std::to_string(p) + " in setting '" +
                             resolved[r]->label + "'");
      probs[r].push_back(std::max(p, 0.0));
    }
  }
  return probs;
}

std::vector<const MeasurementSetting*> resolve(const CountTable& table,
                                               const std::vector<MeasurementSetting>& settings) {
  table.validate_against(settings);
  std::vector<const MeasurementSetting*> out;
  out.reserve(table.rows.size());
  for (const CountTable::Row& row : table.rows) out.push_back(&find_setting(settings, row.setting_label));
  return out;
}

// Frozen Cholesky-style parameterization: tvec holds d real diagonal
// entries then re/im pairs for the strictly lower triangle, d^2 reals.
ComplexMatrix t_from_params(const std::vector<double>& tvec, int d) {
  ComplexMatrix t(d);
  size_t k = 0;
  for (int i = 0; i < d; ++i) t.at(i, i) = tvec[k++];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) {
      t.at(i, j) = cd(tvec[k], tvec[k + 1]);
      k += 2;
    }
  return t;
}

ComplexMatrix rho_from_t(const ComplexMatrix& t) {
  ComplexMatrix r = t.adjoint() * t;
  const double tr = r.trace().real();
  if (tr <= 0.0) throw NumericalError("degenerate T^dag T");
  return r * cd(1.0 / tr);
}

}  // namespace

double CountTable::total() const {
  double n = 0.0;
  for (const Row& r : rows)
    for (double c : r.counts) n += c;
  return n;
}

void CountTable::validate_against(const std::vector<MeasurementSetting>& settings) const {
  if (rows.empty()) throw ValidationError("count table has no rows");
  for (const Row& row : rows) {
    const MeasurementSetting& s = find_setting(settings, row.setting_label);
    if (row.counts.size() != s.effects.size())
      throw ValidationError("row '" + row.setting_label + "' outcome count mismatch");
    for (double c : row.counts)
      if (c < 0.0 || !std::isfinite(c))
        throw ValidationError("row '" + row.setting_label + "' has a negative count");
  }
}

CountTable CountTable::parse_csv(const std::string& text) {
  static const char* kOrder[9] = {"ZZ", "ZX", "ZY", "XZ", "XX", "XY", "YZ", "YX", "YY"};
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty count table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "basis_a,basis_b,pp,mp,pm,mm")
    throw ValidationError("count table header mismatch: '" + line + "'");
  CountTable t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    char a = 0, b = 0;
    long long c[4];
    char trail = 0;
    const int got = std::sscanf(line.c_str(), "%c,%c,%lld,%lld,%lld,%lld%c", &a, &b, &c[0],
                                &c[1], &c[2], &c[3], &trail);
    if (got != 6 || line.find('.') != std::string::npos)
      throw ValidationError("malformed count row at line " + std::to_string(lineno));
    for (long long v : c)
      if (v < 0) throw ValidationError("negative count at line " + std::to_string(lineno));
    Row row;
    row.setting_label = std::string(1, pauli_from_label(a) == Pauli::I ? 'I' : a) +
                        std::string(1, pauli_from_label(b) == Pauli::I ? 'I' : b);
    if (row.setting_label.find('I') != std::string::npos)
      throw ValidationError("identity basis at line " + std::to_string(lineno));
    row.counts = {static_cast<double>(c[0]), static_cast<double>(c[1]),
                  static_cast<double>(c[2]), static_cast<double>(c[3])};
    t.rows.push_back(std::move(row));
  }
  if (t.rows.size() != 9) throw ValidationError("count table must have 9 rows");
  for (int i = 0; i < 9; ++i)
    if (t.rows[i].setting_label != kOrder[i])
      throw ValidationError("count rows not in canonical basis order (row " +
                            std::to_string(i + 1) + " is '" + t.rows[i].setting_label + "')");
  return t;
}

std::string CountTable::to_csv() const {
  std::string out = "basis_a,basis_b,pp,mp,pm,mm\n";
  char buf[128];
  for (const Row& r : rows) {
    if (r.setting_label.size() != 2 || r.counts.size() != 4)
      throw ValidationError("to_csv requires the 9-row two-qubit Pauli shape");
    std::snprintf(buf, sizeof(buf), "%c,%c,%lld,%lld,%lld,%lld\n", r.setting_label[0],
                  r.setting_label[1], static_cast<long long>(std::llround(r.counts[0])),
                  static_cast<long long>(std::llround(r.counts[1])),
                  static_cast<long long>(std::llround(r.counts[2])),
                  static_cast<long long>(std::llround(r.counts[3])));
    out += buf;
  }
  return out;
}

std::string MleResult::diagnostics_kv() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "iterations = %ld\nfinal_log_likelihood = %.12g\ngradient_norm = %.6g\n"
                "converged = %d\nefficiency = %.6g\n",
                diagnostics.iterations, diagnostics.final_log_likelihood,
                diagnostics.gradient_norm, diagnostics.converged ? 1 : 0,
                diagnostics.efficiency);
  return buf;
}

double log_likelihood(const DensityMatrix& rho, const CountTable& table,
                      const std::vector<MeasurementSetting>& settings) {
  const auto resolved = resolve(table, settings);
  return ll_from_probs(table, born_probs(rho, table, resolved));
}

MleResult mle_rrr(const CountTable& table, const std::vector<MeasurementSetting>& settings,
                  const MleOptions& opts) {
  if (opts.tolerance <= 0.0 || opts.max_iterations < 1)
    throw ValidationError("mle_rrr: bad options");
  const auto resolved = resolve(table, settings);
  const int d = resolved.front()->effects.front().op.dim();
  const double n_total = table.total();
  if (n_total <= 0.0) throw ValidationError("mle_rrr: table has no counts");
  const double n_settings = static_cast<double>(table.rows.size());

  std::vector<double> row_totals(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    row_totals[r] = 0.0;
    for (double c : table.rows[r].counts) row_totals[r] += c;
  }

  DensityMatrix rho = opts.seed_state ? *opts.seed_state : DensityMatrix::maximally_mixed(d);
  auto probs = born_probs(rho, table, resolved);
  double ll = ll_from_probs(table, probs);
  double eps = opts.dilution_initial;
  MleDiagnostics diag;

  for (long it = 1; it <= opts.max_iterations; ++it) {
    diag.iterations = it;
    // R = sum_j (f_j / p_j) E_j with per-setting frequencies f_j = n_j/N_s,
    // shifted and scaled so the update matrix is I + eps (R/S - I).
    ComplexMatrix r_op = ComplexMatrix::zero(d);
    for (size_t r = 0; r < table.rows.size(); ++r) {
      if (row_totals[r] <= 0.0) continue;
      const std::vector<double>& counts = table.rows[r].counts;
      for (size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] <= 0.0) continue;
        const double f = counts[j] / row_totals[r];
        r_op += resolved[r]->effects[j].op * cd(f / std::max(probs[r][j], kProbFloor));
      }
    }
    ComplexMatrix grad = r_op * cd(1.0 / n_settings) - ComplexMatrix::identity(d);
    diag.gradient_norm = grad.max_abs();

    bool accepted = false;
    while (eps >= 1e-6) {
      const ComplexMatrix a = ComplexMatrix::identity(d) + grad * cd(eps);
      ComplexMatrix cand = a * rho.matrix() * a.adjoint();
      cand = (cand + cand.adjoint()) * cd(0.5);
      const double tr = cand.trace().real();
      if (tr <= 0.0) { eps *= 0.5; continue; }
      cand = cand * cd(1.0 / tr);
      DensityMatrix next = DensityMatrix::repaired(cand);
      auto next_probs = born_probs(next, table, resolved);
      const double next_ll = ll_from_probs(table, next_probs);
      if (next_ll >= ll) {
        const double delta = (next_ll - ll) / n_total;
        rho = std::move(next);
        probs = std::move(next_probs);
        ll = next_ll;
        accepted = true;
        if (delta < opts.tolerance) {
          diag.converged = true;
          diag.final_log_likelihood = ll;
          return MleResult(std::move(rho), diag);
        }
        break;
      }
      eps *= 0.5;
    }
    if (!accepted) {
      // dilution floor reached: declared converged
      diag.converged = true;
      diag.final_log_likelihood = ll;
      return MleResult(std::move(rho), diag);
    }
  }
  diag.converged = false;
  diag.final_log_likelihood = ll;
  MleResult best(std::move(rho), diag);
  throw MleConvergenceError("mle_rrr: max_iterations reached (gradient norm " +
                                std::to_string(diag.gradient_norm) + ")",
                            std::move(best));
}

MleResult mle_direct(const CountTable& table, const std::vector<MeasurementSetting>& settings,
                     const MleOptions& opts) {
  const auto resolved = resolve(table, settings);
  const int d = resolved.front()->effects.front().op.dim();
  const double n_total = table.total();
  if (n_total <= 0.0) throw ValidationError("mle_direct: table has no counts");

  // no-click effects are identified by outcome labels ending in "0"
  std::vector<std::vector<bool>> is_click(table.rows.size());
  // Effects are linear in the efficiency, so settings built at any
  // reference efficiency eta_ref in (0, 1) rescale per class:
  // clicks by eta/eta_ref, no-clicks by (1-eta)/(1-eta_ref).
  std::vector<double> eta_ref(table.rows.size(), 1.0);
  for (size_t r = 0; r < table.rows.size(); ++r) {
    double click_trace = 0.0;
    bool has_noclick = false;
    for (const PovmEffect& e : resolved[r]->effects) {
      const bool click = e.outcome_label.empty() || e.outcome_label.back() != '0';
      is_click[r].push_back(click);
      if (click)
        click_trace += e.op.trace().real();
      else
        has_noclick = true;
    }
    eta_ref[r] = click_trace / d;
    if (opts.fit_efficiency && (!has_noclick || eta_ref[r] <= 0.0 || eta_ref[r] >= 1.0))
      throw ValidationError(
          "fit_efficiency requires no-click effects built at a reference efficiency in (0, 1) "
          "(setting '" + resolved[r]->label + "')");
  }

  const int n_t = d * d;
  const int n_par = n_t + (opts.fit_efficiency ? 1 : 0);

  // eta < 0 disables the rescaling (plain Born rule on the given effects)
  auto probs_at = [&](const ComplexMatrix& rho, double eta) {
    std::vector<std::vector<double>> probs(table.rows.size());
    for (size_t r = 0; r < table.rows.size(); ++r) {
      const auto& effs = resolved[r]->effects;
      probs[r].resize(effs.size());
      for (size_t j = 0; j < effs.size(); ++j) {
        const double p = std::max(0.0, trace_product_real(rho, effs[j].op));
        const double scale = eta < 0.0 ? 1.0
                             : is_click[r][j] ? eta / eta_ref[r]
                                              : (1.0 - eta) / (1.0 - eta_ref[r]);
        probs[r][j] = scale * p;
      }
    }
    return probs;
  };
  auto ll_at = [&](const std::vector<double>& x) {
    const ComplexMatrix rho = rho_from_t(t_from_params(x, d));
    const double eta = opts.fit_efficiency
                           ? std::clamp(x[static_cast<size_t>(n_t)], 1e-6, 1.0 - 1e-9)
                           : -1.0;
    return ll_from_probs(table, probs_at(rho, eta));
  };

  std::vector<double> best_x;
  double best_ll = -1e308;
  long total_iters = 0;
  double best_grad = 0.0;
  bool any_improved = false;

  for (int start = 0; start < std::max(1, opts.direct_starts); ++start) {
    std::vector<double> x(static_cast<size_t>(n_par), 0.0);
    if (start == 0) {
      for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] = 1.0 / std::sqrt(static_cast<double>(d));
    } else {
      Rng rng = Rng::substream(0x107e11, static_cast<uint64_t>(start));
      for (int i = 0; i < n_t; ++i) x[static_cast<size_t>(i)] = 0.5 * rng.normal();
      x[0] += 0.7;  // keep T away from the origin
    }
    if (opts.fit_efficiency) x[static_cast<size_t>(n_t)] = 0.5;

    double f = ll_at(x);
    std::vector<double> g(x.size()), x_prev, g_prev;
    double step = 1e-3;
    const long max_it = std::min<long>(opts.max_iterations, 20000);
    long it = 0;
    for (; it < max_it; ++it) {
      // central-difference gradient
      for (size_t k = 0; k < x.size(); ++k) {
        const double h = 1e-6 * (1.0 + std::abs(x[k]));
        const double save = x[k];
        x[k] = save + h;
        const double fp = ll_at(x);
        x[k] = save - h;
        const double fm = ll_at(x);
        x[k] = save;
        g[k] = (fp - fm) / (2.0 * h);
      }
      double ginf = 0.0;
      for (double v : g) ginf = std::max(ginf, std::abs(v));
      if (ginf < 1e-7 * std::max(1.0, std::abs(f))) break;

      if (!x_prev.empty()) {
        double num = 0.0, den = 0.0;
        for (size_t k = 0; k < x.size(); ++k) {
          const double dx = x[k] - x_prev[k], dg = g[k] - g_prev[k];
          num += dx * dx;
          den += -dx * dg;  // ascent: curvature should be positive
        }
        if (den > 0.0) step = std::clamp(num / den, 1e-9, 1.0);
      }
      x_prev = x;
      g_prev = g;

      double s = step;
      bool moved = false;
      for (int bt = 0; bt < 50; ++bt) {
        std::vector<double> xn(x.size());
        for (size_t k = 0; k < x.size(); ++k) xn[k] = x[k] + s * g[k];
        if (opts.fit_efficiency)
          xn[static_cast<size_t>(n_t)] = std::clamp(xn[static_cast<size_t>(n_t)], 1e-6, 1.0);
        const double fn = ll_at(xn);
        if (fn > f - 1e-12 * std::abs(f)) {
          const bool converged_step = (fn - f) < 1e-12 * std::max(1.0, std::abs(f));
          x = std::move(xn);
          f = fn;
          moved = true;
          if (converged_step && bt == 0 && ginf < 1e-4) it = max_it;  // flat: stop
          break;
        }
        s *= 0.5;
      }
      if (!moved) break;
    }
    total_iters += it;
    double ginf = 0.0;
    for (double v : g) ginf = std::max(ginf, std::abs(v));
    if (f > best_ll) {
      best_ll = f;
      best_x = x;
      best_grad = ginf;
      any_improved = true;
    }
  }

  if (!any_improved || best_x.empty()) throw NumericalError("mle_direct: no start improved");
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(d);
  MleDiagnostics diag;
  diag.iterations = total_iters;
  diag.final_log_likelihood = best_ll;
  diag.gradient_norm = best_grad;
  diag.converged = true;
  diag.efficiency =
      opts.fit_efficiency ? std::clamp(best_x[static_cast<size_t>(n_t)], 1e-6, 1.0) : 1.0;
  MleResult out(DensityMatrix::repaired(rho_from_t(t_from_params(best_x, d))), diag);
  if (!opts.fit_efficiency &&
      out.diagnostics.final_log_likelihood < log_likelihood(mixed, table, settings) - 1e-9) {
    MleResult best = out;
    throw MleConvergenceError("mle_direct: all starts below the maximally mixed likelihood",
                              std::move(best));
  }
  return out;
}

namespace {

std::string bootstrap_kv(const BootstrapResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "metric = %s\npoint_estimate = %.12g\nsem = %.12g\nreplicates = %zu\n"
                "dropped = %d\n",
                r.metric_name.c_str(), r.point_estimate, r.sem, r.replicates.size(), r.dropped);
  return buf;
}

BootstrapResult run_bootstrap(
    int B, const std::string& metric_name, double point_estimate, int threads,
    const std::function<std::optional<double>(int replicate)>& one_replicate) {
  if (B < 2) throw ValidationError("bootstrap: B must be >= 2");
  std::vector<std::optional<double>> results(static_cast<size_t>(B));
  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    for (int b = 0; b < B; ++b) results[static_cast<size_t>(b)] = one_replicate(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&]() {
        for (int b = next.fetch_add(1); b < B; b = next.fetch_add(1))
          results[static_cast<size_t>(b)] = one_replicate(b);
      });
    for (std::thread& t : pool) t.join();
  }

  BootstrapResult out;
  out.metric_name = metric_name;
  out.point_estimate = point_estimate;
  for (const auto& r : results) {
    if (r)
      out.replicates.push_back(*r);
    else
      ++out.dropped;
  }
  if (out.dropped * 10 > B)
    throw NumericalError("bootstrap: more than 10% of replicates failed to refit");
  const double n = static_cast<double>(out.replicates.size());
  double mean = 0.0;
  for (double v : out.replicates) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : out.replicates) ss += (v - mean) * (v - mean);
  out.sem = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return out;
}

}  // namespace

std::string BootstrapResult::to_kv() const { return bootstrap_kv(*this); }

BootstrapResult bootstrap_parametric(const DensityMatrix& rho_hat,
                                     const std::vector<MeasurementSetting>& settings,
                                     const CountTable& counts_plan, int B, const MetricFn& metric,
                                     const std::string& metric_name, uint64_t seed,
                                     const MleOptions& opts, int threads) {
  const auto resolved = resolve(counts_plan, settings);
  std::vector<std::vector<double>> probs = born_probs(rho_hat, counts_plan, resolved);
  std::vector<long long> totals;
  for (const CountTable::Row& r : counts_plan.rows) {
    double t = 0.0;
    for (double c : r.counts) t += c;
    totals.push_back(static_cast<long long>(std::llround(t)));
  }

  auto one = [&](int b) -> std::optional<double> {
    Rng rng = Rng::substream(seed, static_cast<uint64_t>(b));
    CountTable synth;
    for (size_t r = 0; r < counts_plan.rows.size(); ++r) {
      CountTable::Row row;
      row.setting_label = counts_plan.rows[r].setting_label;
      const auto counts = rng.multinomial(totals[r], probs[r]);
      row.counts.assign(counts.begin(), counts.end());
      synth.rows.push_back(std::move(row));
    }
    try {
      return metric(mle_rrr(synth, settings, opts).state);
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };
  return run_bootstrap(B, metric_name, metric(rho_hat), threads, one);
}

BootstrapResult bootstrap_nonparametric(const CountTable& table,
                                        const std::vector<MeasurementSetting>& settings, int B,
                                        const MetricFn& metric, const std::string& metric_name,
                                        uint64_t seed, const MleOptions& opts, int threads) {
  table.validate_against(settings);
  double point = 0.0;
  {
    MleResult fit = mle_rrr(table, settings, opts);
    point = metric(fit.state);
  }
  auto one = [&](int b) -> std::optional<double> {
    Rng rng = Rng::substream(seed, static_cast<uint64_t>(b));
    CountTable synth;
    for (const CountTable::Row& r : table.rows) {
      double t = 0.0;
      for (double c : r.counts) t += c;
      CountTable::Row row;
      row.setting_label = r.setting_label;
      if (t > 0.0) {
        const auto counts = rng.multinomial(static_cast<long long>(std::llround(t)), r.counts);
        row.counts.assign(counts.begin(), counts.end());
      } else {
        row.counts.assign(r.counts.size(), 0.0);
      }
      synth.rows.push_back(std::move(row));
    }
    try {
      return metric(mle_rrr(synth, settings, opts).state);
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };
  return run_bootstrap(B, metric_name, point, threads, one);
}

double PosteriorSample::mean() const {
  double m = 0.0;
  for (double v : samples) m += v;
  return samples.empty() ? 0.0 : m / static_cast<double>(samples.size());
}

double PosteriorSample::stddev() const {
  if (samples.size() < 2) return 0.0;
  const double m = mean();
  double ss = 0.0;
  for (double v : samples) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(samples.size() - 1));
}

double PosteriorSample::mc_error() const {
  const size_t nb = 30;
  if (samples.size() < 2 * nb) return stddev() / std::sqrt(static_cast<double>(samples.size()));
  const size_t bs = samples.size() / nb;
  std::vector<double> bm;
  for (size_t b = 0; b < nb; ++b) {
    double m = 0.0;
    for (size_t i = b * bs; i < (b + 1) * bs; ++i) m += samples[i];
    bm.push_back(m / static_cast<double>(bs));
  }
  double mm = 0.0;
  for (double v : bm) mm += v;
  mm /= static_cast<double>(nb);
  double ss = 0.0;
  for (double v : bm) ss += (v - mm) * (v - mm);
  return std::sqrt(ss / static_cast<double>(nb - 1) / static_cast<double>(nb));
}

std::pair<double, double> PosteriorSample::credible(double level) const {
  if (samples.empty()) throw ValidationError("credible: no samples");
  std::vector<double> s(samples);
  std::sort(s.begin(), s.end());
  const double lo_q = (1.0 - level) / 2.0;
  auto pick = [&](double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const size_t i = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < s.size() ? s[i] * (1.0 - frac) + s[i + 1] * frac : s[i];
  };
  return {pick(lo_q), pick(1.0 - lo_q)};
}

std::string PosteriorSample::to_kv() const {
  const auto ci68 = credible(0.68);
  const auto ci95 = credible(0.95);
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "samples = %zu\nacceptance_rate = %.4f\nposterior_mean = %.12g\n"
                "posterior_sd = %.12g\nmc_error = %.6g\nci68_lo = %.12g\nci68_hi = %.12g\n"
                "ci95_lo = %.12g\nci95_hi = %.12g\nchain_length = %ld\nburn_in = %ld\n"
                "thinning = %ld\n",
                samples.size(), acceptance_rate, mean(), stddev(), mc_error(), ci68.first,
                ci68.second, ci95.first, ci95.second, chain_length, burn_in, thinning);
  return buf;
}

PosteriorSample bayes_mh(const CountTable& table,
                         const std::vector<MeasurementSetting>& settings,
                         const ChainOptions& chain, const MetricFn& metric, uint64_t seed) {
  if (chain.chain_length <= chain.burn_in || chain.thinning < 1)
    throw ValidationError("bayes_mh: bad chain options");
  const auto resolved = resolve(table, settings);
  const int d = resolved.front()->effects.front().op.dim();
  const int n_comp = 2 * d * d;

  Rng rng(seed);
  std::vector<double> g(static_cast<size_t>(n_comp));
  for (double& v : g) v = rng.normal();

  auto state_of = [&](const std::vector<double>& comps) {
    ComplexMatrix gm(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        gm.at(i, j) = cd(comps[2 * (static_cast<size_t>(i) * d + j)],
                         comps[2 * (static_cast<size_t>(i) * d + j) + 1]);
    ComplexMatrix r = gm * gm.adjoint();
    const double tr = r.trace().real();
    if (tr <= 0.0) throw NumericalError("bayes_mh: degenerate Ginibre point");
    return DensityMatrix::repaired(r * cd(1.0 / tr));
  };
  auto log_post = [&](const std::vector<double>& comps, const DensityMatrix& rho) {
    double lp = 0.0;
    for (double v : comps) lp -= 0.5 * v * v;  // standard-normal prior
    return lp + ll_from_probs(table, born_probs(rho, table, resolved));
  };

  DensityMatrix rho = state_of(g);
  double lp = log_post(g, rho);
  double step = chain.initial_step;
  long accepted_tune = 0, proposed_tune = 0;
  long accepted_run = 0, proposed_run = 0;

  PosteriorSample out;
  out.chain_length = chain.chain_length;
  out.burn_in = chain.burn_in;
  out.thinning = chain.thinning;

  std::vector<double> cand(g.size());
  for (long it = 0; it < chain.chain_length; ++it) {
    for (size_t k = 0; k < g.size(); ++k) cand[k] = g[k] + step * rng.normal();
    const DensityMatrix cand_rho = state_of(cand);
    const double cand_lp = log_post(cand, cand_rho);
    const bool in_burn = it < chain.burn_in;
    (in_burn ? proposed_tune : proposed_run) += 1;
    if (std::log(std::max(rng.uniform(), 1e-300)) < cand_lp - lp) {
      g = cand;
      rho = cand_rho;
      lp = cand_lp;
      (in_burn ? accepted_tune : accepted_run) += 1;
    }
    if (in_burn && proposed_tune % 500 == 0) {
      const double rate = static_cast<double>(accepted_tune) / static_cast<double>(proposed_tune);
      if (rate < 0.2)
        step = std::max(step / 1.25, 1e-6);
      else if (rate > 0.4)
        step = std::min(step * 1.25, 10.0);
      accepted_tune = 0;
      proposed_tune = 0;
    }
    if (!in_burn && (it - chain.burn_in) % chain.thinning == 0)
      out.samples.push_back(metric(rho));
  }
  out.acceptance_rate =
      proposed_run > 0 ? static_cast<double>(accepted_run) / static_cast<double>(proposed_run) : 0.0;
  if (out.acceptance_rate < 0.01)
    throw NumericalError("bayes_mh: acceptance rate below 1% after tuning");
  return out;
}

}  // namespace ionlink
