#include "ionlink/measure.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "ionlink/linalg.hpp"

namespace ionlink {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Analytic +1/-1 eigenvectors with fixed phases (no eigensolver, so the
// projector set is bit-stable).
void pauli_eigvecs(Pauli p, std::array<cd, 2>& plus, std::array<cd, 2>& minus) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (p) {
    case Pauli::Z: plus = {cd(1), cd(0)}; minus = {cd(0), cd(1)}; return;
    case Pauli::X: plus = {cd(s), cd(s)}; minus = {cd(s), cd(-s)}; return;
    case Pauli::Y: plus = {cd(s), cd(0, s)}; minus = {cd(s), cd(0, -s)}; return;
    case Pauli::I: break;
  }
  throw ValidationError("identity is not a tomographic measurement axis");
}

ComplexMatrix projector2(const std::array<cd, 2>& v) {
  ComplexMatrix m(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.at(i, j) = v[i] * std::conj(v[j]);
  return m;
}

ComplexMatrix rotation2(double theta) {
  ComplexMatrix r(2);
  r.at(0, 0) = std::cos(theta);
  r.at(0, 1) = -std::sin(theta);
  r.at(1, 0) = std::sin(theta);
  r.at(1, 1) = std::cos(theta);
  return r;
}

}  // namespace

void MeasurementSetting::validate_complete(double atol) const {
  if (effects.empty()) throw ValidationError("setting '" + label + "' has no effects");
  ComplexMatrix sum = ComplexMatrix::zero(effects.front().op.dim());
  for (const PovmEffect& e : effects) sum += e.op;
  if ((sum - ComplexMatrix::identity(sum.dim())).max_abs() > atol)
    throw ValidationError("setting '" + label + "' is not complete");
}

std::vector<double> MeasurementSetting::probabilities(const DensityMatrix& rho) const {
  std::vector<double> p;
  p.reserve(effects.size());
  for (const PovmEffect& e : effects)
    p.push_back(std::max(0.0, trace_product_real(rho.matrix(), e.op)));
  return p;
}

MeasurementSetting pauli_setting(Pauli o_a, Pauli o_b) {
  std::array<cd, 2> ap, am, bp, bm;
  pauli_eigvecs(o_a, ap, am);
  pauli_eigvecs(o_b, bp, bm);
  const ComplexMatrix pa = projector2(ap), ma = projector2(am);
  const ComplexMatrix pb = projector2(bp), mb = projector2(bm);
  MeasurementSetting s;
  s.label = std::string() + pauli_label(o_a) + pauli_label(o_b);
  s.effects = {{tensor(pa, pb), "++"},
               {tensor(ma, pb), "-+"},
               {tensor(pa, mb), "+-"},
               {tensor(ma, mb), "--"}};
  s.validate_complete();
  return s;
}

std::vector<MeasurementSetting> pauli_settings_all() {
  const Pauli order[3] = {Pauli::Z, Pauli::X, Pauli::Y};
  std::vector<MeasurementSetting> out;
  out.reserve(9);
  for (Pauli a : order)
    for (Pauli b : order) out.push_back(pauli_setting(a, b));
  return out;
}

WaveplateSpec WaveplateSpec::quarter(double angle, double retardance) {
  return {WaveplateKind::quarter, angle, retardance};
}

WaveplateSpec WaveplateSpec::half(double angle, double retardance) {
  return {WaveplateKind::half, angle, retardance};
}

double WaveplateSpec::effective_retardance() const {
  if (retardance != 0.0) return retardance;
  return kind == WaveplateKind::quarter ? kPi / 2.0 : kPi;
}

ComplexMatrix waveplate_jones(const WaveplateSpec& spec) {
  const double delta = spec.effective_retardance();
  ComplexMatrix d(2);
  d.at(0, 0) = std::polar(1.0, delta);
  d.at(1, 1) = 1.0;
  return rotation2(spec.fast_axis_angle) * d * rotation2(-spec.fast_axis_angle);
}

MeasurementSetting photon_analysis_setting(const WaveplateSpec& qwp, const WaveplateSpec& hwp,
                                           double efficiency) {
  if (efficiency < 0.0 || efficiency > 1.0)
    throw ValidationError("photon_analysis_setting: efficiency outside [0, 1]");
  const ComplexMatrix w = waveplate_jones(hwp) * waveplate_jones(qwp);
  const ComplexMatrix wdag = w.adjoint();
  const ComplexMatrix h = projector2({cd(1), cd(0)});
  const ComplexMatrix v = projector2({cd(0), cd(1)});
  MeasurementSetting s;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "q%.4fh%.4f", qwp.fast_axis_angle, hwp.fast_axis_angle);
  s.label = buf;
  ComplexMatrix t_eff = wdag * h * w * cd(efficiency);
  ComplexMatrix r_eff = wdag * v * w * cd(efficiency);
  ComplexMatrix none = ComplexMatrix::identity(2) - t_eff - r_eff;
  s.effects = {{std::move(t_eff), "T"}, {std::move(r_eff), "R"}, {std::move(none), "0"}};
  s.validate_complete();
  return s;
}

std::vector<MeasurementSetting> ion_photon_settings(const std::vector<double>& qwp_angles,
                                                    const std::vector<double>& hwp_angles,
                                                    const std::vector<Pauli>& ion_bases,
                                                    double efficiency) {
  if (qwp_angles.empty() || hwp_angles.empty() || ion_bases.empty())
    throw ValidationError("ion_photon_settings: empty grid");
  std::vector<MeasurementSetting> out;
  for (Pauli basis : ion_bases) {
    std::array<cd, 2> ip, im;
    pauli_eigvecs(basis, ip, im);
    const ComplexMatrix pi_plus = projector2(ip), pi_minus = projector2(im);
    for (double qa : qwp_angles) {
      for (double ha : hwp_angles) {
        const MeasurementSetting photon =
            photon_analysis_setting(WaveplateSpec::quarter(qa), WaveplateSpec::half(ha), efficiency);
        MeasurementSetting s;
        s.label = std::string(1, pauli_label(basis)) + "|" + photon.label;
        for (const PovmEffect& pe : photon.effects) {
          s.effects.push_back({tensor(pi_plus, pe.op), "+" + pe.outcome_label});
          s.effects.push_back({tensor(pi_minus, pe.op), "-" + pe.outcome_label});
        }
        s.validate_complete();
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

std::vector<MeasurementSetting> ion_photon_settings_default(double efficiency) {
  return ion_photon_settings({0.0, kPi / 4.0}, {0.0, kPi / 8.0, kPi / 4.0, 3.0 * kPi / 8.0},
                             {Pauli::Z, Pauli::X, Pauli::Y}, efficiency);
}

std::string settings_manifest(const std::vector<MeasurementSetting>& settings) {
  std::string out;
  for (const MeasurementSetting& s : settings)
    for (const PovmEffect& e : s.effects)
      out += s.label + "," + e.outcome_label + "," + s.label + "_" + e.outcome_label + ".mat\n";
  return out;
}

}  // namespace ionlink
