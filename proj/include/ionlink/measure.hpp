#pragma once

#include <string>
#include <vector>

#include "ionlink/types.hpp"

namespace ionlink {

struct PovmEffect {
  ComplexMatrix op;  // Hermitian, 0 <= eigenvalues <= 1
  std::string outcome_label;
};

struct MeasurementSetting {
  std::string label;
  std::vector<PovmEffect> effects;

  /// Throws unless the effects sum to the identity within `atol`.
  void validate_complete(double atol = 1e-9) const;
  /// Born-rule outcome probabilities under rho (clamped at 0).
  std::vector<double> probabilities(const DensityMatrix& rho) const;
};

/// Projective measurement onto the four eigenvectors of o_a (x) o_b,
/// outcome order ++, -+, +-, -- ("+" is the +1 eigenvector; for Z this is
/// the |down> state).
MeasurementSetting pauli_setting(Pauli o_a, Pauli o_b);

/// The nine two-qubit Pauli settings in canonical row order
/// ZZ, ZX, ZY, XZ, XX, XY, YZ, YX, YY.
std::vector<MeasurementSetting> pauli_settings_all();

enum class WaveplateKind { quarter, half };

struct WaveplateSpec {
  WaveplateKind kind = WaveplateKind::half;
  double fast_axis_angle = 0.0;  // radians, from the polariser axis
  double retardance = 0.0;       // radians; 0 selects the ideal default

  static WaveplateSpec quarter(double angle, double retardance = 0.0);
  static WaveplateSpec half(double angle, double retardance = 0.0);
  double effective_retardance() const;
};

/// Jones matrix of a linear retarder: the fast axis advances the phase by
/// the retardance, W = R(theta) diag(e^{i delta}, 1) R(-theta).
ComplexMatrix waveplate_jones(const WaveplateSpec& spec);

/// Photon analysis chain QWP -> HWP -> polariser with detection efficiency.
/// Effects: transmit = eff * W^dag |H><H| W, reflect = eff * W^dag |V><V| W,
/// noclick = (1 - eff) * I, with W = HWP * QWP.
MeasurementSetting photon_analysis_setting(const WaveplateSpec& qwp, const WaveplateSpec& hwp,
                                           double efficiency);

/// Composite ion (x) photon settings: every ion Pauli basis paired with
/// every (qwp, hwp) angle combination. The default grids are the
/// {0, pi/4} x {0, pi/8, pi/4, 3pi/8} overcomplete photonic set.
std::vector<MeasurementSetting> ion_photon_settings(const std::vector<double>& qwp_angles,
                                                    const std::vector<double>& hwp_angles,
                                                    const std::vector<Pauli>& ion_bases,
                                                    double efficiency);
std::vector<MeasurementSetting> ion_photon_settings_default(double efficiency);

/// One line per effect: `setting_label,outcome_label,matrix_file`.
std::string settings_manifest(const std::vector<MeasurementSetting>& settings);

}  // namespace ionlink
