#pragma once

#include <array>
#include <string>
#include <vector>

#include "ionlink/types.hpp"

namespace ionlink {

struct CollectionGeometry {
  double numerical_aperture = 0.6;
  int quadrature_points = 256;   // per axis of the product Gauss-Legendre grid
  double gaussian_waist = 0.0;   // units of aperture radius; 0 = optimize

  void validate() const;
};

/// sigma+ decay carries 2/3 of the S-manifold emission, pi 1/3
/// (Clebsch-Gordan weights of the two decay paths).
enum class EmissionChannel { sigma_plus, pi };

double branching_weight(EmissionChannel ch);

/// Classical far-field amplitude of the channel's dipole at a unit
/// direction (quantization axis z, sigma+ circular in the x-y plane).
/// Normalized so the full-sphere intensity integral is 1 per channel.
std::array<cd, 3> dipole_field(EmissionChannel ch, const std::array<double, 3>& direction);

/// Branching-weighted fraction of the total emission inside the cone of
/// half-angle arcsin(NA) about the x axis (perpendicular to z).
double free_space_collection(const CollectionGeometry& g);

/// Branching-weighted fraction coupled into a single linearly polarized
/// Gaussian mode (H for sigma+, V for pi), overlap taken in
/// direction-cosine coordinates on the aperture plane. The shared waist is
/// optimized per NA unless fixed.
double fiber_coupled_collection(const CollectionGeometry& g);

/// Fidelity of the aperture-integrated ion-photon polarization state to
/// the on-axis Bell state; decreases with NA as the channels mix.
double free_space_fidelity(const CollectionGeometry& g);

/// Fidelity of the fiber-coupled (mode-filtered) ion-photon state; the
/// filtered state stays pure and Bell to numerical precision at every NA.
double fiber_filtered_fidelity(const CollectionGeometry& g);

struct CurveRow {
  double na;
  double free_space_eff;
  double fiber_eff;
  double free_space_fidelity;
};

std::vector<CurveRow> curve_scan(const std::vector<double>& na_grid, int quadrature_points = 256);

/// CSV with header `na,free_space_eff,fiber_eff,free_space_fidelity`.
std::string curve_csv(const std::vector<CurveRow>& rows);

}  // namespace ionlink
