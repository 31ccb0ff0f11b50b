#pragma once

#include <string>

#include "ionlink/types.hpp"

namespace ionlink {

/// Two-qubit entanglement figures of merit. "Fully entangled fraction" is
/// the fidelity to the nearest maximally entangled state; it is the single
/// "fidelity" figure quoted throughout the toolkit.
struct MeritReport {
  double fully_entangled_fraction = 0.0;
  double concurrence = 0.0;
  double entanglement_of_formation = 0.0;  // ebits

  std::string to_kv() const;
  void validate() const;
};

/// <psi| rho |psi>.
double fidelity_to_pure(const DensityMatrix& rho, const PureState& psi);

/// Largest eigenvalue of Re(rho) expressed in the magic basis
/// {(|00>+|11>)/s2, i(|00>-|11>)/s2, i(|01>+|10>)/s2, (|01>-|10>)/s2};
/// equals the maximum overlap with any maximally entangled state.
double fully_entangled_fraction(const DensityMatrix& rho);

/// Wootters concurrence: max(0, l1-l2-l3-l4), li descending square roots of
/// the eigenvalues of sqrt(rho) * (Y(x)Y rho* Y(x)Y) * sqrt(rho).
double concurrence(const DensityMatrix& rho);

/// h((1+sqrt(1-C^2))/2) with h the binary entropy.
double entanglement_of_formation(const DensityMatrix& rho);

MeritReport merit_report(const DensityMatrix& rho);

struct LocalRotation {
  ComplexMatrix u_a;       // 2x2 unitary on the first qubit
  ComplexMatrix u_b;       // 2x2 unitary on the second qubit
  DensityMatrix rotated;   // (Ua(x)Ub) rho (Ua(x)Ub)^dag
  double overlap;          // <target| rotated |target>
};

/// Local unitaries maximizing the overlap of rho with a maximally
/// entangled target. Ascent over 3+3 Z-Y-Z Euler angles from 8
/// deterministic starts; the achieved overlap equals
/// fully_entangled_fraction(rho) to ~1e-6.
LocalRotation nearest_bell_rotation(const DensityMatrix& rho, const PureState& target);

}  // namespace ionlink
