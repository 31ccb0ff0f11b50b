#include "ionlink/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "ionlink/linalg.hpp"

namespace ionlink {

namespace {

double binary_entropy(double x) {
  double h = 0.0;
  if (x > 1e-15 && x < 1.0) h -= x * std::log2(x);
  const double y = 1.0 - x;
  if (y > 1e-15 && y < 1.0) h -= y * std::log2(y);
  return h;
}

// Magic-basis vectors as rows (unnormalized phases included).
const std::array<std::array<cd, 4>, 4> kMagicRows = {{
    {{cd(1, 0), cd(0, 0), cd(0, 0), cd(1, 0)}},
    {{cd(0, 1), cd(0, 0), cd(0, 0), cd(0, -1)}},
    {{cd(0, 0), cd(0, 1), cd(0, 1), cd(0, 0)}},
    {{cd(0, 0), cd(1, 0), cd(-1, 0), cd(0, 0)}},
}};

ComplexMatrix euler_zyz(double alpha, double beta, double gamma) {
  // exp(-i alpha Z/2) exp(-i beta Y/2) exp(-i gamma Z/2), global phase dropped
  const double cb = std::cos(beta / 2.0), sb = std::sin(beta / 2.0);
  ComplexMatrix u(2);
  u.at(0, 0) = std::polar(cb, -(alpha + gamma) / 2.0);
  u.at(0, 1) = std::polar(-sb, -(alpha - gamma) / 2.0);
  u.at(1, 0) = std::polar(sb, (alpha - gamma) / 2.0);
  u.at(1, 1) = std::polar(cb, (alpha + gamma) / 2.0);
  return u;
}

}  // namespace

std::string MeritReport::to_kv() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "fully_entangled_fraction = %.12g\n"
                "concurrence = %.12g\n"
                "entanglement_of_formation = %.12g\n",
                fully_entangled_fraction, concurrence, entanglement_of_formation);
  return buf;
}

void MeritReport::validate() const {
  const double hi = 1.0 + 1e-9;
  if (fully_entangled_fraction < 0.0 || fully_entangled_fraction > hi ||
      concurrence < 0.0 || concurrence > hi ||
      entanglement_of_formation < 0.0 || entanglement_of_formation > hi)
    throw NumericalError("merit value outside [0, 1]");
  const bool c0 = concurrence < 1e-9, e0 = entanglement_of_formation < 1e-9;
  if (c0 != e0) throw NumericalError("E_F = 0 iff C = 0 violated");
}

double fidelity_to_pure(const DensityMatrix& rho, const PureState& psi) {
  if (rho.dim() != psi.dim()) throw ValidationError("fidelity_to_pure: dimension mismatch");
  cd s = 0.0;
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j)
      s += std::conj(psi[i]) * rho.at(i, j) * psi[j];
  return std::clamp(s.real(), 0.0, 1.0 + 1e-12);
}

double fully_entangled_fraction(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw ValidationError("fully_entangled_fraction: need a two-qubit state");
  // M_jk = <e_j| rho |e_k> over the magic basis, then the top eigenvalue
  // of Re(M).
  ComplexMatrix m(4);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      cd s = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          s += std::conj(kMagicRows[j][a]) * rho.at(a, b) * kMagicRows[k][b];
      m.at(j, k) = s * cd(0.5);  // 1/sqrt(2) normalization on both sides
    }
  ComplexMatrix re(4);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k)
      re.at(j, k) = cd(0.5 * (m.at(j, k).real() + m.at(k, j).real()), 0.0);
  return eigh(re).eigenvalues.front();
}

double concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw ValidationError("concurrence: need a two-qubit state");
  const ComplexMatrix yy = tensor(pauli_matrix(Pauli::Y), pauli_matrix(Pauli::Y));
  const ComplexMatrix flipped = yy * rho.matrix().conjugate() * yy;
  const ComplexMatrix root = matrix_sqrt_psd(rho.matrix());
  ComplexMatrix r = root * flipped * root;
  EighResult e = eigh((r + r.adjoint()) * cd(0.5));
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, e.eigenvalues[i]));
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double entanglement_of_formation(const DensityMatrix& rho) {
  const double c = concurrence(rho);
  const double x = (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))) / 2.0;
  return binary_entropy(x);
}

MeritReport merit_report(const DensityMatrix& rho) {
  MeritReport r;
  r.fully_entangled_fraction = fully_entangled_fraction(rho);
  r.concurrence = concurrence(rho);
  r.entanglement_of_formation = entanglement_of_formation(rho);
  r.validate();
  return r;
}

LocalRotation nearest_bell_rotation(const DensityMatrix& rho, const PureState& target) {
  if (rho.dim() != 4 || target.dim() != 4)
    throw ValidationError("nearest_bell_rotation: need two-qubit inputs");
  const DensityMatrix target_rho = DensityMatrix::from_pure(target);
  if (fully_entangled_fraction(target_rho) < 1.0 - 1e-6)
    throw ValidationError("nearest_bell_rotation: target is not maximally entangled");

  auto overlap_at = [&](const std::array<double, 6>& x) {
    const ComplexMatrix u = tensor(euler_zyz(x[0], x[1], x[2]), euler_zyz(x[3], x[4], x[5]));
    // <t| U rho U^dag |t> = v^dag rho v with v = U^dag |t>
    std::array<cd, 4> v{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) v[i] += std::conj(u.at(j, i)) * target[j];
    cd s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s += std::conj(v[i]) * rho.at(i, j) * v[j];
    return s.real();
  };

  const double pi = 3.14159265358979323846;
  std::array<double, 6> best{};
  double best_val = -1.0;
  for (int s = 0; s < 8; ++s) {
    // deterministic starts spread over the angle cube
    std::array<double, 6> x{};
    for (int k = 0; k < 6; ++k)
      x[k] = pi * (((s >> (k % 3)) & 1) ? 0.5 : -0.25) + 0.3 * k + 0.7 * s;
    double fx = overlap_at(x);
    double step = pi / 4.0;
    while (step > 2e-5) {
      bool improved = false;
      for (int k = 0; k < 6; ++k) {
        for (double dir : {+1.0, -1.0}) {
          std::array<double, 6> y = x;
          y[k] += dir * step;
          const double fy = overlap_at(y);
          if (fy > fx) {
            x = y;
            fx = fy;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fx > best_val) {
      best_val = fx;
      best = x;
    }
  }

  const double fef = fully_entangled_fraction(rho);
  if (best_val < fef - 1e-5) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "nearest_bell_rotation did not converge: best overlap %.9f < FEF %.9f",
                  best_val, fef);
    throw NumericalError(buf);
  }

  LocalRotation out{euler_zyz(best[0], best[1], best[2]),
                    euler_zyz(best[3], best[4], best[5]),
                    DensityMatrix::maximally_mixed(4), best_val};
  const ComplexMatrix u = tensor(out.u_a, out.u_b);
  out.rotated = DensityMatrix::repaired(u * rho.matrix() * u.adjoint());
  return out;
}

}  // namespace ionlink
