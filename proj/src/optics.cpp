#include "ionlink/optics.hpp"

#include <cmath>
#include <cstdio>

namespace ionlink {

// Geometry and conventions
// ------------------------
// Quantization axis z (static field direction), collection axis x. A
// direction inside the collection cone is parameterized by local polar
// coordinates about x, with azimuth phi measured from z:
//   r(t, p) = cos t * x + sin t cos p * z + sin t sin p * y.
// The collimated beam is described in direction-cosine coordinates
// (radius sin t, azimuth p); the local (theta, phi) field components map
// to the plane's radial/azimuthal basis, and the plane's cartesian axes
// are V (image of z) and H (image of y).
//
// The photonic H basis vector carries a fixed pi/2 phase relative to the
// plane image of y, chosen so the on-axis collimated ion-photon state is
// exactly (|down H> + |up V>)/sqrt(2). Any other phase choice is a fixed
// local unitary on the photon.
//
// Mode overlaps are taken directly in direction-cosine space (flat
// mapping, no aplanatic apodization) against a Gaussian normalized over
// the full plane; this convention reproduces the 8.0% / 80% collection
// anchors at NA 0.6.

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFieldNorm = 0.345494149471335479;  // sqrt(3 / (8 pi))

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre nodes/weights on [a, b] by Newton iteration on P_n.
Quadrature gauss_legendre(int n, double a, double b) {
  Quadrature q;
  q.nodes.resize(static_cast<size_t>(n));
  q.weights.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[static_cast<size_t>(i)] = 0.5 * (b - a) * x + 0.5 * (a + b);
    q.weights[static_cast<size_t>(i)] = (b - a) / ((1.0 - x * x) * pp * pp);
  }
  return q;
}

// Plane-basis (H, V) field components of both channels at local (t, p).
struct PlaneFields {
  cd sigma_h, sigma_v;  // sigma+ channel
  cd pi_h, pi_v;        // pi channel
};

PlaneFields plane_fields(double t, double p) {
  const double st = std::sin(t), ct = std::cos(t);
  const double sp = std::sin(p), cp = std::cos(p);
  // pi dipole (z): E.theta = ct*cp, E.phi = -sp
  const double pi_th = ct * cp, pi_ph = -sp;
  // sigma+ dipole (x + iy)/sqrt2 projected transverse
  const double inv_s2 = 1.0 / std::sqrt(2.0);
  const cd s_th = cd(-st, ct * sp) * inv_s2;
  const cd s_ph = cd(0.0, cp) * inv_s2;
  PlaneFields f;
  // rotate (theta->radial, phi->azimuthal) into cartesian (V, H) by p
  f.pi_v = kFieldNorm * (pi_th * cp - pi_ph * sp);
  f.pi_h = kFieldNorm * (pi_th * sp + pi_ph * cp);
  f.sigma_v = kFieldNorm * (s_th * cp - s_ph * sp);
  f.sigma_h = kFieldNorm * (s_th * sp + s_ph * cp);
  return f;
}

struct ConeIntegrals {
  double collected_sigma = 0.0;  // cone intensity fraction per channel
  double collected_pi = 0.0;
  // Gaussian overlap amplitudes (plane H/V components per channel)
  cd a_sigma_h, a_sigma_v, a_pi_h, a_pi_v;
  // aperture-integrated polarization density in basis (dH, dV, uH, uV)
  std::array<std::array<cd, 4>, 4> rho{};
};

ConeIntegrals cone_integrals(double na, int n, double waist) {
  const double alpha = std::asin(na);
  const Quadrature qt = gauss_legendre(n, 0.0, alpha);
  const Quadrature qp = gauss_legendre(n, 0.0, 2.0 * kPi);
  const double w23 = std::sqrt(2.0 / 3.0), w13 = std::sqrt(1.0 / 3.0);
  const cd mi(0.0, -1.0);  // H basis phase convention

  ConeIntegrals out;
  for (int i = 0; i < n; ++i) {
    const double t = qt.nodes[static_cast<size_t>(i)];
    const double st = std::sin(t);
    const double g = waist > 0.0 ? std::exp(-(st * st) / (waist * waist)) : 0.0;
    for (int j = 0; j < n; ++j) {
      const double p = qp.nodes[static_cast<size_t>(j)];
      const double wgt = qt.weights[static_cast<size_t>(i)] * qp.weights[static_cast<size_t>(j)] * st;
      const PlaneFields f = plane_fields(t, p);
      out.collected_sigma += wgt * (std::norm(f.sigma_h) + std::norm(f.sigma_v));
      out.collected_pi += wgt * (std::norm(f.pi_h) + std::norm(f.pi_v));
      if (waist > 0.0) {
        out.a_sigma_h += wgt * g * f.sigma_h;
        out.a_sigma_v += wgt * g * f.sigma_v;
        out.a_pi_h += wgt * g * f.pi_h;
        out.a_pi_v += wgt * g * f.pi_v;
      }
      const std::array<cd, 4> chi = {w23 * mi * f.sigma_h, w23 * f.sigma_v,
                                     w13 * mi * f.pi_h, w13 * f.pi_v};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) out.rho[a][b] += wgt * chi[a] * std::conj(chi[b]);
    }
  }
  return out;
}

double fiber_eff_at(double na, int n, double waist) {
  const ConeIntegrals ci = cone_integrals(na, n, waist);
  const double norm = kPi * waist * waist / 2.0;
  const double eff_sigma = (std::norm(ci.a_sigma_h)) / norm;
  const double eff_pi = (std::norm(ci.a_pi_v)) / norm;
  return (2.0 / 3.0) * eff_sigma + (1.0 / 3.0) * eff_pi;
}

double optimize_waist(double na, int n) {
  // 50-point coarse scan in units of the aperture radius, then golden-section
  double best_w = 0.0, best_v = -1.0;
  for (int k = 0; k < 50; ++k) {
    const double w = na * (0.10 + 2.4 * k / 49.0);
    const double v = fiber_eff_at(na, n, w);
    if (v > best_v) {
      best_v = v;
      best_w = w;
    }
  }
  double lo = std::max(0.02 * na, best_w - 0.06 * na), hi = best_w + 0.06 * na;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = fiber_eff_at(na, n, x1), f2 = fiber_eff_at(na, n, x2);
  for (int it = 0; it < 40 && (hi - lo) > 1e-6 * na; ++it) {
    if (f1 < f2) {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = fiber_eff_at(na, n, x2);
    } else {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = fiber_eff_at(na, n, x1);
    }
  }
  return 0.5 * (lo + hi);
}

// Evaluate at n and 2n quadrature points; drift > 1e-5 is an error.
double converged(double coarse, double fine, const char* what) {
  if (std::abs(fine - coarse) > 1e-5)
    throw NumericalError(std::string(what) + ": quadrature did not converge (doubling moved " +
                         std::to_string(std::abs(fine - coarse)) + ")");
  return fine;
}

}  // namespace

void CollectionGeometry::validate() const {
  if (!(numerical_aperture > 0.0 && numerical_aperture < 1.0))
    throw ValidationError("numerical aperture must be in (0, 1)");
  if (quadrature_points < 64) throw ValidationError("quadrature_points must be >= 64");
  if (gaussian_waist < 0.0) throw ValidationError("gaussian_waist must be >= 0");
}

double branching_weight(EmissionChannel ch) {
  return ch == EmissionChannel::sigma_plus ? 2.0 / 3.0 : 1.0 / 3.0;
}

std::array<cd, 3> dipole_field(EmissionChannel ch, const std::array<double, 3>& dir) {
  const double nrm = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
  if (std::abs(nrm - 1.0) > 1e-9) throw ValidationError("dipole_field: direction must be unit");
  std::array<cd, 3> d{};
  if (ch == EmissionChannel::pi) {
    d = {cd(0), cd(0), cd(1)};
  } else {
    const double s = 1.0 / std::sqrt(2.0);
    d = {cd(s, 0), cd(0, s), cd(0)};
  }
  cd proj = 0.0;
  for (int i = 0; i < 3; ++i) proj += d[static_cast<size_t>(i)] * dir[static_cast<size_t>(i)];
  std::array<cd, 3> e{};
  for (int i = 0; i < 3; ++i)
    e[static_cast<size_t>(i)] =
        kFieldNorm * (d[static_cast<size_t>(i)] - proj * dir[static_cast<size_t>(i)]);
  return e;
}

double free_space_collection(const CollectionGeometry& g) {
  g.validate();
  auto eval = [&](int n) {
    const ConeIntegrals ci = cone_integrals(g.numerical_aperture, n, 0.0);
    return (2.0 / 3.0) * ci.collected_sigma + (1.0 / 3.0) * ci.collected_pi;
  };
  return converged(eval(g.quadrature_points), eval(2 * g.quadrature_points),
                   "free_space_collection");
}

double fiber_coupled_collection(const CollectionGeometry& g) {
  g.validate();
  const double na = g.numerical_aperture;
  const double w = g.gaussian_waist > 0.0 ? g.gaussian_waist * na
                                          : optimize_waist(na, g.quadrature_points);
  return converged(fiber_eff_at(na, g.quadrature_points, w),
                   fiber_eff_at(na, 2 * g.quadrature_points, w), "fiber_coupled_collection");
}

namespace {

double fidelity_from_rho(const std::array<std::array<cd, 4>, 4>& rho) {
  double tr = 0.0;
  for (int i = 0; i < 4; ++i) tr += rho[static_cast<size_t>(i)][static_cast<size_t>(i)].real();
  // <Phi+| rho |Phi+> with Phi+ = (e0 + e3)/sqrt2
  const cd val = rho[0][0] + rho[0][3] + rho[3][0] + rho[3][3];
  return 0.5 * val.real() / tr;
}

}  // namespace

double free_space_fidelity(const CollectionGeometry& g) {
  g.validate();
  auto eval = [&](int n) {
    return fidelity_from_rho(cone_integrals(g.numerical_aperture, n, 0.0).rho);
  };
  return converged(eval(g.quadrature_points), eval(2 * g.quadrature_points),
                   "free_space_fidelity");
}

double fiber_filtered_fidelity(const CollectionGeometry& g) {
  g.validate();
  const double na = g.numerical_aperture;
  const double w = g.gaussian_waist > 0.0 ? g.gaussian_waist * na
                                          : optimize_waist(na, g.quadrature_points);
  const ConeIntegrals ci = cone_integrals(na, g.quadrature_points, w);
  const double w23 = std::sqrt(2.0 / 3.0), w13 = std::sqrt(1.0 / 3.0);
  const cd mi(0.0, -1.0);
  // mode-filtered state is pure: amplitudes on (dH, dV, uH, uV)
  const std::array<cd, 4> a = {w23 * mi * ci.a_sigma_h, w23 * ci.a_sigma_v,
                               w13 * mi * ci.a_pi_h, w13 * ci.a_pi_v};
  double nrm = 0.0;
  for (const cd& v : a) nrm += std::norm(v);
  const cd bell = (a[0] + a[3]) / std::sqrt(2.0);
  return std::norm(bell) / nrm;
}

std::vector<CurveRow> curve_scan(const std::vector<double>& na_grid, int quadrature_points) {
  std::vector<CurveRow> rows;
  rows.reserve(na_grid.size());
  for (double na : na_grid) {
    CollectionGeometry g;
    g.numerical_aperture = na;
    g.quadrature_points = quadrature_points;
    g.validate();
    CurveRow r;
    r.na = na;
    r.free_space_eff = free_space_collection(g);
    r.fiber_eff = fiber_coupled_collection(g);
    r.free_space_fidelity = free_space_fidelity(g);
    rows.push_back(r);
  }
  return rows;
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "na,free_space_eff,fiber_eff,free_space_fidelity\n";
  char buf[160];
  for (const CurveRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.8g,%.8g,%.8g,%.8g\n", r.na, r.free_space_eff, r.fiber_eff,
                  r.free_space_fidelity);
    out += buf;
  }
  return out;
}

}  // namespace ionlink
