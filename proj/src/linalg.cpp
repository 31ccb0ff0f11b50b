#include "ionlink/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ionlink {

namespace {

// One cyclic sweep of complex Jacobi rotations. Returns the off-diagonal
// Frobenius norm before the sweep.
double jacobi_sweep(ComplexMatrix& a, ComplexMatrix& v) {
  const int n = a.dim();
  double off = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) off += std::norm(a.at(p, q));
  off = std::sqrt(2.0 * off);

  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const cd apq = a.at(p, q);
      const double mag = std::abs(apq);
      if (mag == 0.0) continue;
      const cd phase = apq / mag;
      const double app = a.at(p, p).real();
      const double aqq = a.at(q, q).real();
      const double tau = (aqq - app) / (2.0 * mag);
      // smaller-magnitude root of t^2 - 2*tau*t - 1 = 0
      double t;
      if (tau >= 0.0)
        t = -1.0 / (tau + std::sqrt(1.0 + tau * tau));
      else
        t = 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;
      const cd u_pq = -s * phase;       // rotation column q, row p
      const cd u_qp = s * std::conj(phase);

      // A <- U^dag A U applied in place on rows/columns p, q
      for (int k = 0; k < n; ++k) {
        const cd akp = a.at(k, p), akq = a.at(k, q);
        a.at(k, p) = akp * c + akq * u_qp;
        a.at(k, q) = akp * u_pq + akq * c;
      }
      for (int k = 0; k < n; ++k) {
        const cd apk = a.at(p, k), aqk = a.at(q, k);
        a.at(p, k) = apk * c + aqk * std::conj(u_qp);
        a.at(q, k) = apk * std::conj(u_pq) + aqk * c;
      }
      for (int k = 0; k < n; ++k) {
        const cd vkp = v.at(k, p), vkq = v.at(k, q);
        v.at(k, p) = vkp * c + vkq * u_qp;
        v.at(k, q) = vkp * u_pq + vkq * c;
      }
    }
  }
  return off;
}

}  // namespace

EighResult eigh(const ComplexMatrix& m) {
  if (!m.is_hermitian(tol::hermitian))
    throw ValidationError("eigh requires a Hermitian matrix");
  const int n = m.dim();
  ComplexMatrix a = (m + m.adjoint()) * cd(0.5);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = std::max(1.0, a.max_abs());
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = jacobi_sweep(a, v);
    if (off < 1e-15 * scale) break;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a.at(i, i).real();
  std::sort(order.begin(), order.end(), [&](int x, int y) { return diag[x] > diag[y]; });

  EighResult r;
  r.eigenvalues.resize(n);
  r.eigenvectors = ComplexMatrix(n);
  for (int j = 0; j < n; ++j) {
    r.eigenvalues[j] = diag[order[j]];
    for (int i = 0; i < n; ++i) r.eigenvectors.at(i, j) = v.at(i, order[j]);
  }
  return r;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const int da = a.dim(), db = b.dim();
  ComplexMatrix r(da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) {
      const cd aij = a.at(i, j);
      if (aij == cd(0.0)) continue;
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l) r.at(i * db + k, j * db + l) = aij * b.at(k, l);
    }
  return r;
}

PureState tensor(const PureState& a, const PureState& b) {
  std::vector<cd> out(static_cast<size_t>(a.dim()) * b.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < b.dim(); ++j) out[static_cast<size_t>(i) * b.dim() + j] = a[i] * b[j];
  return PureState(a.dim() * b.dim(), std::move(out));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& keep,
                            const std::vector<int>& dims) {
  long long prod = 1;
  for (int d : dims) {
    if (d <= 0) throw ValidationError("partial_trace: factor dimensions must be positive");
    prod *= d;
  }
  if (prod != m.dim()) throw ValidationError("partial_trace: dims do not factor the matrix");
  const int nf = static_cast<int>(dims.size());
  std::vector<bool> kept(nf, false);
  for (int k : keep) {
    if (k < 0 || k >= nf) throw ValidationError("partial_trace: keep index out of range");
    if (kept[k]) throw ValidationError("partial_trace: duplicate keep index");
    kept[k] = true;
  }
  // verify keep order ascending so the result factor order is unambiguous
  for (size_t i = 1; i < keep.size(); ++i)
    if (keep[i] <= keep[i - 1]) throw ValidationError("partial_trace: keep must be ascending");

  int dkeep = 1, dtrace = 1;
  for (int f = 0; f < nf; ++f) (kept[f] ? dkeep : dtrace) *= dims[f];

  // strides of each factor in the full index
  std::vector<long long> stride(nf, 1);
  for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

  std::vector<int> keep_f, trace_f;
  for (int f = 0; f < nf; ++f) (kept[f] ? keep_f : trace_f).push_back(f);

  auto unpack = [&](long long idx, const std::vector<int>& factors) {
    // map a compact multi-index over `factors` to the full-space offset
    long long off = 0;
    for (int i = static_cast<int>(factors.size()) - 1; i >= 0; --i) {
      const int f = factors[i];
      off += (idx % dims[f]) * stride[f];
      idx /= dims[f];
    }
    return off;
  };

  ComplexMatrix out(dkeep);
  for (long long r = 0; r < dkeep; ++r) {
    const long long ro = unpack(r, keep_f);
    for (long long c = 0; c < dkeep; ++c) {
      const long long co = unpack(c, keep_f);
      cd s = 0.0;
      for (long long t = 0; t < dtrace; ++t) {
        const long long to = unpack(t, trace_f);
        s += m.at(static_cast<int>(ro + to), static_cast<int>(co + to));
      }
      out.at(static_cast<int>(r), static_cast<int>(c)) = s;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep,
                            const std::vector<int>& dims) {
  return DensityMatrix(partial_trace(rho.matrix(), keep, dims));
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
  if (!m.is_hermitian(tol::hermitian))
    throw ValidationError("matrix_sqrt_psd requires a Hermitian matrix");
  EighResult e = eigh(m);
  if (e.eigenvalues.back() < tol::psd_floor)
    throw ValidationError("matrix_sqrt_psd: eigenvalue below PSD floor");
  const int n = m.dim();
  ComplexMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cd s = 0.0;
      for (int k = 0; k < n; ++k) {
        const double ev = std::max(0.0, e.eigenvalues[k]);
        s += e.eigenvectors.at(i, k) * std::sqrt(ev) * std::conj(e.eigenvectors.at(j, k));
      }
      out.at(i, j) = s;
    }
  return out;
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& op) {
  if (rho.dim() != op.dim()) throw ValidationError("expectation: dimension mismatch");
  cd t = 0.0;
  for (int i = 0; i < op.dim(); ++i)
    for (int j = 0; j < op.dim(); ++j) t += rho.at(i, j) * op.at(j, i);
  if (std::abs(t.imag()) > 1e-8)
    throw NumericalError("expectation value has imaginary part " + std::to_string(t.imag()));
  return t.real();
}

double trace_product_real(const ComplexMatrix& a, const ComplexMatrix& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) {
      const cd &x = a.at(i, j), &y = b.at(j, i);
      s += x.real() * y.real() - x.imag() * y.imag();
    }
  return s;
}

ComplexMatrix embed_pair(const ComplexMatrix& op, int fa, int fb,
                         const std::vector<int>& dims) {
  const int nf = static_cast<int>(dims.size());
  if (fa < 0 || fb <= fa || fb >= nf) throw ValidationError("embed_pair: bad factor indices");
  if (op.dim() != dims[fa] * dims[fb]) throw ValidationError("embed_pair: operator dim mismatch");
  long long dtot = 1;
  for (int d : dims) dtot *= d;
  std::vector<long long> stride(nf, 1);
  for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

  ComplexMatrix out(static_cast<int>(dtot));
  std::vector<int> ri(nf), ci(nf);
  for (long long r = 0; r < dtot; ++r) {
    long long tmp = r;
    for (int f = 0; f < nf; ++f) { ri[f] = static_cast<int>(tmp / stride[f]); tmp %= stride[f]; }
    for (long long c = 0; c < dtot; ++c) {
      tmp = c;
      for (int f = 0; f < nf; ++f) { ci[f] = static_cast<int>(tmp / stride[f]); tmp %= stride[f]; }
      bool diag = true;
      for (int f = 0; f < nf && diag; ++f)
        if (f != fa && f != fb && ri[f] != ci[f]) diag = false;
      if (!diag) continue;
      const int orow = ri[fa] * dims[fb] + ri[fb];
      const int ocol = ci[fa] * dims[fb] + ci[fb];
      out.at(static_cast<int>(r), static_cast<int>(c)) = op.at(orow, ocol);
    }
  }
  return out;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  EighResult e = eigh(a.matrix() - b.matrix());
  double s = 0.0;
  for (double v : e.eigenvalues) s += std::abs(v);
  return 0.5 * s;
}

}  // namespace ionlink
