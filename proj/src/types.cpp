#include "ionlink/types.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ionlink/linalg.hpp"

namespace ionlink {

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r.at(i, j) = std::conj(at(j, i));
  return r;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r.at(i, j) = at(j, i);
  return r;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix r(dim_);
  for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = std::conj(a_[k]);
  return r;
}

cd ComplexMatrix::trace() const {
  cd t = 0.0;
  for (int i = 0; i < dim_; ++i) t += at(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const cd& v : a_) m = std::max(m, std::abs(v));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cd& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& o) const {
  if (dim_ != o.dim_) throw ValidationError("matrix dimension mismatch in +");
  ComplexMatrix r(dim_);
  for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
  return r;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& o) const {
  if (dim_ != o.dim_) throw ValidationError("matrix dimension mismatch in -");
  ComplexMatrix r(dim_);
  for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
  return r;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& o) const {
  if (dim_ != o.dim_) throw ValidationError("matrix dimension mismatch in *");
  ComplexMatrix r(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int k = 0; k < dim_; ++k) {
      const cd aik = at(i, k);
      if (aik == cd(0.0)) continue;
      for (int j = 0; j < dim_; ++j) r.at(i, j) += aik * o.at(k, j);
    }
  }
  return r;
}

ComplexMatrix ComplexMatrix::operator*(cd s) const {
  ComplexMatrix r(dim_);
  for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * s;
  return r;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (dim_ != o.dim_) throw ValidationError("matrix dimension mismatch in +=");
  for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

bool ComplexMatrix::approx_equal(const ComplexMatrix& o, double atol) const {
  if (dim_ != o.dim_) return false;
  for (size_t k = 0; k < a_.size(); ++k)
    if (std::abs(a_[k] - o.a_[k]) > atol) return false;
  return true;
}

bool ComplexMatrix::is_hermitian(double atol) const {
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j)
      if (std::abs(at(i, j) - std::conj(at(j, i))) > atol) return false;
  return true;
}

PureState::PureState(int dim, std::vector<cd> amplitudes)
    : dim_(dim), a_(std::move(amplitudes)) {
  if (dim <= 0) throw ValidationError("state dimension must be positive");
  if (a_.size() != static_cast<size_t>(dim)) throw ValidationError("amplitude count != dim");
  double n = 0.0;
  for (const cd& v : a_) n += std::norm(v);
  if (std::abs(std::sqrt(n) - 1.0) > tol::entry_eq)
    throw ValidationError("state vector is not normalized");
}

ComplexMatrix PureState::projector() const {
  ComplexMatrix m(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m.at(i, j) = a_[i] * std::conj(a_[j]);
  return m;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  ComplexMatrix diff = m_ - m_.adjoint();
  if (diff.max_abs() >= tol::hermitian)
    throw ValidationError("density matrix is not Hermitian");
  if (std::abs(m_.trace() - cd(1.0)) >= tol::trace_one)
    throw ValidationError("density matrix trace is not 1");
  EighResult e = eigh(m_);
  if (e.eigenvalues.back() < tol::psd_floor)
    throw ValidationError("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(ComplexMatrix::identity(dim) * cd(1.0 / dim));
}

DensityMatrix DensityMatrix::repaired(const ComplexMatrix& m) {
  ComplexMatrix h = (m + m.adjoint()) * cd(0.5);
  EighResult e = eigh(h);
  if (e.eigenvalues.back() < tol::psd_floor)
    throw ValidationError("matrix eigenvalue below repairable floor");
  const int d = h.dim();
  std::vector<double> ev(e.eigenvalues);
  double tr = 0.0;
  for (double& v : ev) {
    if (v < 0.0) v = 0.0;
    tr += v;
  }
  if (tr <= 0.0) throw ValidationError("matrix has zero trace after clamping");
  ComplexMatrix out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      cd s = 0.0;
      for (int k = 0; k < d; ++k)
        s += e.eigenvectors.at(i, k) * (ev[k] / tr) * std::conj(e.eigenvectors.at(j, k));
      out.at(i, j) = s;
    }
  return DensityMatrix(std::move(out));
}

ComplexMatrix pauli_matrix(Pauli p) {
  ComplexMatrix m(2);
  switch (p) {
    case Pauli::I: m.at(0, 0) = 1.0; m.at(1, 1) = 1.0; break;
    case Pauli::X: m.at(0, 1) = 1.0; m.at(1, 0) = 1.0; break;
    case Pauli::Y: m.at(0, 1) = cd(0.0, -1.0); m.at(1, 0) = cd(0.0, 1.0); break;
    case Pauli::Z: m.at(0, 0) = 1.0; m.at(1, 1) = -1.0; break;
  }
  return m;
}

char pauli_label(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_label(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
  }
  throw ValidationError(std::string("unknown Pauli label '") + c + "'");
}

PureState bell_state(BellLabel label, double phase) {
  const double s = 1.0 / std::sqrt(2.0);
  const cd ph = std::polar(s, phase);
  std::vector<cd> a(4, cd(0.0));
  switch (label) {
    case BellLabel::phi_plus:  a[0] = s; a[3] = ph; break;
    case BellLabel::phi_minus: a[0] = s; a[3] = -ph; break;
    case BellLabel::psi_plus:  a[1] = s; a[2] = ph; break;
    case BellLabel::psi_minus: a[1] = s; a[2] = -ph; break;
  }
  return PureState(4, std::move(a));
}

std::string matrix_to_text(const ComplexMatrix& m) {
  std::string out;
  char buf[128];
  for (int r = 0; r < m.dim(); ++r)
    for (int c = 0; c < m.dim(); ++c) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.15g,%.15g\n", r, c,
                    m.at(r, c).real(), m.at(r, c).imag());
      out += buf;
    }
  return out;
}

ComplexMatrix matrix_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  struct Entry { int r, c; double re, im; };
  std::vector<Entry> entries;
  int maxidx = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    Entry e{};
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &e.r, &e.c, &e.re, &e.im) != 4)
      throw ValidationError("malformed matrix entry at line " + std::to_string(lineno));
    if (e.r < 0 || e.c < 0)
      throw ValidationError("negative index at line " + std::to_string(lineno));
    maxidx = std::max(maxidx, std::max(e.r, e.c));
    entries.push_back(e);
  }
  const int d = maxidx + 1;
  if (d <= 0 || entries.size() != static_cast<size_t>(d) * d)
    throw ValidationError("matrix text does not contain dim^2 entries");
  ComplexMatrix m(d);
  for (size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    const size_t expect_r = k / d, expect_c = k % d;
    if (e.r != static_cast<int>(expect_r) || e.c != static_cast<int>(expect_c))
      throw ValidationError("matrix entries not in ascending (row, col) order");
    m.at(e.r, e.c) = cd(e.re, e.im);
  }
  return m;
}

std::string density_to_text(const DensityMatrix& rho) { return matrix_to_text(rho.matrix()); }

DensityMatrix density_from_text(const std::string& text) {
  return DensityMatrix(matrix_from_text(text));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ValidationError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ionlink
