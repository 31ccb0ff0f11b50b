#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ionlink {

using cd = std::complex<double>;

/// Bad input (dimension mismatch, malformed file, out-of-range parameter).
class ValidationError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure (non-convergence, loss of positivity, quadrature drift).
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double entry_eq = 1e-12;   // ComplexMatrix equality
inline constexpr double hermitian = 1e-10;  // max |M - M^dag|
inline constexpr double psd_floor = -1e-9;  // smallest admissible eigenvalue
inline constexpr double trace_one = 1e-10;  // |tr(rho) - 1|
}  // namespace tol

/// Dense row-major complex matrix for the small dimensions this toolkit
/// uses (2, 4, 16). Not a general linear-algebra type.
class ComplexMatrix {
 public:
  ComplexMatrix() : dim_(0) {}
  explicit ComplexMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {
    if (dim <= 0) throw ValidationError("matrix dimension must be positive");
  }
  ComplexMatrix(int dim, std::vector<cd> entries) : dim_(dim), a_(std::move(entries)) {
    if (dim <= 0) throw ValidationError("matrix dimension must be positive");
    if (a_.size() != static_cast<size_t>(dim) * dim)
      throw ValidationError("entry count does not equal dim^2");
  }

  static ComplexMatrix identity(int dim);
  static ComplexMatrix zero(int dim) { return ComplexMatrix(dim); }

  int dim() const { return dim_; }
  cd& at(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
  const cd& at(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }
  const std::vector<cd>& entries() const { return a_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;
  cd trace() const;
  double max_abs() const;          // entrywise infinity norm
  double frobenius_norm() const;

  ComplexMatrix operator+(const ComplexMatrix& o) const;
  ComplexMatrix operator-(const ComplexMatrix& o) const;
  ComplexMatrix operator*(const ComplexMatrix& o) const;
  ComplexMatrix operator*(cd s) const;
  ComplexMatrix& operator+=(const ComplexMatrix& o);

  bool approx_equal(const ComplexMatrix& o, double atol = tol::entry_eq) const;
  bool is_hermitian(double atol = tol::hermitian) const;

 private:
  int dim_;
  std::vector<cd> a_;
};

inline ComplexMatrix operator*(cd s, const ComplexMatrix& m) { return m * s; }

/// Normalized state vector. Basis ordering is fixed globally:
/// ion-photon (down H, down V, up H, up V); ion-ion (dd, du, ud, uu).
class PureState {
 public:
  PureState(int dim, std::vector<cd> amplitudes);
  int dim() const { return dim_; }
  const std::vector<cd>& amplitudes() const { return a_; }
  const cd& operator[](int i) const { return a_[static_cast<size_t>(i)]; }
  ComplexMatrix projector() const;

 private:
  int dim_;
  std::vector<cd> a_;
};

/// Hermitian, positive-semidefinite, unit-trace operator. The constructor
/// is the shared validator: every density matrix in the toolkit passes
/// through it.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int dim);
  /// Symmetrize, clamp eigenvalues in [psd_floor, 0) to zero, renormalize,
  /// then validate. For iterative algorithms whose roundoff produces tiny
  /// negative eigenvalues.
  static DensityMatrix repaired(const ComplexMatrix& m);

  int dim() const { return m_.dim(); }
  const ComplexMatrix& matrix() const { return m_; }
  const cd& at(int r, int c) const { return m_.at(r, c); }

 private:
  ComplexMatrix m_;
};

enum class Pauli { I, X, Y, Z };

ComplexMatrix pauli_matrix(Pauli p);
char pauli_label(Pauli p);
Pauli pauli_from_label(char c);

enum class BellLabel { phi_plus, phi_minus, psi_plus, psi_minus };

/// Canonical Bell states; `phase` multiplies the second branch, e.g.
/// psi_minus with phase f is (|01> - e^{if}|10>)/sqrt(2).
PureState bell_state(BellLabel label, double phase = 0.0);

// --- text serialization (one line per entry: row,col,re,im, ascending) ---

std::string matrix_to_text(const ComplexMatrix& m);
ComplexMatrix matrix_from_text(const std::string& text);
std::string density_to_text(const DensityMatrix& rho);
DensityMatrix density_from_text(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ionlink
