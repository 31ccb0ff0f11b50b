#pragma once

#include <vector>

#include "ionlink/types.hpp"

namespace ionlink {

struct EighResult {
  std::vector<double> eigenvalues;  // descending
  ComplexMatrix eigenvectors;       // orthonormal columns, column i <-> eigenvalues[i]
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Sized for dim <= 16; exactly reproducible across platforms.
EighResult eigh(const ComplexMatrix& m);

/// Kronecker product, row-major, dim(a)*dim(b).
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
PureState tensor(const PureState& a, const PureState& b);

/// Trace out the factors not listed in `keep` (indices into `dims`,
/// ascending). Kept factors keep their relative order.
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& keep,
                            const std::vector<int>& dims);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep,
                            const std::vector<int>& dims);

/// Principal square root of a PSD Hermitian matrix. Eigenvalues in
/// [psd_floor, 0) are clamped to zero; below psd_floor is an error.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m);

/// tr(rho * op) for Hermitian op; the imaginary residue is checked
/// (< 1e-8) and discarded.
double expectation(const DensityMatrix& rho, const ComplexMatrix& op);

/// Real part of tr(a * b) without forming the product.
double trace_product_real(const ComplexMatrix& a, const ComplexMatrix& b);

/// Embed an operator acting on factors (fa, fb) of a tensor-product space
/// (identity elsewhere). `op` lives on dims[fa] x dims[fb] with fa-major
/// index order; requires fa < fb.
ComplexMatrix embed_pair(const ComplexMatrix& op, int fa, int fb,
                         const std::vector<int>& dims);

/// 0.5 * trace norm of (a - b).
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace ionlink
