#pragma once

#include "mcc/common.hpp"

namespace mcc {

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
struct SymEig {
  Vector values;
  Matrix vectors;
};

/// Full symmetric eigendecomposition (LAPACK dsyevd). Only the lower triangle is read.
SymEig sym_eig(const Matrix& a);
/// Eigenvalues only, ascending.
Vector sym_eigenvalues(const Matrix& a);

/// f(A) = U f(Λ) Uᵀ for symmetric A.
template <class F>
Matrix sym_apply(const SymEig& e, F&& f) {
  Vector d = e.values.unaryExpr(f);
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

/// exp(-A t) for symmetric A.
Matrix sym_expm_neg(const Matrix& a, double t);

/// Inverse square root of a symmetric positive definite matrix.
Matrix sym_inv_sqrt(const Matrix& a);

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix; eigenvalues below
/// `rel_tol * λ_max` are treated as zero.
Matrix sym_pinv(const Matrix& a, double rel_tol = 1e-10);

/// Symmetric (Löwdin) orthogonalization A (AᵀA)^{-1/2}.
Matrix orth_symmetric(const Matrix& a);
/// Householder thin-Q orthogonalization.
Matrix orth_qr(const Matrix& a);

struct MatrixNorms {
  double spectral = 0.0;
  double nuclear = 0.0;
};

/// Spectral and nuclear norms from singular values; symmetric input goes
/// through eigenvalue magnitudes.
MatrixNorms norms(const Matrix& a);
MatrixNorms sym_norms(const Matrix& a);

/// Largest eigenvalue of a symmetric PSD matrix. Dense for small n,
/// Lanczos with full reorthogonalization otherwise.
double largest_eigenvalue_psd(const Matrix& a);

/// Norms of D = diag(mu) - G Gᵀ where mu >= 0. Eigenvalues of D below zero
/// number at most rank(G); they are located by inertia counting on the
/// r x r matrix I - Gᵀ (diag(mu) - λ)^{-1} G, which makes the cost O(n r²)
/// per probe instead of a dense O(n³) eigensolve.
MatrixNorms diag_minus_lowrank_norms(const Vector& mu, const Matrix& g);

/// Number of eigenvalues of diag(mu) - G Gᵀ strictly below `lambda`.
int diag_minus_lowrank_count_below(const Vector& mu, const Matrix& g, double lambda);

/// Dense matrix exponential exp(A) via scaling-and-squaring Padé.
Matrix expm(const Matrix& a);

/// LLT of an SPD block; throws `kind` when the block is not numerically
/// positive definite.
/// True when the linked LAPACK passes a startup eigensolver self-test.
/// Otherwise symmetric eigenproblems fall back to Eigen's solver.
bool lapack_eigensolver_ok();

/// For executables: when the self-test fails and OPENBLAS_CORETYPE is unset,
/// re-executes the process with a conservative OpenBLAS kernel. Returns
/// normally if nothing needs to change or exec fails.
void prefer_safe_blas_kernel(char** argv);

Eigen::LLT<Matrix> spd_factor(const Matrix& a, ErrorKind kind, const char* what);

}  // namespace mcc
