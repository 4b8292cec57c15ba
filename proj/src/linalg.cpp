#include "mcc/linalg.hpp"

#include <lapacke.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace mcc {

namespace {

void check_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorKind::NonFinite, what);
}

void check_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeMismatch, what);
}

void lapack_syevd(Matrix& work, Vector& w, char jobz) {
  const auto n = static_cast<lapack_int>(work.rows());
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, work.data(), n, w.data());
  if (info != 0) throw Error(ErrorKind::NonFinite, "dsyevd failed to converge");
}

// Some optimized BLAS builds pick CPU kernels that return non-orthogonal
// eigenvectors; a small deterministic problem catches that once per process.
bool probe_lapack() {
  const Eigen::Index n = 160;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      a(i, j) = a(j, i) = std::sin(0.37 * static_cast<double>(i * n + j) + 1.0);
  Matrix v = a;
  Vector w(n);
  try {
    lapack_syevd(v, w, 'V');
  } catch (const Error&) {
    return false;
  }
  const double orth = (v.transpose() * v - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  const double res = (a * v - v * w.asDiagonal()).cwiseAbs().maxCoeff();
  return orth < 1e-10 && res < 1e-10 * std::max(1.0, w.cwiseAbs().maxCoeff());
}

// Calls dsyevd on a column-major copy; `jobz` is 'V' or 'N'.
void syevd(Matrix& work, Vector& w, char jobz) {
  w.resize(work.rows());
  if (work.rows() == 0) return;
  if (lapack_eigensolver_ok()) {
    lapack_syevd(work, w, jobz);
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(work, jobz == 'V' ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NonFinite, "eigensolver failed to converge");
  w = es.eigenvalues();
  if (jobz == 'V') work = es.eigenvectors();
}

}  // namespace

bool lapack_eigensolver_ok() {
  static const bool ok = probe_lapack();
  return ok;
}

void prefer_safe_blas_kernel(char** argv) {
  if (lapack_eigensolver_ok() || std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  ::setenv("OPENBLAS_CORETYPE", "Haswell", 1);
  ::execv("/proc/self/exe", argv);
}

SymEig sym_eig(const Matrix& a) {
  check_square(a, "sym_eig expects a square matrix");
  check_finite(a, "sym_eig input has non-finite entries");
  SymEig e;
  e.vectors = a;
  syevd(e.vectors, e.values, 'V');
  return e;
}

Vector sym_eigenvalues(const Matrix& a) {
  check_square(a, "sym_eigenvalues expects a square matrix");
  check_finite(a, "sym_eigenvalues input has non-finite entries");
  Matrix work = a;
  Vector w;
  syevd(work, w, 'N');
  return w;
}

Matrix sym_expm_neg(const Matrix& a, double t) {
  if (a.rows() == 0) return a;
  return sym_apply(sym_eig(a), [t](double x) { return std::exp(-x * t); });
}

Matrix sym_inv_sqrt(const Matrix& a) {
  SymEig e = sym_eig(a);
  if (e.values.size() > 0 && !(e.values(0) > 0.0))
    throw Error(ErrorKind::InvalidArgument, "sym_inv_sqrt needs a positive definite matrix");
  return sym_apply(e, [](double x) { return 1.0 / std::sqrt(x); });
}

Matrix sym_pinv(const Matrix& a, double rel_tol) {
  SymEig e = sym_eig(a);
  if (e.values.size() == 0) return a;
  const double cut = rel_tol * e.values.cwiseAbs().maxCoeff();
  return sym_apply(e, [cut](double x) { return std::abs(x) <= cut ? 0.0 : 1.0 / x; });
}

Matrix orth_symmetric(const Matrix& a) { return a * sym_inv_sqrt(a.transpose() * a); }

Matrix orth_qr(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  return q;
}

MatrixNorms norms(const Matrix& a) {
  check_finite(a, "norms input has non-finite entries");
  if (a.size() == 0) return {};
  if (a.rows() == a.cols() && (a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * max_abs(a))
    return sym_norms(0.5 * (a + a.transpose()));
  Eigen::BDCSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  return {s.maxCoeff(), s.sum()};
}

MatrixNorms sym_norms(const Matrix& a) {
  if (a.size() == 0) return {};
  Vector w = sym_eigenvalues(a).cwiseAbs();
  return {w.maxCoeff(), w.sum()};
}

double largest_eigenvalue_psd(const Matrix& a) {
  check_square(a, "largest_eigenvalue_psd expects a square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  if (n <= 400) return sym_eigenvalues(a)(n - 1);

  // Lanczos with full reorthogonalization from a fixed, non-degenerate start.
  const Eigen::Index max_steps = std::min<Eigen::Index>(n, 300);
  Matrix basis(n, max_steps + 1);
  Vector alpha(max_steps), beta(max_steps);
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  q.normalize();
  basis.col(0) = q;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < max_steps; ++j) {
    Vector w = a * basis.col(j);
    alpha(j) = basis.col(j).dot(w);
    for (int pass = 0; pass < 2; ++pass) {
      Vector proj = basis.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis.leftCols(j + 1) * proj;
    }
    beta(j) = w.norm();
    const Eigen::Index m = j + 1;
    if (m % 5 == 0 || beta(j) == 0.0 || m == max_steps) {
      Matrix tri = Matrix::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        tri(i, i) = alpha(i);
        if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta(i);
      }
      Eigen::SelfAdjointEigenSolver<Matrix> es(tri);
      theta = es.eigenvalues()(m - 1);
      const double resid = std::abs(beta(j) * es.eigenvectors()(m - 1, m - 1));
      if (resid <= 1e-14 * std::max(std::abs(theta), std::numeric_limits<double>::min()) ||
          beta(j) == 0.0)
        return theta;
    }
    if (beta(j) == 0.0) break;
    basis.col(j + 1) = w / beta(j);
  }
  return theta;
}

int diag_minus_lowrank_count_below(const Vector& mu, const Matrix& g, double lambda) {
  const Eigen::Index r = g.cols();
  // Keep diag(mu) − λ safely invertible; underflowed mu entries sit at exactly 0.
  constexpr double guard = 1e-250;
  Vector d = mu.array() - lambda;
  while ((d.array().abs() < guard).any()) {
    lambda -= std::max(guard, std::abs(lambda) * 4.0 * std::numeric_limits<double>::epsilon());
    d = mu.array() - lambda;
  }
  int count = static_cast<int>((d.array() < 0.0).count());
  if (r == 0) return count;
  // Haynsworth: inertia(D - λ) = inertia(diag(mu) - λ) + inertia(I - Gᵀ(diag(mu) - λ)⁻¹G).
  Matrix scaled = d.cwiseInverse().asDiagonal() * g;
  Matrix f = Matrix::Identity(r, r);
  f.noalias() -= g.transpose() * scaled;
  f = (0.5 * (f + f.transpose())).eval();
  Vector w = sym_eigenvalues(f);
  count += static_cast<int>((w.array() < 0.0).count());
  return count;
}

MatrixNorms diag_minus_lowrank_norms(const Vector& mu, const Matrix& g) {
  const Eigen::Index n = mu.size();
  if (n == 0) return {};
  if (g.rows() != n) throw Error(ErrorKind::ShapeMismatch, "diag_minus_lowrank_norms row mismatch");
  const double gf2 = g.squaredNorm();
  const double mu_max = mu.maxCoeff();
  const double scale = std::max({mu_max, gf2, std::numeric_limits<double>::min()});
  const double tol = 1e-16 * scale;

  auto count = [&](double x) { return diag_minus_lowrank_count_below(mu, g, x); };

  // Recursive interval splitting: every eigenvalue inside [lo, hi) is located
  // to width `tol` and reported through `emit(value, multiplicity)`.
  std::vector<std::pair<double, int>> found;
  auto isolate = [&](auto&& self, double lo, int clo, double hi, int chi) -> void {
    if (chi <= clo) return;
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol || mid <= lo || mid >= hi) {
      found.emplace_back(mid, chi - clo);
      return;
    }
    const int cmid = count(mid);
    self(self, lo, clo, mid, cmid);
    self(self, mid, cmid, hi, chi);
  };

  const double lo = -(gf2 + tol) * (1.0 + 1e-12) - tol;
  const double zero = -tol;
  const int c_lo = count(lo);
  const int c_zero = count(zero);
  isolate(isolate, lo, c_lo, zero, c_zero);
  double neg_sum = 0.0;
  double lambda_min = 0.0;
  for (size_t k = 0; k < found.size(); ++k) {
    neg_sum += found[k].first * found[k].second;
    if (k == 0) lambda_min = found[k].first;
  }

  // Largest eigenvalue: bisection on the point where the count reaches n.
  double lambda_max = 0.0;
  if (c_zero < static_cast<int>(n)) {
    double a = zero;
    double b = mu_max + tol + std::abs(mu_max) * 1e-15;
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count(mid) >= static_cast<int>(n))
        b = mid;
      else
        a = mid;
    }
    lambda_max = 0.5 * (a + b);
  }

  const double trace = mu.sum() - gf2;
  MatrixNorms out;
  out.spectral = std::max(std::abs(lambda_max), std::abs(lambda_min));
  out.nuclear = std::max(trace - 2.0 * neg_sum, out.spectral);
  return out;
}

Matrix expm(const Matrix& a) {
  check_square(a, "expm expects a square matrix");
  check_finite(a, "expm input has non-finite entries");
  if (a.rows() == 0) return a;
  return a.exp();
}

Eigen::LLT<Matrix> spd_factor(const Matrix& a, ErrorKind kind, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw Error(kind, what);
  const Vector d = llt.matrixLLT().diagonal();
  if (d.size() > 0) {
    const double ratio = d.minCoeff() / d.maxCoeff();
    if (!(ratio * ratio > 1e-15)) throw Error(kind, what);
  }
  return llt;
}

}  // namespace mcc
