#include "mcc/committor.hpp"

#include <cmath>
#include <limits>

namespace mcc {

namespace {

void set_identity_rows(Matrix& ct, const std::vector<int>& idx) {
  for (size_t p = 0; p < idx.size(); ++p) {
    ct.row(idx[p]).setZero();
    ct(idx[p], static_cast<Eigen::Index>(p)) = 1.0;
  }
}

}  // namespace

namespace {

void check_set(const IndexSet& I, int n) {
  if (I.empty()) throw Error(ErrorKind::InvalidArgument, "index set must be nonempty");
  if (I.universe() != n) throw Error(ErrorKind::ShapeMismatch, "index set universe differs from chain size");
}

// Solves M X = B for M = −R_ĪĪ + γ (a nonsingular M-matrix when Ī ≠ [n]).
Matrix complement_solve(const ReversibleChain& chain, const std::vector<int>& comp,
                        const Matrix& rhs, double gamma) {
  const Matrix R = chain.dense_rates();
  Matrix m = -submatrix(R, comp, comp);
  m.diagonal().array() += gamma;
  Eigen::PartialPivLU<Matrix> lu(m);
  const double det_scale = m.cwiseAbs().maxCoeff();
  const Vector u = lu.matrixLU().diagonal().cwiseAbs();
  if (!(u.minCoeff() > 1e-14 * det_scale))
    throw Error(ErrorKind::SingularComplementBlock, "complement block of R is singular");
  return lu.solve(rhs);
}

}  // namespace

CommittorBundle committor_closed_form(const SpectralLaplacian& lap, const IndexSet& I) {
  const int n = lap.n();
  check_set(I, n);
  CommittorBundle b;
  b.I = I;
  const Vector& h = lap.h;
  const auto& idx = I.indices();
  const int r = I.size();
  if (I.is_full()) {
    b.Ct = Matrix::Identity(n, n);
    b.C = Matrix::Identity(n, n);
    b.pi_hat = h.cwiseAbs2();
    b.h_hat = h;
    b.omega = 0.0;
    b.k_condition = std::numeric_limits<double>::quiet_NaN();
    return b;
  }
  const Matrix kii = submatrix(lap.K, idx, idx);
  const Vector kev = sym_eigenvalues(kii);
  b.k_condition = kev(r - 1) / kev(0);
  auto llt = spd_factor(kii, ErrorKind::SingularPrincipalBlock, "K_II is not positive definite");
  const Vector hI = subvector(h, idx);
  const Vector a = llt.solve(hI);
  const double s = hI.dot(a);
  if (!(s > 0.0)) throw Error(ErrorKind::SingularPrincipalBlock, "h_Iᵀ K_II⁻¹ h_I is not positive");
  // Z = K_{:,I} K_II⁻¹ (exactly identity on the rows of I).
  Matrix Z = llt.solve(columns(lap.K, idx).transpose()).transpose();
  for (int p = 0; p < r; ++p) {
    Z.row(idx[static_cast<size_t>(p)]).setZero();
    Z(idx[static_cast<size_t>(p)], p) = 1.0;
  }
  Vector z = h - Z * hI;
  for (int i : idx) z(i) = 0.0;
  Matrix inner = z * (a / s).transpose() + Z;
  b.Ct = h.cwiseInverse().asDiagonal() * inner * hI.asDiagonal();
  set_identity_rows(b.Ct, idx);
  b.pi_hat = hI.cwiseProduct(a) / s;
  b.h_hat = b.pi_hat.cwiseSqrt();
  b.C = h.asDiagonal() * b.Ct * b.h_hat.cwiseInverse().asDiagonal();
  b.omega = 1.0 / s;
  return b;
}

Matrix committor_absorbing_solve(const ReversibleChain& chain, const IndexSet& I) {
  check_set(I, chain.n);
  const auto& idx = I.indices();
  const std::vector<int> comp = I.complement();
  Matrix out = Matrix::Zero(chain.n, I.size());
  for (int p = 0; p < I.size(); ++p) out(idx[static_cast<size_t>(p)], p) = 1.0;
  if (comp.empty()) return out;
  const Matrix R = chain.dense_rates();
  const Matrix x = complement_solve(chain, comp, submatrix(R, comp, idx), 0.0);
  for (size_t q = 0; q < comp.size(); ++q) out.row(comp[q]) = x.row(static_cast<Eigen::Index>(q));
  return out;
}

KilledCommittor killed_committor(const KilledOperators& killed, const Vector& h, const IndexSet& I) {
  if (!(killed.gamma > 0.0)) throw Error(ErrorKind::NonPositiveGamma, "killing rate must be positive");
  const int n = static_cast<int>(killed.K.rows());
  check_set(I, n);
  const auto& idx = I.indices();
  KilledCommittor out;
  out.gamma = killed.gamma;
  const Matrix kii = submatrix(killed.K, idx, idx);
  auto llt = spd_factor(kii, ErrorKind::SingularPrincipalBlock, "(K_γ)_II is not positive definite");
  Matrix Z = llt.solve(columns(killed.K, idx).transpose()).transpose();
  for (int p = 0; p < I.size(); ++p) {
    Z.row(idx[static_cast<size_t>(p)]).setZero();
    Z(idx[static_cast<size_t>(p)], p) = 1.0;
  }
  const Vector hI = subvector(h, idx);
  out.Ct = h.cwiseInverse().asDiagonal() * Z * hI.asDiagonal();
  set_identity_rows(out.Ct, idx);
  out.pi_hat = out.Ct.transpose() * h.cwiseAbs2();
  out.h_hat = out.pi_hat.cwiseSqrt();
  out.C = h.asDiagonal() * out.Ct * out.h_hat.cwiseInverse().asDiagonal();
  return out;
}

Matrix killed_committor_absorbing_solve(const ReversibleChain& chain, const IndexSet& I, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::NonPositiveGamma, "killing rate must be positive");
  check_set(I, chain.n);
  const auto& idx = I.indices();
  const std::vector<int> comp = I.complement();
  Matrix out = Matrix::Zero(chain.n, I.size());
  for (int p = 0; p < I.size(); ++p) out(idx[static_cast<size_t>(p)], p) = 1.0;
  if (comp.empty()) return out;
  const Matrix R = chain.dense_rates();
  const Matrix x = complement_solve(chain, comp, submatrix(R, comp, idx), gamma);
  for (size_t q = 0; q < comp.size(); ++q) out.row(comp[q]) = x.row(static_cast<Eigen::Index>(q));
  return out;
}

HittingTimes hitting_times(const SpectralLaplacian& lap) {
  HittingTimes ht;
  const Vector hinv = lap.h.cwiseInverse();
  ht.S = hinv.asDiagonal() * lap.K * hinv.asDiagonal();
  const Eigen::Index n = ht.S.rows();
  ht.H = Vector::Ones(n) * ht.S.diagonal().transpose() - ht.S;
  ht.H.diagonal().setZero();
  return ht;
}

double mean_marking_time(const SpectralLaplacian& lap, const Vector& h, const IndexSet& I) {
  check_set(I, lap.n());
  if (I.is_full()) return 0.0;
  const auto& idx = I.indices();
  const Matrix kii = submatrix(lap.K, idx, idx);
  auto llt = spd_factor(kii, ErrorKind::SingularPrincipalBlock, "K_II is not positive definite");
  const Vector hI = subvector(h, idx);
  return 1.0 / hI.dot(llt.solve(hI));
}

Vector time_to_set_absorbing(const ReversibleChain& chain, const IndexSet& I) {
  check_set(I, chain.n);
  Vector out = Vector::Zero(chain.n);
  const std::vector<int> comp = I.complement();
  if (comp.empty()) return out;
  const Matrix m = complement_solve(chain, comp, Matrix::Ones(static_cast<Eigen::Index>(comp.size()), 1), 0.0);
  for (size_t q = 0; q < comp.size(); ++q) out(comp[q]) = m(static_cast<Eigen::Index>(q), 0);
  return out;
}

}  // namespace mcc
