#include "mcc/compress.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

namespace mcc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Matrix expm_half(const SymEig& e, double t) {
  return sym_apply(e, [t](double x) { return std::exp(-0.5 * x * t); });
}

// Pieces of the closed forms that only involve K restricted to I.
struct KBlock {
  Matrix kcol;  // K_{:,I}
  Matrix kii;
  Eigen::LLT<Matrix> llt;
  Vector hI;
  Vector a;  // K_II⁻¹ h_I
  double s = 0.0;
};

KBlock k_block(const SpectralLaplacian& lap, const Vector& h, const IndexSet& I) {
  KBlock b;
  const auto& idx = I.indices();
  b.kcol = columns(lap.K, idx);
  b.kii = submatrix(lap.K, idx, idx);
  b.llt = spd_factor(b.kii, ErrorKind::SingularPrincipalBlock, "K_II is not positive definite");
  b.hI = subvector(h, idx);
  b.a = b.llt.solve(b.hI);
  b.s = b.hI.dot(b.a);
  return b;
}

}  // namespace

ProjectiveBasis projective_basis(const SpectralLaplacian& lap, const CommittorBundle& bundle, bool use_qr) {
  ProjectiveBasis b;
  b.V = use_qr ? orth_qr(bundle.C) : orth_symmetric(bundle.C);
  b.A = sym(b.V.transpose() * lap.L * b.V);
  b.eigA = sym_eig(b.A);
  return b;
}

Matrix projective_compression(const ProjectiveBasis& basis, double t) {
  if (t < 0.0) throw Error(ErrorKind::NegativeTime, "compression time must be nonnegative");
  const Matrix x = basis.V * basis.eigA.vectors;
  const Vector d = (-basis.eigA.values.array() * t).exp();
  return sym(x * d.asDiagonal() * x.transpose());
}

Matrix projective_compression(const SpectralLaplacian& lap, const CommittorBundle& bundle, double t) {
  return projective_compression(projective_basis(lap, bundle), t);
}

GeneralizedProjective generalized_projective(const SpectralLaplacian& lap, const Matrix& V, double t) {
  if (t < 0.0) throw Error(ErrorKind::NegativeTime, "compression time must be nonnegative");
  if (V.rows() != lap.n()) throw Error(ErrorKind::ShapeMismatch, "basis has wrong row count");
  const Eigen::Index r = V.cols();
  if (max_abs(V.transpose() * V - Matrix::Identity(r, r)) > 1e-10)
    throw Error(ErrorKind::InvalidArgument, "basis columns are not orthonormal");
  const Vector resid = lap.h - V * (V.transpose() * lap.h);
  if (resid.norm() > 1e-10) throw Error(ErrorKind::NullSpaceNotSpanned, "basis does not contain h");
  const Matrix A = sym(V.transpose() * lap.L * V);
  GeneralizedProjective out;
  out.P = sym(V * sym_expm_neg(A, t) * V.transpose());
  const MatrixNorms nu = sym_norms(sym(lap.K - V * sym_pinv(A) * V.transpose()));
  out.nu2 = nu.spectral;
  out.nu_nuc = nu.nuclear;
  return out;
}

StructurePreserving structure_preserving(const Vector& h, const CommittorBundle& bundle,
                                         const InducedChain& ic, double t) {
  if (t < 0.0) throw Error(ErrorKind::NegativeTime, "compression time must be nonnegative");
  StructurePreserving sp;
  sp.P = sym(bundle.C * sym_expm_neg(ic.L_hat, t) * bundle.C.transpose());
  sp.Pt = unsymmetrize(sp.P, h);
  return sp;
}

double schur_trace(const SpectralLaplacian& lap, const IndexSet& I) {
  const std::vector<int> comp = I.complement();
  if (comp.empty()) return 0.0;
  const Matrix lcc = submatrix(lap.L, comp, comp);
  auto llt = spd_factor(lcc, ErrorKind::SingularComplementBlock, "L_ĪĪ is not positive definite");
  // Tr(M⁻¹) = ‖L⁻¹‖_F² for M = LLᵀ.
  Matrix linv = llt.matrixL().solve(Matrix::Identity(lcc.rows(), lcc.cols()));
  return linv.squaredNorm();
}

NystromErrors nystrom_errors(const SpectralLaplacian& lap, const Vector& h, const IndexSet& I) {
  if (I.empty()) throw Error(ErrorKind::InvalidArgument, "index set must be nonempty");
  NystromErrors e;
  if (I.is_full()) return e;
  const KBlock b = k_block(lap, h, I);
  const Matrix Z = b.llt.solve(b.kcol.transpose()).transpose();  // K_{:,I} K_II⁻¹
  const Vector z = h - Z * b.hI;
  Matrix e2 = lap.K - Z * b.kcol.transpose() + z * z.transpose() / b.s;
  e.eps2 = largest_eigenvalue_psd(sym(e2));
  const Matrix k2ii = b.kcol.transpose() * b.kcol;
  const double tr_term = (b.llt.solve(k2ii)).trace();
  e.eps_nuc = lap.trace_K() - tr_term + (1.0 + b.a.dot(k2ii * b.a)) / b.s;

  const std::vector<int> comp = I.complement();
  const Matrix lcc = submatrix(lap.L, comp, comp);
  auto llt = spd_factor(lcc, ErrorKind::SingularComplementBlock, "L_ĪĪ is not positive definite");
  const Matrix linv = llt.matrixL().solve(Matrix::Identity(lcc.rows(), lcc.cols()));
  e.eps_nuc_schur = linv.squaredNorm();
  e.eps2_schur = largest_eigenvalue_psd(sym(linv.transpose() * linv));
  return e;
}

Obliqueness obliqueness(const SpectralLaplacian& lap, const Vector& h, const IndexSet& I) {
  if (I.empty()) throw Error(ErrorKind::InvalidArgument, "index set must be nonempty");
  Obliqueness o;
  if (I.is_full()) {
    o.Psi_asym = Matrix::Zero(I.size(), I.size());
    return o;
  }
  const KBlock b = k_block(lap, h, I);
  const Eigen::Index r = b.kii.rows();
  const double omega = 1.0 / b.s;
  const Matrix k2ii = b.kcol.transpose() * b.kcol;
  const Matrix A = b.llt.solve(Matrix::Identity(r, r));
  const Vector k2a = k2ii * b.a;
  o.Psi_asym = omega * (b.kii * b.a.cwiseQuotient(b.hI).asDiagonal() + k2a * b.a.transpose()) - k2ii * A;
  o.psi_nuc = o.Psi_asym.trace();
  Eigen::EigenSolver<Matrix> es(o.Psi_asym, false);
  o.psi2 = es.eigenvalues().cwiseAbs().maxCoeff();
  return o;
}

double obliqueness_from_hitting(const SpectralLaplacian& lap, const CommittorBundle& bundle) {
  const HittingTimes ht = hitting_times(lap);
  const Vector pi = lap.h.cwiseAbs2();
  double total = 0.0;
  for (int p = 0; p < bundle.I.size(); ++p) {
    const int i = bundle.I[p];
    total += (ht.H.col(i).cwiseProduct(pi)).dot(bundle.Ct.col(p));
  }
  return total;
}

Obliqueness killed_obliqueness(const SpectralLaplacian& lap, const IndexSet& I, double gamma) {
  const KilledOperators ko = killed(lap, gamma);
  const KilledCommittor kc = killed_committor(ko, lap.h, I);
  const Matrix lhat = sym(kc.C.transpose() * ko.L * kc.C);
  const Matrix s = sym_inv_sqrt(lhat);
  const Eigen::Index r = lhat.rows();
  Obliqueness o;
  o.Psi_asym = sym(s * (Matrix::Identity(r, r) - kc.C.transpose() * kc.C) * s);
  const MatrixNorms nn = sym_norms(o.Psi_asym);
  o.psi2 = nn.spectral;
  o.psi_nuc = nn.nuclear;
  return o;
}

bool bound_holds(double actual, double bound, double slack, double floor) {
  return std::isfinite(actual) && actual <= bound * (1.0 + slack) + floor;
}

BoundReport error_curves(const SpectralLaplacian& lap, const CommittorBundle& bundle,
                         const InducedChain& ic, const std::vector<double>& t_grid,
                         const ErrorCurveOptions& opts) {
  BoundReport rep;
  rep.I = bundle.I;
  rep.eps = nystrom_errors(lap, lap.h, bundle.I);
  rep.psi = obliqueness(lap, lap.h, bundle.I);
  const int n = lap.n();
  const int r = bundle.I.size();
  const double c1 = kProjectiveConstant;
  const double c2 = kObliqueConstant;
  const double floor2 = 64.0 * kEps;
  const double floor_nuc = 64.0 * kEps * n;
  const double ceil_nuc_sp_alt = 2.0 * std::min(n, 2 * r + 1);

  const ProjectiveBasis basis = projective_basis(lap, bundle);
  const SymEig eig_hat = sym_eig(ic.L_hat);
  rep.structured_norms = n > opts.dense_limit;

  Matrix uv, uc;
  if (rep.structured_norms) {
    const Matrix& U = lap.eigenvectors;
    uv = U.transpose() * basis.V;
    uc = U.transpose() * bundle.C;
  }

  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "bound grid needs t > 0");
    BoundRow row;
    row.t = t;
    const Matrix expA = sym_apply(basis.eigA, [t](double x) { return std::exp(-x * t); });
    const Matrix expLh = sym_apply(eig_hat, [t](double x) { return std::exp(-x * t); });
    // P^sp − P_I lives in range(V): compare in the r×r coordinates.
    const Matrix vc = basis.V.transpose() * bundle.C;
    const MatrixNorms d_sp_proj = sym_norms(sym(vc * expLh * vc.transpose() - expA));

    MatrixNorms d_proj, d_sp;
    if (rep.structured_norms) {
      const Eigen::Index m = n - 1;
      const Vector mu = (-lap.eigenvalues.tail(m).array() * t).exp();
      const Matrix g1 = (uv * expm_half(basis.eigA, t)).bottomRows(m);
      const Matrix g2 = (uc * expm_half(eig_hat, t)).bottomRows(m);
      d_proj = diag_minus_lowrank_norms(mu, g1);
      d_sp = diag_minus_lowrank_norms(mu, g2);
    } else {
      const Matrix P = propagator(lap, t);
      const Matrix PI = sym(basis.V * expA * basis.V.transpose());
      const Matrix Psp = sym(bundle.C * expLh * bundle.C.transpose());
      d_proj = sym_norms(P - PI);
      d_sp = sym_norms(P - Psp);
    }
    row.err2_proj = d_proj.spectral;
    row.errnuc_proj = d_proj.nuclear;
    row.err2_sp = d_sp.spectral;
    row.errnuc_sp = d_sp.nuclear;
    row.err2_sp_proj = d_sp_proj.spectral;
    row.errnuc_sp_proj = d_sp_proj.nuclear;

    row.bound2_proj = c1 * rep.eps.eps2 / t;
    row.boundnuc_proj = c1 * rep.eps.eps_nuc / t;
    row.bound2_sp_proj = c2 * rep.psi.psi2 / t;
    row.boundnuc_sp_proj = c2 * rep.psi.psi_nuc / t;
    row.bound2_sp = (c1 * rep.eps.eps2 + c2 * rep.psi.psi2) / t;
    row.boundnuc_sp = (c1 * rep.eps.eps_nuc + c2 * rep.psi.psi_nuc) / t;
    row.boundnuc_sp_alt = (c1 + r * c2) * rep.eps.eps_nuc / t;

    row.vacuous2_proj = row.bound2_proj > 2.0;
    row.vacuousnuc_proj = row.boundnuc_proj > 2.0 * n;
    row.vacuous2_sp_proj = row.bound2_sp_proj > 2.0;
    row.vacuousnuc_sp_proj = row.boundnuc_sp_proj > 2.0 * n;
    row.vacuous2_sp = row.bound2_sp > 2.0;
    row.vacuousnuc_sp = row.boundnuc_sp > 2.0 * n;
    row.vacuousnuc_sp_alt = row.boundnuc_sp_alt > ceil_nuc_sp_alt;

    const double sl = opts.relative_slack;
    const bool ok[] = {
        bound_holds(row.err2_proj, row.bound2_proj, sl, floor2),
        bound_holds(row.errnuc_proj, row.boundnuc_proj, sl, floor_nuc),
        bound_holds(row.err2_sp_proj, row.bound2_sp_proj, sl, floor2),
        bound_holds(row.errnuc_sp_proj, row.boundnuc_sp_proj, sl, floor_nuc),
        bound_holds(row.err2_sp, row.bound2_sp, sl, floor2),
        bound_holds(row.errnuc_sp, row.boundnuc_sp, sl, floor_nuc),
        bound_holds(row.errnuc_sp, row.boundnuc_sp_alt, sl, floor_nuc),
    };
    for (bool b : ok)
      if (!b) {
        row.all_hold = false;
        ++rep.violations;
      }
    auto ratio = [](double a, double b) { return b > 0.0 ? a / b : (a > 0.0 ? std::numeric_limits<double>::infinity() : 0.0); };
    rep.max_ratio_proj_2 = std::max(rep.max_ratio_proj_2, ratio(row.err2_proj, row.bound2_proj));
    rep.max_ratio_proj_nuc = std::max(rep.max_ratio_proj_nuc, ratio(row.errnuc_proj, row.boundnuc_proj));
    rep.max_ratio_sp_proj_2 = std::max(rep.max_ratio_sp_proj_2, ratio(row.err2_sp_proj, row.bound2_sp_proj));
    rep.max_ratio_sp_proj_nuc = std::max(rep.max_ratio_sp_proj_nuc, ratio(row.errnuc_sp_proj, row.boundnuc_sp_proj));
    rep.max_ratio_sp_2 = std::max(rep.max_ratio_sp_2, ratio(row.err2_sp, row.bound2_sp));
    rep.max_ratio_sp_nuc = std::max(rep.max_ratio_sp_nuc, ratio(row.errnuc_sp, row.boundnuc_sp));
    rep.max_ratio_sp_alt = std::max(rep.max_ratio_sp_alt, ratio(row.errnuc_sp, row.boundnuc_sp_alt));
    rep.rows.push_back(row);
  }
  return rep;
}

double default_gamma(const SpectralLaplacian& lap) { return 1.0 / (10.0 * lap.trace_K()); }

IntegratedOccupation integrated_occupation_check(const SpectralLaplacian& lap, const IndexSet& I, double gamma) {
  const KilledOperators ko = killed(lap, gamma);
  const auto& idx = I.indices();
  const Matrix kcol = columns(ko.K, idx);
  const Matrix kii = submatrix(ko.K, idx, idx);
  auto llt = spd_factor(kii, ErrorKind::SingularPrincipalBlock, "(K_γ)_II is not positive definite");
  const Matrix nys = sym(kcol * llt.solve(kcol.transpose()));
  const double scale = max_abs(nys);

  const KilledCommittor kc = killed_committor(ko, lap.h, I);
  const Matrix lhat = sym(kc.C.transpose() * ko.L * kc.C);
  const Matrix sp = kc.C * lhat.llt().solve(kc.C.transpose());
  auto proj = [&](const Matrix& V) {
    const Matrix a = sym(V.transpose() * ko.L * V);
    return Matrix(V * a.llt().solve(V.transpose()));
  };
  IntegratedOccupation out;
  out.residual_sp = max_abs(sp - nys) / scale;
  out.residual_proj = max_abs(proj(orth_symmetric(kc.C)) - nys) / scale;
  out.residual_proj_qr = max_abs(proj(orth_qr(kc.C)) - nys) / scale;
  return out;
}

double autocorrelation(const Vector& pi, const Matrix& Ptilde, const Vector& f) {
  return f.dot(pi.asDiagonal() * (Ptilde * f));
}

Matrix autocorrelation(const Vector& pi, const Matrix& Ptilde, const Matrix& F) {
  return F.transpose() * pi.asDiagonal() * Ptilde * F;
}

AutocorrelationCheck autocorrelation_check(const Vector& h, const Matrix& P, const Matrix& Q,
                                           int samples, std::uint64_t seed) {
  AutocorrelationCheck out;
  const Matrix d = sym(P - Q);
  out.spectral_norm = sym_norms(d).spectral;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Vector pi = h.cwiseAbs2();
  const Matrix pt = unsymmetrize(P, h);
  const Matrix qt = unsymmetrize(Q, h);
  for (int k = 0; k < samples; ++k) {
    Vector f(h.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = normal(rng);
    f /= std::sqrt(f.dot(pi.asDiagonal() * f));
    const double gap = std::abs(autocorrelation(pi, pt, f) - autocorrelation(pi, qt, f));
    out.max_gap = std::max(out.max_gap, gap);
    if (gap > out.spectral_norm * (1.0 + 1e-10) + 64.0 * kEps) ++out.violations;
  }
  return out;
}

}  // namespace mcc
