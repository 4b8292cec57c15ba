#pragma once

#include "mcc/induced.hpp"

#include <cstdint>

namespace mcc {

/// 3√3/(2π) and 2/π.
inline constexpr double kProjectiveConstant = 0.8269933431326881;
inline constexpr double kObliqueConstant = 0.6366197723675814;

/// Orthonormal basis of range(C) together with the compressed generator VᵀLV.
struct ProjectiveBasis {
  Matrix V;
  Matrix A;  // VᵀLV
  SymEig eigA;
};

/// V = C (CᵀC)^{-1/2} by default, or Householder QR.
ProjectiveBasis projective_basis(const SpectralLaplacian& lap, const CommittorBundle& bundle,
                                 bool use_qr = false);

/// P_I(t) = V e^{−(VᵀLV)t} Vᵀ.
Matrix projective_compression(const SpectralLaplacian& lap, const CommittorBundle& bundle, double t);
Matrix projective_compression(const ProjectiveBasis& basis, double t);

struct GeneralizedProjective {
  Matrix P;
  double nu2 = 0.0;
  double nu_nuc = 0.0;
};

/// Compression onto an arbitrary orthonormal V whose range contains h.
GeneralizedProjective generalized_projective(const SpectralLaplacian& lap, const Matrix& V, double t);

struct StructurePreserving {
  Matrix P;   // C e^{−L̂t} Cᵀ
  Matrix Pt;  // Diag⁻¹(h) P Diag(h)
};

StructurePreserving structure_preserving(const Vector& h, const CommittorBundle& bundle,
                                         const InducedChain& ic, double t);

struct NystromErrors {
  double eps2 = 0.0;
  double eps_nuc = 0.0;
  double eps_nuc_schur = 0.0;
  double eps2_schur = 0.0;  // 1/λ_min(L_ĪĪ)
};

NystromErrors nystrom_errors(const SpectralLaplacian& lap, const Vector& h, const IndexSet& I);

/// ε*(I) = Tr[(L_ĪĪ)⁻¹]; 0 for I = [n].
double schur_trace(const SpectralLaplacian& lap, const IndexSet& I);

struct Obliqueness {
  double psi2 = 0.0;
  double psi_nuc = 0.0;
  Matrix Psi_asym;
};

Obliqueness obliqueness(const SpectralLaplacian& lap, const Vector& h, const IndexSet& I);
/// Tr[H_{:,I}ᵀ Diag(π) C̃].
double obliqueness_from_hitting(const SpectralLaplacian& lap, const CommittorBundle& bundle);
/// Norms of L̂_γ^{-1/2}(I − C_γᵀC_γ)L̂_γ^{-1/2} at finite γ.
Obliqueness killed_obliqueness(const SpectralLaplacian& lap, const IndexSet& I, double gamma);

struct BoundRow {
  double t = 0.0;
  double err2_proj = 0.0, errnuc_proj = 0.0;        // ‖P − P_I‖
  double err2_sp = 0.0, errnuc_sp = 0.0;            // ‖P − P^sp‖
  double err2_sp_proj = 0.0, errnuc_sp_proj = 0.0;  // ‖P^sp − P_I‖
  double bound2_proj = 0.0, boundnuc_proj = 0.0;
  double bound2_sp_proj = 0.0, boundnuc_sp_proj = 0.0;
  double bound2_sp = 0.0, boundnuc_sp = 0.0;
  double boundnuc_sp_alt = 0.0;
  bool vacuous2_proj = false, vacuousnuc_proj = false;
  bool vacuous2_sp_proj = false, vacuousnuc_sp_proj = false;
  bool vacuous2_sp = false, vacuousnuc_sp = false;
  bool vacuousnuc_sp_alt = false;
  bool all_hold = true;
};

struct BoundReport {
  IndexSet I;
  NystromErrors eps;
  Obliqueness psi;
  std::vector<BoundRow> rows;
  /// Largest actual/bound ratio per inequality, over all grid points.
  double max_ratio_proj_2 = 0.0, max_ratio_proj_nuc = 0.0;
  double max_ratio_sp_proj_2 = 0.0, max_ratio_sp_proj_nuc = 0.0;
  double max_ratio_sp_2 = 0.0, max_ratio_sp_nuc = 0.0;
  double max_ratio_sp_alt = 0.0;
  int violations = 0;
  bool structured_norms = false;

  bool all_hold() const { return violations == 0; }
};

struct ErrorCurveOptions {
  double relative_slack = 1e-8;
  /// Above this n the differences are normed through the eigenbasis of L
  /// (diagonal minus low rank) instead of dense eigensolves.
  int dense_limit = 600;
};

BoundReport error_curves(const SpectralLaplacian& lap, const CommittorBundle& bundle,
                         const InducedChain& ic, const std::vector<double>& t_grid,
                         const ErrorCurveOptions& opts = {});

/// actual ≤ bound·(1 + slack) + floor, with floor the rounding level of the
/// computed difference norm.
bool bound_holds(double actual, double bound, double slack, double floor);

struct IntegratedOccupation {
  double residual_sp = 0.0;
  double residual_proj = 0.0;
  double residual_proj_qr = 0.0;
};

/// Compares ∫P^sp_{I,γ}, ∫P_{I,γ} with the Nyström approximation of K_γ
/// (relative max-entry residuals).
IntegratedOccupation integrated_occupation_check(const SpectralLaplacian& lap, const IndexSet& I,
                                                 double gamma);

/// Default killing rate 1/(10 Tr K).
double default_gamma(const SpectralLaplacian& lap);

/// fᵀ Diag(π) P̃ f for one observable.
double autocorrelation(const Vector& pi, const Matrix& Ptilde, const Vector& f);
/// Fᵀ Diag(π) P̃ F for a block of observables.
Matrix autocorrelation(const Vector& pi, const Matrix& Ptilde, const Matrix& F);

struct AutocorrelationCheck {
  double max_gap = 0.0;        // sup over sampled f of |A_t(f, P̃) − A_t(f, Q̃)|
  double spectral_norm = 0.0;  // ‖P − Q‖₂
  int violations = 0;          // samples with gap > norm (1 + 1e-10)
};

/// Samples unit π-norm observables and compares autocorrelations of two
/// symmetrized propagators P and Q.
AutocorrelationCheck autocorrelation_check(const Vector& h, const Matrix& P, const Matrix& Q,
                                           int samples, std::uint64_t seed);

}  // namespace mcc
