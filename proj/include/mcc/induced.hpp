#pragma once

#include "mcc/committor.hpp"

#include <cstdint>

namespace mcc {

/// Reversible chain on I obtained by watching the original chain only at I.
struct InducedChain {
  IndexSet I;
  Matrix R_hat;
  Vector pi_hat;
  Vector h_hat;
  Matrix L_hat;
  Matrix K_hat;
  double omega = 0.0;

  /// −Diag(π̂) R̂.
  Matrix delta_hat() const { return -(pi_hat.asDiagonal() * R_hat); }
};

/// R̂ = C̃♯ R C̃ with C̃♯ = Diag⁻¹(π̂) C̃ᵀ Diag(π).
InducedChain induced_chain(const ReversibleChain& chain, const CommittorBundle& bundle);

/// Same object assembled from K = L⁺ alone.
InducedChain induced_from_k(const SpectralLaplacian& lap, const Vector& h, const IndexSet& I);

/// Exit-time, exit-distribution and stationary-weight characterizations of R̂
/// against absorbing-solve oracles. With `mc_samples > 0` the first two are
/// also estimated by simulation and accepted within 3 standard errors.
CheckReport interpretation_checks(const ReversibleChain& chain, const InducedChain& ic,
                                  int mc_samples = 0, std::uint64_t seed = 1);

/// max |Ĥ_ij − H_ij| over i, j ∈ I.
double hitting_preservation(const SpectralLaplacian& lap, const InducedChain& ic);

/// ‖(1/t) sym(C̃ᵀ Diag(π)(I − P̃(t)) C̃) − Δ̂‖_max.
double flow_limit_check(const SpectralLaplacian& lap, const CommittorBundle& bundle,
                        const InducedChain& ic, double t);

}  // namespace mcc
