#pragma once

#include "mcc/chain.hpp"

namespace mcc {

/// Committor probabilities onto I and the stationary quantities they induce.
struct CommittorBundle {
  IndexSet I;
  Matrix Ct;      // C̃, n×|I|, row i = hitting distribution on I from i
  Matrix C;       // Diag(h) C̃ Diag⁻¹(ĥ)
  Vector pi_hat;  // C̃ᵀπ
  Vector h_hat;
  double omega = 0.0;  // mean marking time from a stationary start
  /// 2-norm condition number of K_II (NaN for I = [n]). Reported only.
  double k_condition = 0.0;
};

/// Closed form in terms of K = L⁺.
CommittorBundle committor_closed_form(const SpectralLaplacian& lap, const IndexSet& I);

/// Oracle: solves R_ĪĪ X = −R_ĪI and stacks identity rows on I.
Matrix committor_absorbing_solve(const ReversibleChain& chain, const IndexSet& I);

struct KilledCommittor {
  double gamma = 0.0;
  Matrix Ct;
  Matrix C;
  Vector pi_hat;
  Vector h_hat;
};

KilledCommittor killed_committor(const KilledOperators& killed, const Vector& h, const IndexSet& I);

/// Oracle for the killed committor: (R_ĪĪ − γ) X = −R_ĪI.
Matrix killed_committor_absorbing_solve(const ReversibleChain& chain, const IndexSet& I, double gamma);

/// Mean first passage times, H(j, i) = E[time to reach i | start at j].
struct HittingTimes {
  Matrix H;
  Matrix S;  // Diag⁻¹(h) K Diag⁻¹(h)
};

HittingTimes hitting_times(const SpectralLaplacian& lap);

/// E[τ_I] from X_0 ~ π; 0 when I = [n].
double mean_marking_time(const SpectralLaplacian& lap, const Vector& h, const IndexSet& I);

/// Expected time to reach I from each state, by solving −R_ĪĪ m = 1.
Vector time_to_set_absorbing(const ReversibleChain& chain, const IndexSet& I);

}  // namespace mcc
