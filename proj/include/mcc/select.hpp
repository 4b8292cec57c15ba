#pragma once

#include "mcc/chain.hpp"

namespace mcc {

/// Output of greedy nuclear maximization.
struct SelectionTrace {
  std::vector<int> ordered;         // chosen states in selection order
  std::vector<double> eps_nuc;      // ε*(I_k), k = 1..K
  std::vector<double> scores;       // chosen score; step 1 records −ε*({i})
  std::vector<double> spectral_lower_bound;  // Σ of K's eigenvalues beyond the top k+1
  std::vector<double> eps2;         // ε₂(I_k) = λ_max((L_ĪĪ)⁻¹), when tracked
  std::vector<double> eps_nuc_fresh;  // from-scratch Tr[(L_ĪĪ)⁻¹] at refactorization steps (NaN otherwise)
};

struct SelectOptions {
  int refactor_every = 25;
  bool track_eps2 = false;
  /// Scores within this relative distance of the best count as ties; the
  /// lowest index wins.
  double tie_tolerance = 1e-12;
};

SelectionTrace greedy_select(const SpectralLaplacian& lap, int k, const SelectOptions& opts = {});

/// −ε*({i}) = −(Tr K + K_ii/π_i) for every state.
Vector first_index_scores(const SpectralLaplacian& lap);

struct BruteForceResult {
  std::vector<int> subset;
  double eps_nuc = 0.0;
};

inline constexpr int kBruteForceMaxSize = 4;
inline constexpr int kBruteForceMaxStates = 16;

BruteForceResult brute_force_optimal(const SpectralLaplacian& lap, int s);

/// (ε*(I_k) − ε*(O_s))/Tr K − 2e^{−(k−1)/s}; nonpositive when the guarantee holds.
double trace_guarantee_margin(double eps_greedy_k, double eps_opt_s, double trace_k, int k, int s);

/// 2 Tr K e^{−(k−1)/s} + (s+1)/(s−r)(Tr K − Tr^{(r)} K) − ε*(I_k); nonnegative
/// when the guarantee holds. Requires r < s ≤ k.
double spectral_guarantee_slack(double eps_greedy_k, const Vector& k_eigenvalues_desc, int k, int s, int r);

/// Nonzero eigenvalues of K in descending order.
Vector k_spectrum_desc(const SpectralLaplacian& lap);

}  // namespace mcc
