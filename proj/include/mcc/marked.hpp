#pragma once

#include "mcc/induced.hpp"

#include <optional>

namespace mcc {

/// Augmented state: current position and the last state of I visited.
struct MarkedState {
  int mark = 0;
  int position = 0;

  bool is_marked() const { return mark == position; }
  bool operator==(const MarkedState&) const = default;
};

/// Chain on (mark, position) pairs. Marked states (i, i) come first in I
/// order, followed by (i, k) for k ∉ I ordered by (mark, position).
/// States unreachable from any marked state are pruned.
struct MarkedChain {
  IndexSet I;
  int n = 0;
  std::vector<MarkedState> states;
  std::vector<MarkedState> pruned;
  SparseMatrix R;  // R̊ over the kept states
  Vector pi;       // π̊
  Vector h;        // h̊
  Vector chain_h;  // h of the original chain
  /// Full augmented generator including pruned states, same ordering as
  /// `unpruned_states`.
  SparseMatrix R_unpruned;
  std::vector<MarkedState> unpruned_states;

  int m() const { return static_cast<int>(states.size()); }
  /// Index of (mark, position) among kept states, or -1.
  int index_of(int mark, int position) const;
  /// ‖π̊ᵀR̊‖_∞ relative to the largest flux.
  double stationarity_residual() const;
  Matrix dense_laplacian() const;  // L̊ = −Diag(h̊) R̊ Diag⁻¹(h̊)

  std::vector<int> lookup_;  // (mark position in I) * n + position -> kept index
};

MarkedChain build_marked(const ReversibleChain& chain, const CommittorBundle& bundle);

/// Independent dense solve for the stationary vector of R̊ (small m only).
Vector marked_stationary_solve(const MarkedChain& mc);

struct MarkedProjections {
  Matrix Wt;  // W̃, m×|I| marking indicator
  Matrix Qt;  // Q̃, m×n position indicator
  Matrix W;
  Matrix Q;

  bool has_killed = false;
  double gamma = 0.0;
  Vector pi_gamma;  // π̊_γ
  Vector h_gamma;
  Matrix W_gamma;
  Matrix Q_gamma;
  Matrix L_gamma;  // L̊_γ = −Diag(h̊_γ)(R̊ − γ)Diag⁻¹(h̊_γ)
};

MarkedProjections projections(const MarkedChain& mc, const CommittorBundle& bundle,
                              const std::optional<KilledCommittor>& killed = std::nullopt);

/// Projection identities linking the marked chain with the original and
/// induced chains. Killed identities are added when `proj` carries them,
/// `killed_ops` supplying L_γ.
CheckReport identity_suite(const MarkedChain& mc, const MarkedProjections& proj,
                           const SpectralLaplacian& lap, const CommittorBundle& bundle,
                           const InducedChain& ic,
                           const std::optional<KilledOperators>& killed_ops = std::nullopt,
                           const std::optional<KilledCommittor>& killed_bundle = std::nullopt,
                           double tolerance = 1e-9);

struct SpectrumComparison {
  Vector marked;    // real parts, ascending
  Vector expected;  // σ(R) ∪ σ(R_ĪĪ)×(|I|−1), ascending
  double max_deviation = 0.0;
  double max_imag = 0.0;
  /// Set when states were pruned; the comparison is on the unpruned operator.
  bool pruning_changed_spectrum = false;
};

SpectrumComparison marked_spectrum(const MarkedChain& mc, const ReversibleChain& chain);

struct AlphaLimitRow {
  double t = 0.0;
  double alpha = 0.0;  // after capping α t ≤ 1e6
  double deviation = 0.0;  // ‖Qᵀ e^{−[L̊ + α(I − WWᵀ)]t} Q − P^sp(t)‖₂
};

struct AlphaLimitTable {
  std::vector<AlphaLimitRow> rows;
  /// max over t of ‖Qᵀ e^{−L̊t} Q − P(t)‖_max.
  double unperturbed_residual = 0.0;
};

AlphaLimitTable alpha_limit_check(const MarkedChain& mc, const MarkedProjections& proj,
                                  const SpectralLaplacian& lap, const CommittorBundle& bundle,
                                  const InducedChain& ic, const std::vector<double>& t_grid,
                                  const std::vector<double>& alpha_grid);

}  // namespace mcc
