#pragma once

#include "mcc/common.hpp"
#include "mcc/linalg.hpp"

#include <optional>

namespace mcc {

/// One off-diagonal transition rate `from -> to`.
struct RateEntry {
  int from = 0;
  int to = 0;
  double rate = 0.0;
};

/// Reversible continuous-time chain. R is stored sparse with its diagonal.
struct ReversibleChain {
  int n = 0;
  SparseMatrix R;
  Vector pi;
  Vector h;

  Matrix dense_rates() const { return Matrix(R); }
};

/// Assembles R from off-diagonal rates (duplicates summed) and validates
/// connectivity and detailed balance. Without `stationary`, π is recovered
/// from ratios of forward/backward rates along a spanning tree.
ReversibleChain build_chain(int n, const std::vector<RateEntry>& rates,
                            const std::optional<Vector>& stationary = std::nullopt);

/// Random walk on an undirected graph with rate 1/deg(i) per incident edge.
ReversibleChain webgraph_chain(const SparseMatrix& adjacency);

/// Symmetrized generator with full spectral data.
struct SpectralLaplacian {
  Matrix L;
  Vector eigenvalues;   // ascending; eigenvalues(0) is the null eigenvalue, set to 0
  Matrix eigenvectors;  // column 0 is ±h with positive orientation
  Matrix K;             // pseudoinverse
  int null_rank = 0;
  Vector h;

  int n() const { return static_cast<int>(L.rows()); }
  double trace_K() const;
};

inline constexpr double kNullTolerance = 1e-10;

SpectralLaplacian symmetrize(const ReversibleChain& chain);
/// Same, starting from a symmetric L and its null vector h.
SpectralLaplacian symmetrize_laplacian(const Matrix& L, const Vector& h);

/// e^{-Lt} = U e^{-Λt} Uᵀ.
Matrix propagator(const SpectralLaplacian& lap, double t);

/// Diag⁻¹(h) P Diag(h).
Matrix unsymmetrize(const Matrix& p, const Vector& h);

struct KilledOperators {
  double gamma = 0.0;
  Matrix L;
  Matrix K;
};

KilledOperators killed(const SpectralLaplacian& lap, double gamma);
/// e^{-γt} e^{-Lt}.
Matrix killed_propagator(const SpectralLaplacian& lap, double gamma, double t);

std::vector<double> log_grid(double lo, double hi, int points);
/// 64 log-spaced points over [1e-2, 1e3] × Tr K / n.
std::vector<double> default_time_grid(const SpectralLaplacian& lap, int points = 64);

/// Max |R 1| and max |π_i R_ij − π_j R_ji| relative to the largest flux.
struct ChainResiduals {
  double row_sum = 0.0;
  double detailed_balance = 0.0;
  double stationarity = 0.0;
};
ChainResiduals chain_residuals(const ReversibleChain& chain);

}  // namespace mcc
