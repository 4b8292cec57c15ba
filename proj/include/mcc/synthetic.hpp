#pragma once

#include "mcc/chain.hpp"

#include <cstdint>

namespace mcc {

/// Complete graph on 3 states with unit rates.
ReversibleChain fixture_k3();
/// Two states, R = [[-1, 1], [2, -2]].
ReversibleChain fixture_p2();
/// Graph walk (rate 1/deg per edge) on a path of n states; π ∝ degree.
ReversibleChain fixture_path(int n);
/// Graph walk on a star; state 0 is the hub.
ReversibleChain fixture_star(int n);

struct RandomChainOptions {
  double extra_edge_factor = 1.0;  // extra edges ≈ factor · n on top of a spanning tree
  double log_weight_spread = 2.0;  // symmetric edge weights e^{U(-s, s)}
  double log_pi_spread = 1.0;      // unnormalized π_i = e^{U(-s, s)}
};

/// Random connected reversible chain: R_ij = w_ij / π_i with symmetric w.
ReversibleChain random_chain(int n, std::uint64_t seed, const RandomChainOptions& opts = {});

/// Preferential-attachment graph: each new vertex links to `m` existing ones.
SparseMatrix synthetic_webgraph(int n, int m, std::uint64_t seed);

/// Uniformly random subset of size r (sorted).
IndexSet random_subset(int n, int r, std::uint64_t seed);

}  // namespace mcc
