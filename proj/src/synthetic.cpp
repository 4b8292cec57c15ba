#include "mcc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace mcc {

namespace {

ReversibleChain unit_graph_walk(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<RateEntry> rates;
  for (auto [a, b] : edges) {
    rates.push_back({a, b, 1.0});
    rates.push_back({b, a, 1.0});
  }
  return build_chain(n, rates);
}

SparseMatrix adjacency_of(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<Triplet> t;
  for (auto [a, b] : edges) {
    t.emplace_back(a, b, 1.0);
    t.emplace_back(b, a, 1.0);
  }
  SparseMatrix adj(n, n);
  adj.setFromTriplets(t.begin(), t.end());
  return adj;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), salt};
  return std::mt19937_64(seq);
}

}  // namespace

ReversibleChain fixture_k3() { return unit_graph_walk(3, {{0, 1}, {0, 2}, {1, 2}}); }

ReversibleChain fixture_p2() {
  Vector pi(2);
  pi << 2.0 / 3.0, 1.0 / 3.0;
  return build_chain(2, {{0, 1, 1.0}, {1, 0, 2.0}}, pi);
}

ReversibleChain fixture_path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return webgraph_chain(adjacency_of(n, e));
}

ReversibleChain fixture_star(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) e.emplace_back(0, i);
  return webgraph_chain(adjacency_of(n, e));
}

ReversibleChain random_chain(int n, std::uint64_t seed, const RandomChainOptions& opts) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "random_chain needs n >= 2");
  auto rng = make_rng(seed, 0x5eed);
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::set<std::pair<int, int>> edges;
  auto add = [&](int a, int b) {
    if (a == b) return;
    edges.emplace(std::min(a, b), std::max(a, b));
  };
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    add(perm[static_cast<size_t>(k)], perm[static_cast<size_t>(pick(rng))]);
  }
  const long extra = std::lround(opts.extra_edge_factor * n);
  std::uniform_int_distribution<int> any(0, n - 1);
  for (long e = 0; e < extra; ++e) add(any(rng), any(rng));

  std::uniform_real_distribution<double> wdist(-opts.log_weight_spread, opts.log_weight_spread);
  std::uniform_real_distribution<double> pdist(-opts.log_pi_spread, opts.log_pi_spread);
  Vector pi(n);
  for (int i = 0; i < n; ++i) pi(i) = std::exp(pdist(rng));
  pi /= pi.sum();

  std::vector<RateEntry> rates;
  for (auto [a, b] : edges) {
    const double w = std::exp(wdist(rng));
    rates.push_back({a, b, w / pi(a)});
    rates.push_back({b, a, w / pi(b)});
  }
  return build_chain(n, rates, pi);
}

SparseMatrix synthetic_webgraph(int n, int m, std::uint64_t seed) {
  if (m < 1 || n <= m) throw Error(ErrorKind::InvalidArgument, "synthetic_webgraph needs 1 <= m < n");
  auto rng = make_rng(seed, 0xbabe);
  std::set<std::pair<int, int>> edges;
  std::vector<int> ends;  // every edge endpoint, for degree-proportional picks
  for (int a = 0; a <= m; ++a)
    for (int b = a + 1; b <= m; ++b) {
      edges.emplace(a, b);
      ends.push_back(a);
      ends.push_back(b);
    }
  for (int v = m + 1; v < n; ++v) {
    std::set<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      std::uniform_int_distribution<size_t> pick(0, ends.size() - 1);
      targets.insert(ends[pick(rng)]);
    }
    for (int t : targets) {
      edges.emplace(t, v);
      ends.push_back(t);
      ends.push_back(v);
    }
  }
  std::vector<Triplet> trip;
  for (auto [a, b] : edges) {
    trip.emplace_back(a, b, 1.0);
    trip.emplace_back(b, a, 1.0);
  }
  SparseMatrix adj(n, n);
  adj.setFromTriplets(trip.begin(), trip.end());
  return adj;
}

IndexSet random_subset(int n, int r, std::uint64_t seed) {
  if (r < 1 || r > n) throw Error(ErrorKind::InvalidArgument, "subset size out of range");
  auto rng = make_rng(seed, 0x1de);
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(static_cast<size_t>(r));
  return IndexSet(perm, n);
}

}  // namespace mcc
