#include "mcc/chain.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace mcc {

namespace {

constexpr double kBalanceTolerance = 1e-8;

// Undirected BFS over the support of the off-diagonal rates. Returns parent
// links (-1 for the root) and whether every state was reached.
bool bfs_tree(const SparseMatrix& r, std::vector<int>& order, std::vector<int>& parent) {
  const int n = static_cast<int>(r.rows());
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(r, i); it; ++it)
      if (it.col() != i && it.value() > 0.0) {
        adj[static_cast<size_t>(i)].push_back(static_cast<int>(it.col()));
        adj[static_cast<size_t>(it.col())].push_back(i);
      }
  parent.assign(static_cast<size_t>(n), -2);
  order.clear();
  std::queue<int> q;
  q.push(0);
  parent[0] = -1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    order.push_back(u);
    for (int v : adj[static_cast<size_t>(u)])
      if (parent[static_cast<size_t>(v)] == -2) {
        parent[static_cast<size_t>(v)] = u;
        q.push(v);
      }
  }
  return static_cast<int>(order.size()) == n;
}

}  // namespace

ReversibleChain build_chain(int n, const std::vector<RateEntry>& rates,
                            const std::optional<Vector>& stationary) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "a chain needs at least two states");
  std::vector<Triplet> trip;
  trip.reserve(rates.size() * 2);
  Vector exit = Vector::Zero(n);
  for (const auto& e : rates) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      throw Error(ErrorKind::InvalidArgument, "rate entry index out of range");
    if (e.from == e.to) throw Error(ErrorKind::InvalidArgument, "rate entries must be off-diagonal");
    if (!std::isfinite(e.rate)) throw Error(ErrorKind::NonFinite, "rate is not finite");
    if (e.rate < 0.0) throw Error(ErrorKind::InvalidArgument, "off-diagonal rates must be nonnegative");
    if (e.rate == 0.0) continue;
    trip.emplace_back(e.from, e.to, e.rate);
    exit(e.from) += e.rate;
  }
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, -exit(i));

  ReversibleChain c;
  c.n = n;
  c.R.resize(n, n);
  c.R.setFromTriplets(trip.begin(), trip.end());
  c.R.makeCompressed();

  std::vector<int> order, parent;
  if (!bfs_tree(c.R, order, parent))
    throw Error(ErrorKind::DisconnectedGraph, "the rate graph is not connected");

  if (stationary) {
    const Vector& p = *stationary;
    if (p.size() != n) throw Error(ErrorKind::ShapeMismatch, "stationary vector has wrong length");
    if (!p.allFinite() || (p.array() <= 0.0).any())
      throw Error(ErrorKind::NonPositiveStationary, "stationary vector must be entrywise positive");
    if (std::abs(p.sum() - 1.0) > 1e-10)
      throw Error(ErrorKind::InvalidArgument, "stationary vector must sum to one");
    c.pi = p;
  } else {
    // Detailed balance fixes π_v/π_u = R_uv/R_vu along any tree edge.
    Vector logp = Vector::Zero(n);
    for (int v : order) {
      const int u = parent[static_cast<size_t>(v)];
      if (u < 0) continue;
      const double fwd = c.R.coeff(u, v);
      const double bwd = c.R.coeff(v, u);
      if (!(fwd > 0.0) || !(bwd > 0.0))
        throw Error(ErrorKind::DetailedBalanceViolated, "one-way transition between states " +
                                                            std::to_string(u) + " and " +
                                                            std::to_string(v));
      logp(v) = logp(u) + std::log(fwd) - std::log(bwd);
    }
    const double m = logp.maxCoeff();
    Vector p = (logp.array() - m).exp();
    c.pi = p / p.sum();
    if ((c.pi.array() <= 0.0).any())
      throw Error(ErrorKind::NonPositiveStationary, "stationary probabilities underflowed");
  }
  c.h = c.pi.cwiseSqrt();

  const ChainResiduals res = chain_residuals(c);
  if (!(res.detailed_balance <= kBalanceTolerance))
    throw Error(ErrorKind::DetailedBalanceViolated,
                "relative detailed-balance residual " + std::to_string(res.detailed_balance));
  return c;
}

ChainResiduals chain_residuals(const ReversibleChain& c) {
  ChainResiduals out;
  double rmax = 0.0;
  Vector flux_in = Vector::Zero(c.n);
  for (int i = 0; i < c.n; ++i) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(c.R, i); it; ++it) {
      row += it.value();
      rmax = std::max(rmax, std::abs(it.value()));
      flux_in(it.col()) += c.pi(i) * it.value();
      if (it.col() == i) continue;
      const double f1 = c.pi(i) * it.value();
      const double f2 = c.pi(it.col()) * c.R.coeff(it.col(), i);
      const double denom = std::max(f1, f2);
      if (denom > 0.0) out.detailed_balance = std::max(out.detailed_balance, std::abs(f1 - f2) / denom);
    }
    out.row_sum = std::max(out.row_sum, std::abs(row));
  }
  if (rmax > 0.0) {
    out.row_sum /= rmax;
    out.stationarity = flux_in.cwiseAbs().maxCoeff() / (rmax * c.pi.maxCoeff());
  }
  return out;
}

ReversibleChain webgraph_chain(const SparseMatrix& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  if (adjacency.cols() != n) throw Error(ErrorKind::ShapeMismatch, "adjacency must be square");
  SparseMatrix at = adjacency.transpose();
  if ((SparseMatrix(adjacency - at)).norm() > 0.0)
    throw Error(ErrorKind::AsymmetricAdjacency, "adjacency matrix is not symmetric");
  Vector deg = Vector::Zero(n);
  std::vector<RateEntry> rates;
  for (int i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it) {
      if (it.value() == 0.0) continue;
      if (it.col() == i) throw Error(ErrorKind::InvalidArgument, "adjacency must have zero diagonal");
      if (it.value() < 0.0) throw Error(ErrorKind::InvalidArgument, "adjacency weights must be nonnegative");
      deg(i) += it.value();
    }
  for (int i = 0; i < n; ++i)
    if (deg(i) == 0.0) throw Error(ErrorKind::DisconnectedGraph, "isolated vertex " + std::to_string(i));
  for (int i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it)
      if (it.value() != 0.0)
        rates.push_back({i, static_cast<int>(it.col()), it.value() / deg(i)});
  Vector pi = deg / deg.sum();
  return build_chain(n, rates, pi);
}

double SpectralLaplacian::trace_K() const { return K.trace(); }

SpectralLaplacian symmetrize(const ReversibleChain& chain) {
  const int n = chain.n;
  Matrix L = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(chain.R, i); it; ++it)
      L(i, it.col()) = -chain.h(i) * it.value() / chain.h(it.col());
  const double asym = max_abs(L - L.transpose());
  if (!(asym <= 1e-8 * max_abs(L)))
    throw Error(ErrorKind::AsymmetryResidual,
                "symmetrized generator has asymmetry " + std::to_string(asym));
  Matrix Ls = 0.5 * (L + L.transpose());
  return symmetrize_laplacian(Ls, chain.h);
}

SpectralLaplacian symmetrize_laplacian(const Matrix& L, const Vector& h) {
  if (L.rows() != L.cols() || L.rows() != h.size())
    throw Error(ErrorKind::ShapeMismatch, "Laplacian and null vector sizes differ");
  SpectralLaplacian lap;
  lap.L = L;
  lap.h = h;
  SymEig e = sym_eig(L);
  const Eigen::Index n = L.rows();
  const double lmax = e.values(n - 1);
  const double cut = kNullTolerance * std::max(lmax, 0.0);
  // A single state has a zero generator; rounding in the induced 1×1 block is not rank.
  lap.null_rank = n == 1 ? 1 : static_cast<int>((e.values.array() <= cut).count());
  if (lap.null_rank != 1)
    throw Error(ErrorKind::NullSpaceRank,
                "expected one null eigenvalue, found " + std::to_string(lap.null_rank));
  if (e.vectors.col(0).dot(h) < 0.0) e.vectors.col(0) *= -1.0;
  if (std::abs(e.vectors.col(0).dot(h) - 1.0) > 1e-8)
    throw Error(ErrorKind::NullSpaceRank, "null eigenvector does not match h");
  e.values(0) = 0.0;
  lap.eigenvalues = e.values;
  lap.eigenvectors = std::move(e.vectors);
  const Matrix& U = lap.eigenvectors;
  Vector inv = Vector::Zero(n);
  for (Eigen::Index i = 1; i < n; ++i) inv(i) = 1.0 / lap.eigenvalues(i);
  lap.K = U * inv.asDiagonal() * U.transpose();
  lap.K = (0.5 * (lap.K + lap.K.transpose())).eval();
  return lap;
}

Matrix propagator(const SpectralLaplacian& lap, double t) {
  if (std::isnan(t)) throw Error(ErrorKind::NonFinite, "time is NaN");
  if (t < 0.0) throw Error(ErrorKind::NegativeTime, "propagator time must be nonnegative");
  const Vector d = (-lap.eigenvalues.array() * t).exp();
  Matrix p = lap.eigenvectors * d.asDiagonal() * lap.eigenvectors.transpose();
  return 0.5 * (p + p.transpose());
}

Matrix unsymmetrize(const Matrix& p, const Vector& h) {
  if (p.rows() != h.size() || p.cols() != h.size())
    throw Error(ErrorKind::ShapeMismatch, "unsymmetrize expects an n×n matrix and length-n h");
  return h.cwiseInverse().asDiagonal() * p * h.asDiagonal();
}

KilledOperators killed(const SpectralLaplacian& lap, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::NonPositiveGamma, "killing rate must be positive");
  KilledOperators k;
  k.gamma = gamma;
  const Eigen::Index n = lap.L.rows();
  k.L = lap.L + gamma * Matrix::Identity(n, n);
  const Vector inv = (lap.eigenvalues.array() + gamma).inverse();
  k.K = lap.eigenvectors * inv.asDiagonal() * lap.eigenvectors.transpose();
  k.K = (0.5 * (k.K + k.K.transpose())).eval();
  return k;
}

Matrix killed_propagator(const SpectralLaplacian& lap, double gamma, double t) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::NonPositiveGamma, "killing rate must be positive");
  return std::exp(-gamma * t) * propagator(lap, t);
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1)
    throw Error(ErrorKind::InvalidArgument, "log grid needs 0 < lo <= hi and points >= 1");
  std::vector<double> g(static_cast<size_t>(points));
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i)
    g[static_cast<size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
  return g;
}

std::vector<double> default_time_grid(const SpectralLaplacian& lap, int points) {
  const double scale = lap.trace_K() / lap.n();
  return log_grid(1e-2 * scale, 1e3 * scale, points);
}

}  // namespace mcc
