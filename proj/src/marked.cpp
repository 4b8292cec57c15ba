#include "mcc/marked.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace mcc {

int MarkedChain::index_of(int mark, int position) const {
  const int p = I.position(mark);
  if (p < 0 || position < 0 || position >= n) return -1;
  return lookup_[static_cast<size_t>(p) * static_cast<size_t>(n) + static_cast<size_t>(position)];
}

double MarkedChain::stationarity_residual() const {
  Vector flux = R.transpose() * pi;
  double scale = 0.0;
  for (int i = 0; i < R.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(R, i); it; ++it) scale = std::max(scale, std::abs(pi(i) * it.value()));
  return flux.cwiseAbs().maxCoeff() / scale;
}

Matrix MarkedChain::dense_laplacian() const {
  Matrix r = Matrix(R);
  return -(h.asDiagonal() * r * h.cwiseInverse().asDiagonal());
}

MarkedChain build_marked(const ReversibleChain& chain, const CommittorBundle& bundle) {
  const IndexSet& I = bundle.I;
  const int n = chain.n;
  const int r = I.size();
  const std::vector<int> comp = I.complement();
  MarkedChain mc;
  mc.I = I;
  mc.n = n;

  // Unpruned enumeration.
  std::vector<int> full_lookup(static_cast<size_t>(r) * static_cast<size_t>(n), -1);
  auto slot = [&](int mark_pos, int position) -> int& {
    return full_lookup[static_cast<size_t>(mark_pos) * static_cast<size_t>(n) + static_cast<size_t>(position)];
  };
  for (int p = 0; p < r; ++p) {
    slot(p, I[p]) = static_cast<int>(mc.unpruned_states.size());
    mc.unpruned_states.push_back({I[p], I[p]});
  }
  for (int p = 0; p < r; ++p)
    for (int k : comp) {
      slot(p, k) = static_cast<int>(mc.unpruned_states.size());
      mc.unpruned_states.push_back({I[p], k});
    }
  const int mu = static_cast<int>(mc.unpruned_states.size());

  // A jump x -> y from (a, x) lands on (y, y) if y ∈ I and on (a, y) otherwise.
  std::vector<Triplet> trip;
  for (int s = 0; s < mu; ++s) {
    const MarkedState st = mc.unpruned_states[static_cast<size_t>(s)];
    const int a = I.position(st.mark);
    for (SparseMatrix::InnerIterator it(chain.R, st.position); it; ++it) {
      const int y = static_cast<int>(it.col());
      int target;
      if (y == st.position)
        target = s;
      else if (I.contains(y))
        target = slot(I.position(y), y);
      else
        target = slot(a, y);
      trip.emplace_back(s, target, it.value());
    }
  }
  mc.R_unpruned.resize(mu, mu);
  mc.R_unpruned.setFromTriplets(trip.begin(), trip.end());
  mc.R_unpruned.makeCompressed();

  // Reachability from marked states.
  std::vector<char> seen(static_cast<size_t>(mu), 0);
  std::queue<int> q;
  for (int p = 0; p < r; ++p) {
    seen[static_cast<size_t>(p)] = 1;
    q.push(p);
  }
  while (!q.empty()) {
    const int s = q.front();
    q.pop();
    for (SparseMatrix::InnerIterator it(mc.R_unpruned, s); it; ++it)
      if (it.value() > 0.0 && !seen[static_cast<size_t>(it.col())]) {
        seen[static_cast<size_t>(it.col())] = 1;
        q.push(static_cast<int>(it.col()));
      }
  }

  std::vector<int> keep_index(static_cast<size_t>(mu), -1);
  for (int s = 0; s < mu; ++s) {
    if (seen[static_cast<size_t>(s)]) {
      keep_index[static_cast<size_t>(s)] = static_cast<int>(mc.states.size());
      mc.states.push_back(mc.unpruned_states[static_cast<size_t>(s)]);
    } else {
      mc.pruned.push_back(mc.unpruned_states[static_cast<size_t>(s)]);
    }
  }
  mc.lookup_.assign(full_lookup.size(), -1);
  for (size_t k = 0; k < full_lookup.size(); ++k)
    if (full_lookup[k] >= 0) mc.lookup_[k] = keep_index[static_cast<size_t>(full_lookup[k])];

  const int m = mc.m();
  std::vector<Triplet> kept;
  for (int s = 0; s < mu; ++s) {
    const int a = keep_index[static_cast<size_t>(s)];
    if (a < 0) continue;
    for (SparseMatrix::InnerIterator it(mc.R_unpruned, s); it; ++it) {
      const int b = keep_index[static_cast<size_t>(it.col())];
      // Kept states only lead to kept states, so nothing is lost here.
      if (b >= 0) kept.emplace_back(a, b, it.value());
    }
  }
  mc.R.resize(m, m);
  mc.R.setFromTriplets(kept.begin(), kept.end());
  mc.R.makeCompressed();

  mc.pi.resize(m);
  for (int s = 0; s < m; ++s) {
    const MarkedState st = mc.states[static_cast<size_t>(s)];
    if (st.is_marked())
      mc.pi(s) = chain.pi(st.position);
    else
      mc.pi(s) = bundle.Ct(st.position, I.position(st.mark)) * chain.pi(st.position);
  }
  mc.h = mc.pi.cwiseSqrt();
  mc.chain_h = chain.h;
  return mc;
}

Vector marked_stationary_solve(const MarkedChain& mc) {
  const int m = mc.m();
  Matrix a = Matrix(mc.R).transpose();
  a.row(m - 1).setOnes();
  Vector b = Vector::Zero(m);
  b(m - 1) = 1.0;
  return a.partialPivLu().solve(b);
}

MarkedProjections projections(const MarkedChain& mc, const CommittorBundle& bundle,
                              const std::optional<KilledCommittor>& killed) {
  const int m = mc.m();
  const int r = mc.I.size();
  MarkedProjections p;
  p.Wt = Matrix::Zero(m, r);
  p.Qt = Matrix::Zero(m, mc.n);
  for (int s = 0; s < m; ++s) {
    const MarkedState st = mc.states[static_cast<size_t>(s)];
    p.Wt(s, mc.I.position(st.mark)) = 1.0;
    p.Qt(s, st.position) = 1.0;
  }
  const Vector& hchain = mc.chain_h;
  p.W = mc.h.asDiagonal() * p.Wt * bundle.h_hat.cwiseInverse().asDiagonal();
  p.Q = mc.h.asDiagonal() * p.Qt * hchain.cwiseInverse().asDiagonal();

  if (killed) {
    p.has_killed = true;
    p.gamma = killed->gamma;
    p.pi_gamma.resize(m);
    for (int s = 0; s < m; ++s) {
      const MarkedState st = mc.states[static_cast<size_t>(s)];
      const double pos_pi = hchain(st.position) * hchain(st.position);
      p.pi_gamma(s) = st.is_marked() ? pos_pi : killed->Ct(st.position, mc.I.position(st.mark)) * pos_pi;
    }
    p.h_gamma = p.pi_gamma.cwiseSqrt();
    p.W_gamma = p.h_gamma.asDiagonal() * p.Wt * killed->h_hat.cwiseInverse().asDiagonal();
    p.Q_gamma = p.h_gamma.asDiagonal() * p.Qt * hchain.cwiseInverse().asDiagonal();
    Matrix rg = Matrix(mc.R);
    rg.diagonal().array() -= killed->gamma;
    p.L_gamma = -(p.h_gamma.asDiagonal() * rg * p.h_gamma.cwiseInverse().asDiagonal());
  }
  return p;
}

CheckReport identity_suite(const MarkedChain& mc, const MarkedProjections& proj,
                           const SpectralLaplacian& lap, const CommittorBundle& bundle,
                           const InducedChain& ic, const std::optional<KilledOperators>& killed_ops,
                           const std::optional<KilledCommittor>& killed_bundle, double tol) {
  CheckReport rep;
  const int r = mc.I.size();
  const Matrix Lm = mc.dense_laplacian();
  const Matrix& Q = proj.Q;
  const Matrix& W = proj.W;
  const double lscale = std::max(1.0, max_abs(lap.L));
  rep.add("QtQ = I", max_abs(Q.transpose() * Q - Matrix::Identity(mc.n, mc.n)), tol);
  rep.add("WtW = I", max_abs(W.transpose() * W - Matrix::Identity(r, r)), tol);
  rep.add("QtW = C", max_abs(Q.transpose() * W - bundle.C), tol);
  rep.add("QtLQ = L", max_abs(Q.transpose() * Lm * Q - lap.L) / lscale, tol, "relative to max|L|");
  rep.add("LQ = QL", max_abs(Lm * Q - Q * lap.L) / lscale, tol, "relative to max|L|");
  rep.add("WtLW = L_hat", max_abs(W.transpose() * Lm * W - ic.L_hat) / lscale, tol, "relative to max|L|");
  rep.add("Qt^T pi = pi", max_abs(proj.Qt.transpose() * mc.pi - lap.h.cwiseAbs2()), tol);
  rep.add("Wt^T pi = pi_hat", max_abs(proj.Wt.transpose() * mc.pi - bundle.pi_hat), tol);
  rep.add("stationarity", mc.stationarity_residual(), tol, "pi_ring^T R_ring relative to largest flux");
  rep.add("rows sum to one (Qt)", max_abs(proj.Qt * Vector::Ones(mc.n) - Vector::Ones(mc.m())), 0.0);
  rep.add("rows sum to one (Wt)", max_abs(proj.Wt * Vector::Ones(r) - Vector::Ones(mc.m())), 0.0);

  if (proj.has_killed && killed_ops && killed_bundle) {
    const Matrix& Wg = proj.W_gamma;
    rep.add("WgtWg = I", max_abs(Wg.transpose() * Wg - Matrix::Identity(r, r)), tol);
    const double qnorm = std::sqrt(std::max(0.0, sym_eigenvalues(proj.Q_gamma.transpose() * proj.Q_gamma).maxCoeff()));
    rep.add("||Q_gamma||_2 = 1", std::abs(qnorm - 1.0), tol);
    rep.add("QgtWg = C_gamma", max_abs(proj.Q_gamma.transpose() * Wg - killed_bundle->C), tol);
    const Matrix lhat_g = killed_bundle->C.transpose() * killed_ops->L * killed_bundle->C;
    rep.add("WgtLgWg = CgtLgCg", max_abs(Wg.transpose() * proj.L_gamma * Wg - lhat_g) / lscale, tol,
            "relative to max|L|");
  }
  return rep;
}

SpectrumComparison marked_spectrum(const MarkedChain& mc, const ReversibleChain& chain) {
  SpectrumComparison out;
  const Matrix R = Matrix(mc.R_unpruned);
  Eigen::EigenSolver<Matrix> es(R, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  out.marked = ev.real();
  std::sort(out.marked.data(), out.marked.data() + out.marked.size());
  out.max_imag = ev.size() ? ev.imag().cwiseAbs().maxCoeff() : 0.0;

  // σ(R) = −σ(L) and σ(R_ĪĪ) = −σ(L_ĪĪ); the symmetric forms are exact-real.
  const SpectralLaplacian lap = symmetrize(chain);
  std::vector<double> expected;
  for (Eigen::Index i = 0; i < lap.eigenvalues.size(); ++i) expected.push_back(-lap.eigenvalues(i));
  const std::vector<int> comp = mc.I.complement();
  if (!comp.empty()) {
    const Vector sub = sym_eigenvalues(submatrix(lap.L, comp, comp));
    for (int rep = 0; rep < mc.I.size() - 1; ++rep)
      for (Eigen::Index i = 0; i < sub.size(); ++i) expected.push_back(-sub(i));
  }
  std::sort(expected.begin(), expected.end());
  out.expected = Eigen::Map<Vector>(expected.data(), static_cast<Eigen::Index>(expected.size()));
  if (out.expected.size() == out.marked.size())
    out.max_deviation = (out.expected - out.marked).cwiseAbs().maxCoeff();
  else
    out.max_deviation = std::numeric_limits<double>::infinity();
  out.pruning_changed_spectrum = !mc.pruned.empty();
  return out;
}

AlphaLimitTable alpha_limit_check(const MarkedChain& mc, const MarkedProjections& proj,
                                  const SpectralLaplacian& lap, const CommittorBundle& bundle,
                                  const InducedChain& ic, const std::vector<double>& t_grid,
                                  const std::vector<double>& alpha_grid) {
  AlphaLimitTable table;
  const Matrix Lm = mc.dense_laplacian();
  const int m = mc.m();
  const Matrix offW = Matrix::Identity(m, m) - proj.W * proj.W.transpose();
  for (double t : t_grid) {
    const Matrix base = proj.Q.transpose() * expm(-Lm * t) * proj.Q;
    table.unperturbed_residual = std::max(table.unperturbed_residual, max_abs(base - propagator(lap, t)));
    const Matrix psp = bundle.C * sym_expm_neg(ic.L_hat, t) * bundle.C.transpose();
    for (double alpha : alpha_grid) {
      const double a = t > 0.0 ? std::min(alpha, 1e6 / t) : alpha;
      const Matrix x = proj.Q.transpose() * expm(-(Lm + a * offW) * t) * proj.Q;
      table.rows.push_back({t, a, norms(x - psp).spectral});
    }
  }
  return table;
}

}  // namespace mcc
