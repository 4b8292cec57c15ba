#include "mcc/select.hpp"

#include "mcc/compress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcc {

namespace {

// (L_ĪĪ)⁻¹ embedded at full size, zero on the rows and columns of I.
Matrix embedded_schur_inverse(const SpectralLaplacian& lap, const std::vector<char>& chosen) {
  const int n = lap.n();
  std::vector<int> comp;
  for (int i = 0; i < n; ++i)
    if (!chosen[static_cast<size_t>(i)]) comp.push_back(i);
  Matrix M = Matrix::Zero(n, n);
  if (comp.empty()) return M;
  const Matrix lcc = submatrix(lap.L, comp, comp);
  auto llt = spd_factor(lcc, ErrorKind::SingularComplementBlock, "L_ĪĪ is not positive definite");
  const Matrix inv = llt.solve(Matrix::Identity(lcc.rows(), lcc.cols()));
  for (size_t b = 0; b < comp.size(); ++b)
    for (size_t a = 0; a < comp.size(); ++a)
      M(comp[a], comp[b]) = inv(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return 0.5 * (M + M.transpose());
}

double compact_lambda_max(const Matrix& M, const std::vector<char>& chosen) {
  std::vector<int> comp;
  for (int i = 0; i < static_cast<int>(chosen.size()); ++i)
    if (!chosen[static_cast<size_t>(i)]) comp.push_back(i);
  if (comp.empty()) return 0.0;
  return largest_eigenvalue_psd(submatrix(M, comp, comp));
}

// Lowest index among the candidates whose value is within `tol` (relative) of the best.
int argmax_lowest(const Vector& v, const std::vector<char>& allowed, double tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (allowed[static_cast<size_t>(i)]) best = std::max(best, v(i));
  const double cut = best - tol * std::max(1.0, std::abs(best));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (allowed[static_cast<size_t>(i)] && v(i) >= cut) return static_cast<int>(i);
  return -1;
}

}  // namespace

Vector first_index_scores(const SpectralLaplacian& lap) {
  const Vector pi = lap.h.cwiseAbs2();
  const double tr = lap.trace_K();
  return -(tr + lap.K.diagonal().cwiseQuotient(pi).array()).matrix();
}

Vector k_spectrum_desc(const SpectralLaplacian& lap) {
  const Eigen::Index m = lap.eigenvalues.size() - 1;
  Vector out(m);
  // eigenvalues ascending with index 0 null: 1/λ is descending from index 1.
  for (Eigen::Index i = 0; i < m; ++i) out(i) = 1.0 / lap.eigenvalues(i + 1);
  return out;
}

SelectionTrace greedy_select(const SpectralLaplacian& lap, int k, const SelectOptions& opts) {
  const int n = lap.n();
  if (k < 1 || k >= n) throw Error(ErrorKind::KTooLarge, "k must satisfy 1 <= k < n");
  SelectionTrace tr;
  std::vector<char> chosen(static_cast<size_t>(n), 0);
  std::vector<char> allowed(static_cast<size_t>(n), 1);
  const Vector kspec = k_spectrum_desc(lap);
  auto tail_bound = [&](int size) {
    const Eigen::Index skip = std::min<Eigen::Index>(size + 1, kspec.size());
    return kspec.tail(kspec.size() - skip).sum();
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  const Vector first = first_index_scores(lap);
  const int i0 = argmax_lowest(first, allowed, opts.tie_tolerance);
  chosen[static_cast<size_t>(i0)] = 1;
  allowed[static_cast<size_t>(i0)] = 0;
  tr.ordered.push_back(i0);
  tr.scores.push_back(first(i0));

  Matrix M = embedded_schur_inverse(lap, chosen);
  double eps = M.trace();
  tr.eps_nuc.push_back(eps);
  tr.eps_nuc_fresh.push_back(eps);
  tr.spectral_lower_bound.push_back(tail_bound(1));
  if (opts.track_eps2) tr.eps2.push_back(compact_lambda_max(M, chosen));

  for (int step = 2; step <= k; ++step) {
    const Vector diag = M.diagonal();
    const Vector colsq = M.colwise().squaredNorm().transpose();
    Vector v = Vector::Constant(n, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i)
      if (allowed[static_cast<size_t>(i)]) v(i) = colsq(i) / diag(i);
    const int pick = argmax_lowest(v, allowed, opts.tie_tolerance);
    chosen[static_cast<size_t>(pick)] = 1;
    allowed[static_cast<size_t>(pick)] = 0;
    tr.ordered.push_back(pick);
    tr.scores.push_back(v(pick));

    const Vector m = M.col(pick);
    M.noalias() -= m * (m.transpose() / diag(pick));
    M.row(pick).setZero();
    M.col(pick).setZero();
    if (opts.refactor_every > 0 && step % opts.refactor_every == 0) {
      M = embedded_schur_inverse(lap, chosen);
      tr.eps_nuc_fresh.push_back(M.trace());
    } else {
      tr.eps_nuc_fresh.push_back(nan);
    }
    eps = M.trace();
    tr.eps_nuc.push_back(eps);
    tr.spectral_lower_bound.push_back(tail_bound(step));
    if (opts.track_eps2) tr.eps2.push_back(compact_lambda_max(M, chosen));
  }
  return tr;
}

BruteForceResult brute_force_optimal(const SpectralLaplacian& lap, int s) {
  const int n = lap.n();
  if (s < 1 || s > kBruteForceMaxSize || n > kBruteForceMaxStates)
    throw Error(ErrorKind::TooLargeForBruteForce,
                "exhaustive search is limited to s <= 4 and n <= 16");
  if (s >= n) throw Error(ErrorKind::KTooLarge, "subset size must be below n");
  BruteForceResult best;
  best.eps_nuc = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<size_t>(s));
  for (int i = 0; i < s; ++i) idx[static_cast<size_t>(i)] = i;
  while (true) {
    const double e = schur_trace(lap, IndexSet(idx, n));
    if (e < best.eps_nuc) {
      best.eps_nuc = e;
      best.subset = idx;
    }
    int p = s - 1;
    while (p >= 0 && idx[static_cast<size_t>(p)] == n - s + p) --p;
    if (p < 0) break;
    ++idx[static_cast<size_t>(p)];
    for (int q = p + 1; q < s; ++q) idx[static_cast<size_t>(q)] = idx[static_cast<size_t>(q - 1)] + 1;
  }
  return best;
}

double trace_guarantee_margin(double eps_greedy_k, double eps_opt_s, double trace_k, int k, int s) {
  if (k < 1 || s < 1) throw Error(ErrorKind::InvalidArgument, "k and s must be positive");
  return (eps_greedy_k - eps_opt_s) / trace_k - 2.0 * std::exp(-static_cast<double>(k - 1) / s);
}

double spectral_guarantee_slack(double eps_greedy_k, const Vector& kdesc, int k, int s, int r) {
  if (!(r >= 0 && r < s && s <= k)) throw Error(ErrorKind::InvalidRSK, "need 0 <= r < s <= k");
  const double tr = kdesc.sum();
  const double top = kdesc.head(std::min<Eigen::Index>(r, kdesc.size())).sum();
  const double bound = 2.0 * tr * std::exp(-static_cast<double>(k - 1) / s) +
                       static_cast<double>(s + 1) / static_cast<double>(s - r) * (tr - top);
  return bound - eps_greedy_k;
}

}  // namespace mcc
