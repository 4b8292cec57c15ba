#include "mcc/induced.hpp"

#include "mcc/simulate.hpp"

#include <cmath>
#include <string>

namespace mcc {

namespace {

void finish_from_rates(InducedChain& ic) {
  const Vector& hh = ic.h_hat;
  Matrix L = -(hh.asDiagonal() * ic.R_hat * hh.cwiseInverse().asDiagonal());
  ic.L_hat = 0.5 * (L + L.transpose());
  ic.K_hat = symmetrize_laplacian(ic.L_hat, hh).K;
}

}  // namespace

InducedChain induced_chain(const ReversibleChain& chain, const CommittorBundle& bundle) {
  InducedChain ic;
  ic.I = bundle.I;
  ic.pi_hat = bundle.pi_hat;
  ic.h_hat = bundle.h_hat;
  ic.omega = bundle.omega;
  const Matrix rc = chain.R * bundle.Ct;
  const Matrix sharp =
      ic.pi_hat.cwiseInverse().asDiagonal() * bundle.Ct.transpose() * chain.pi.asDiagonal();
  ic.R_hat = sharp * rc;
  finish_from_rates(ic);
  return ic;
}

InducedChain induced_from_k(const SpectralLaplacian& lap, const Vector& h, const IndexSet& I) {
  if (I.empty()) throw Error(ErrorKind::InvalidArgument, "index set must be nonempty");
  InducedChain ic;
  ic.I = I;
  if (I.is_full()) {
    ic.pi_hat = h.cwiseAbs2();
    ic.h_hat = h;
    ic.omega = 0.0;
    ic.L_hat = lap.L;
    ic.K_hat = lap.K;
    ic.R_hat = -(h.cwiseInverse().asDiagonal() * lap.L * h.asDiagonal());
    return ic;
  }
  const auto& idx = I.indices();
  const Matrix kii = submatrix(lap.K, idx, idx);
  auto llt = spd_factor(kii, ErrorKind::SingularPrincipalBlock, "K_II is not positive definite");
  const Eigen::Index r = kii.rows();
  const Matrix A = llt.solve(Matrix::Identity(r, r));
  const Vector hI = subvector(h, idx);
  const Vector a = A * hI;
  const double s = hI.dot(a);
  ic.omega = 1.0 / s;
  ic.pi_hat = ic.omega * hI.cwiseProduct(a);
  ic.h_hat = ic.pi_hat.cwiseSqrt();
  ic.R_hat = s * Vector::Ones(r) * ic.pi_hat.transpose() -
             hI.cwiseQuotient(ic.pi_hat).asDiagonal() * A * hI.asDiagonal();
  const Vector q = hI.cwiseQuotient(ic.h_hat);
  Matrix L = q.asDiagonal() * A * q.asDiagonal() - s * ic.h_hat * ic.h_hat.transpose();
  ic.L_hat = 0.5 * (L + L.transpose());
  const Vector qi = q.cwiseInverse();
  Matrix K = qi.asDiagonal() * kii * qi.asDiagonal() - ic.omega * ic.h_hat * ic.h_hat.transpose();
  ic.K_hat = 0.5 * (K + K.transpose());
  return ic;
}

CheckReport interpretation_checks(const ReversibleChain& chain, const InducedChain& ic,
                                  int mc_samples, std::uint64_t seed) {
  CheckReport rep;
  const auto& idx = ic.I.indices();
  const int r = ic.I.size();

  const Matrix ct = committor_absorbing_solve(chain, ic.I);
  const Vector pi_hat = ct.transpose() * chain.pi;
  rep.add("stationary_weight", (pi_hat - ic.pi_hat).cwiseAbs().maxCoeff(), 1e-8,
          "pi_hat_i = P(first state hit in I is i) under a stationary start");
  if (r < 2) return rep;

  double exit_err = 0.0;
  double jump_err = 0.0;
  for (int p = 0; p < r; ++p) {
    const int i = idx[static_cast<size_t>(p)];
    std::vector<int> rest;
    for (int q = 0; q < r; ++q)
      if (q != p) rest.push_back(idx[static_cast<size_t>(q)]);
    const IndexSet J(rest, chain.n);
    const double rii = ic.R_hat(p, p);
    const double mean_exit = time_to_set_absorbing(chain, J)(i);
    exit_err = std::max(exit_err, std::abs(-1.0 / rii - mean_exit) / mean_exit);
    const Matrix cj = committor_absorbing_solve(chain, J);
    for (int q = 0; q < r; ++q) {
      if (q == p) continue;
      const int j = idx[static_cast<size_t>(q)];
      const double target = cj(i, J.position(j));
      jump_err = std::max(jump_err, std::abs(-ic.R_hat(p, q) / rii - target));
    }

    if (mc_samples > 0) {
      const Estimator et = estimate_time_to_set(chain, J, i, mc_samples, seed + static_cast<std::uint64_t>(p));
      rep.add("mc_exit_time[" + std::to_string(i) + "]", std::abs(et.mean - (-1.0 / rii)),
              3.0 * et.stderr_, "Monte-Carlo, 3 standard errors");
      const std::vector<Estimator> ed =
          estimate_exit_distribution(chain, J, i, mc_samples, seed + 7919u + static_cast<std::uint64_t>(p));
      for (int q = 0; q < r; ++q) {
        if (q == p) continue;
        const int j = idx[static_cast<size_t>(q)];
        const Estimator& e = ed[static_cast<size_t>(J.position(j))];
        const double target = -ic.R_hat(p, q) / rii;
        // A zero-variance estimate must match exactly up to rounding.
        const double tol = std::max(3.0 * e.stderr_, 1e-12);
        rep.add("mc_exit_dist[" + std::to_string(i) + "->" + std::to_string(j) + "]",
                std::abs(e.mean - target), tol, "Monte-Carlo, 3 standard errors");
      }
    }
  }
  rep.add("mean_exit_time", exit_err, 1e-8, "-1/R_hat_ii = E[time to I minus i | start i], relative");
  rep.add("exit_distribution", jump_err, 1e-8, "-R_hat_ij/R_hat_ii = P(exit I minus i at j | start i)");
  return rep;
}

double hitting_preservation(const SpectralLaplacian& lap, const InducedChain& ic) {
  const HittingTimes full = hitting_times(lap);
  const Vector hinv = ic.h_hat.cwiseInverse();
  const Matrix S = hinv.asDiagonal() * ic.K_hat * hinv.asDiagonal();
  const Eigen::Index r = S.rows();
  Matrix H = Vector::Ones(r) * S.diagonal().transpose() - S;
  H.diagonal().setZero();
  const auto& idx = ic.I.indices();
  return max_abs(H - submatrix(full.H, idx, idx));
}

double flow_limit_check(const SpectralLaplacian& lap, const CommittorBundle& bundle,
                        const InducedChain& ic, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "flow check needs t > 0");
  const Matrix g = lap.eigenvectors.transpose() * (lap.h.asDiagonal() * bundle.Ct);
  const Vector w = (-lap.eigenvalues.array() * t).unaryExpr([](double x) { return -std::expm1(x); }) / t;
  Matrix e = g.transpose() * w.asDiagonal() * g;
  e = (0.5 * (e + e.transpose())).eval();
  return max_abs(e - ic.delta_hat());
}

}  // namespace mcc
