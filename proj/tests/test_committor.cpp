#include "mcc/committor.hpp"
#include "test_util.hpp"

#include <random>

using namespace mcc;
using mcc::testing::max_abs_diff;

namespace {

// Expected hitting time of `target` from every state, by a direct linear solve.
Vector hitting_column(const ReversibleChain& c, int target) {
  std::vector<int> rest;
  for (int i = 0; i < c.n; ++i)
    if (i != target) rest.push_back(i);
  const Matrix R = c.dense_rates();
  const Matrix A = -submatrix(R, rest, rest);
  const Vector x = A.partialPivLu().solve(Vector::Ones(static_cast<Eigen::Index>(rest.size())));
  Vector out = Vector::Zero(c.n);
  for (size_t k = 0; k < rest.size(); ++k) out(rest[k]) = x(static_cast<Eigen::Index>(k));
  return out;
}

IndexSet random_set(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> sz(1, n - 1);
  return random_subset(n, sz(rng), rng());
}

}  // namespace

TEST(Committor, K3Pair) {
  const auto lap = symmetrize(fixture_k3());
  const auto b = committor_closed_form(lap, IndexSet({0, 1}, 3));
  Matrix expect(3, 2);
  expect << 1, 0, 0, 1, 0.5, 0.5;
  EXPECT_LT(max_abs_diff(b.Ct, expect), 1e-13);
  EXPECT_NEAR(b.pi_hat(0), 0.5, 1e-13);
  EXPECT_NEAR(b.pi_hat(1), 0.5, 1e-13);
  EXPECT_LT(max_abs_diff(committor_absorbing_solve(fixture_k3(), IndexSet({0, 1}, 3)), expect), 1e-14);
}

TEST(Committor, SingletonsAndFullSet) {
  const auto k3 = fixture_k3();
  const auto lap = symmetrize(k3);
  const auto b1 = committor_closed_form(lap, IndexSet({0}, 3));
  EXPECT_LT(max_abs_diff(b1.Ct, Matrix::Ones(3, 1)), 1e-13);
  EXPECT_NEAR(b1.omega, 2.0 / 3.0, 1e-13);
  EXPECT_NEAR(mean_marking_time(lap, lap.h, IndexSet({0}, 3)), 2.0 / 3.0, 1e-13);
  EXPECT_LT(max_abs_diff(committor_absorbing_solve(k3, IndexSet({0}, 3)), Matrix::Ones(3, 1)), 1e-14);

  const auto full = committor_closed_form(lap, IndexSet::all(3));
  EXPECT_LT(max_abs_diff(full.Ct, Matrix::Identity(3, 3)), 1e-15);
  EXPECT_LT(max_abs_diff(full.pi_hat, k3.pi), 1e-15);
  EXPECT_EQ(full.omega, 0.0);
  EXPECT_EQ(mean_marking_time(lap, lap.h, IndexSet::all(3)), 0.0);

  const auto p2 = fixture_p2();
  const auto lp = symmetrize(p2);
  const auto bp = committor_closed_form(lp, IndexSet({0}, 2));
  EXPECT_LT(max_abs_diff(bp.Ct, Matrix::Ones(2, 1)), 1e-13);
  EXPECT_NEAR(bp.pi_hat(0), 1.0, 1e-13);
  EXPECT_NEAR(bp.omega, 1.0 / 6.0, 1e-13);
  EXPECT_LT(max_abs_diff(committor_absorbing_solve(p2, IndexSet({1}, 2)), Matrix::Ones(2, 1)), 1e-14);
}

TEST(Committor, KilledP2) {
  const auto p2 = fixture_p2();
  const auto lap = symmetrize(p2);
  const IndexSet I({0}, 2);
  const auto kc = killed_committor(killed(lap, 1.0), lap.h, I);
  // From state 2: jump to 1 at rate 2 before being killed at rate 1.
  EXPECT_NEAR(kc.Ct(1, 0), 2.0 / 3.0, 1e-13);
  EXPECT_NEAR(kc.Ct(0, 0), 1.0, 1e-14);
  EXPECT_LT(max_abs_diff(killed_committor_absorbing_solve(p2, I, 1.0), kc.Ct), 1e-13);
  EXPECT_THROW(killed(lap, 0.0), Error);
}

TEST(Committor, KilledConvergesLinearly) {
  const auto chain = fixture_k3();
  const auto lap = symmetrize(chain);
  const IndexSet I({0, 1}, 3);
  const auto b = committor_closed_form(lap, I);
  double prev = 1.0;
  for (double g : {1e-1, 1e-2, 1e-3}) {
    const auto kc = killed_committor(killed(lap, g), lap.h, I);
    const double err = max_abs_diff(kc.Ct, b.Ct);
    EXPECT_LT(err, prev);
    EXPECT_LT(err, 2.0 * g);
    prev = err;
  }
}

TEST(HittingTimes, Fixtures) {
  const auto hk = hitting_times(symmetrize(fixture_k3()));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(hk.H(i, j), i == j ? 0.0 : 1.0, 1e-13);
  const auto hp = hitting_times(symmetrize(fixture_p2()));
  EXPECT_NEAR(hp.H(1, 0), 0.5, 1e-13);
  EXPECT_NEAR(hp.H(0, 1), 1.0, 1e-13);
  EXPECT_NEAR(hp.H(0, 0), 0.0, 1e-15);
}

class CommittorProperties : public ::testing::TestWithParam<int> {};

TEST_P(CommittorProperties, OraclesAndInvariants) {
  const std::uint64_t seed = 100 + static_cast<std::uint64_t>(GetParam());
  std::mt19937_64 rng(seed);
  const int n = mcc::testing::random_size(seed, 3, 40);
  const auto chain = random_chain(n, seed);
  const auto lap = symmetrize(chain);
  const IndexSet I = random_set(n, rng);
  const auto b = committor_closed_form(lap, I);
  const int r = I.size();

  EXPECT_LT(max_abs_diff(b.Ct, committor_absorbing_solve(chain, I)), 1e-9);
  EXPECT_GT(b.Ct.minCoeff(), -1e-12);
  EXPECT_LT(b.Ct.maxCoeff(), 1.0 + 1e-12);
  EXPECT_LT((b.Ct.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  for (int p = 0; p < r; ++p)
    for (int q = 0; q < r; ++q) EXPECT_EQ(b.Ct(I[p], q), p == q ? 1.0 : 0.0);
  EXPECT_NEAR(b.pi_hat.sum(), 1.0, 1e-12);
  EXPECT_GT(b.pi_hat.minCoeff(), 0.0);
  EXPECT_NEAR(norms(b.C).spectral, 1.0, 1e-10);
  EXPECT_LT((b.C.transpose() * lap.h - b.h_hat).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((b.C * b.h_hat - lap.h).cwiseAbs().maxCoeff(), 1e-12);

  // Harmonic on the complement: (Δ C̃)_{Ī,:} = 0 with Δ = −Diag(π)R.
  const Matrix delta = -(chain.pi.asDiagonal() * chain.dense_rates());
  const Matrix harm = delta * b.Ct;
  const auto comp = I.complement();
  if (!comp.empty()) {
    std::vector<int> cols(static_cast<size_t>(r));
    for (int p = 0; p < r; ++p) cols[static_cast<size_t>(p)] = p;
    EXPECT_LT(submatrix(harm, comp, cols).cwiseAbs().maxCoeff(), 1e-9 * max_abs(delta));
  }

  // ω against Σ π_k · E_k[τ_I] from a direct solve.
  const Matrix R = chain.dense_rates();
  const Vector tau = (-submatrix(R, comp, comp)).partialPivLu().solve(Vector::Ones(static_cast<Eigen::Index>(comp.size())));
  double omega = 0.0;
  for (size_t k = 0; k < comp.size(); ++k) omega += chain.pi(comp[k]) * tau(static_cast<Eigen::Index>(k));
  EXPECT_NEAR(b.omega, omega, 1e-9 * omega);
  EXPECT_NEAR(mean_marking_time(lap, lap.h, I), omega, 1e-9 * omega);
  const Vector tts = time_to_set_absorbing(chain, I);
  for (size_t k = 0; k < comp.size(); ++k) EXPECT_NEAR(tts(comp[k]), tau(static_cast<Eigen::Index>(k)), 1e-9 * tau.maxCoeff());

  // Hitting times against per-target solves.
  const auto ht = hitting_times(lap);
  for (int i = 0; i < std::min(n, 5); ++i) {
    const Vector col = hitting_column(chain, i);
    EXPECT_LT((ht.H.col(i) - col).cwiseAbs().maxCoeff(), 1e-8 * col.maxCoeff());
  }
  EXPECT_GT(ht.H.minCoeff(), -1e-9 * ht.H.maxCoeff());
  EXPECT_LT(ht.H.diagonal().cwiseAbs().maxCoeff(), 1e-12 * ht.H.maxCoeff());

  // Killed committor: oracle, substochastic, identity on I.
  const double g = 0.1 * lap.eigenvalues(1);
  const auto kc = killed_committor(killed(lap, g), lap.h, I);
  EXPECT_LT(max_abs_diff(kc.Ct, killed_committor_absorbing_solve(chain, I, g)), 1e-9);
  EXPECT_LT(kc.Ct.rowwise().sum().maxCoeff(), 1.0 + 1e-12);
  EXPECT_GT(kc.Ct.minCoeff(), -1e-12);
  for (int p = 0; p < r; ++p) EXPECT_NEAR(kc.Ct(I[p], p), 1.0, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Seeds, CommittorProperties, ::testing::Range(0, 50));
