#include "mcc/select.hpp"
#include "mcc/compress.hpp"
#include "test_util.hpp"

#include <random>
#include <set>

using namespace mcc;

namespace {

// Direct Tr[(L_ĪĪ)⁻¹] via an LU inverse.
double scratch_eps(const SpectralLaplacian& lap, const std::vector<int>& chosen) {
  const IndexSet I(chosen, lap.n());
  const auto comp = I.complement();
  if (comp.empty()) return 0.0;
  return submatrix(lap.L, comp, comp).partialPivLu().inverse().trace();
}

}  // namespace

TEST(Select, Fixtures) {
  const auto k3 = symmetrize(fixture_k3());
  const auto tr = greedy_select(k3, 1);
  ASSERT_EQ(tr.ordered.size(), 1u);
  EXPECT_EQ(tr.ordered[0], 0);
  EXPECT_NEAR(tr.eps_nuc[0], 4.0 / 3.0, 1e-12);
  const Vector s = first_index_scores(k3);
  EXPECT_NEAR(s(0), s(1), 1e-13);
  EXPECT_NEAR(s(1), s(2), 1e-13);

  const auto p2 = symmetrize(fixture_p2());
  EXPECT_EQ(greedy_select(p2, 1).ordered[0], 0);
  const Vector sp = first_index_scores(p2);
  EXPECT_GT(sp(0), sp(1));
  EXPECT_NEAR(sp(0), -0.5, 1e-12);

  const auto star = symmetrize(fixture_star(5));
  const Vector ss = first_index_scores(star);
  for (int i = 1; i < 5; ++i) EXPECT_GT(ss(0), ss(i));

  EXPECT_THROW(greedy_select(k3, 3), Error);
  EXPECT_THROW(greedy_select(k3, 0), Error);
}

TEST(Select, BruteForce) {
  const auto k3 = symmetrize(fixture_k3());
  EXPECT_NEAR(brute_force_optimal(k3, 1).eps_nuc, 4.0 / 3.0, 1e-12);
  const auto p2 = symmetrize(fixture_p2());
  EXPECT_EQ(brute_force_optimal(p2, 1).subset, std::vector<int>{0});
  EXPECT_THROW(brute_force_optimal(k3, 5), Error);
  EXPECT_THROW(brute_force_optimal(symmetrize(random_chain(20, 1)), 2), Error);
}

TEST(Select, TheoremChecksOnFixtures) {
  const auto k3 = symmetrize(fixture_k3());
  const auto tr = greedy_select(k3, 2);
  const double opt1 = brute_force_optimal(k3, 1).eps_nuc;
  EXPECT_LE(trace_guarantee_margin(tr.eps_nuc[1], opt1, k3.trace_K(), 2, 1), 0.0);
  EXPECT_LE(trace_guarantee_margin(tr.eps_nuc[0], opt1, k3.trace_K(), 1, 1), 0.0);
  const Vector kd = k_spectrum_desc(k3);
  EXPECT_GE(spectral_guarantee_slack(tr.eps_nuc[1], kd, 2, 2, 1), 0.0);
  EXPECT_THROW(spectral_guarantee_slack(tr.eps_nuc[1], kd, 2, 3, 1), Error);
  EXPECT_THROW(spectral_guarantee_slack(tr.eps_nuc[1], kd, 2, 1, 1), Error);
  // r = 0: second term alone is (s+1)/s Tr K.
  EXPECT_GE(spectral_guarantee_slack(tr.eps_nuc[1], kd, 2, 1, 0), (2.0) * k3.trace_K() - tr.eps_nuc[1] - 1e-12);
}

class SelectProperties : public ::testing::TestWithParam<int> {};

TEST_P(SelectProperties, GreedyMatchesScratch) {
  const std::uint64_t seed = 900 + static_cast<std::uint64_t>(GetParam());
  const int n = mcc::testing::random_size(seed, 6, 40);
  const auto lap = symmetrize(random_chain(n, seed));
  const int k = std::min(n - 1, 12);
  SelectOptions opts;
  opts.refactor_every = 5;
  opts.track_eps2 = true;
  const auto tr = greedy_select(lap, k, opts);
  ASSERT_EQ(static_cast<int>(tr.ordered.size()), k);
  std::set<int> uniq(tr.ordered.begin(), tr.ordered.end());
  EXPECT_EQ(static_cast<int>(uniq.size()), k);
  std::vector<int> chosen;
  for (int j = 0; j < k; ++j) {
    chosen.push_back(tr.ordered[static_cast<size_t>(j)]);
    const double fresh = scratch_eps(lap, chosen);
    EXPECT_NEAR(tr.eps_nuc[static_cast<size_t>(j)], fresh, 1e-9 * fresh);
    if (j > 0) {
      EXPECT_LT(tr.eps_nuc[static_cast<size_t>(j)], tr.eps_nuc[static_cast<size_t>(j) - 1]);
      EXPECT_NEAR(tr.scores[static_cast<size_t>(j)],
                  tr.eps_nuc[static_cast<size_t>(j) - 1] - tr.eps_nuc[static_cast<size_t>(j)],
                  1e-8 * tr.eps_nuc[static_cast<size_t>(j) - 1]);
      // The choice is a true argmax over all candidates.
      double best = -1.0;
      std::vector<int> prev(chosen.begin(), chosen.end() - 1);
      for (int i = 0; i < n; ++i) {
        if (std::find(prev.begin(), prev.end(), i) != prev.end()) continue;
        auto trial = prev;
        trial.push_back(i);
        best = std::max(best, tr.eps_nuc[static_cast<size_t>(j) - 1] - scratch_eps(lap, trial));
      }
      EXPECT_NEAR(tr.scores[static_cast<size_t>(j)], best, 1e-8 * tr.eps_nuc[static_cast<size_t>(j) - 1]);
    }
    EXPECT_GE(tr.eps_nuc[static_cast<size_t>(j)], tr.spectral_lower_bound[static_cast<size_t>(j)] * (1.0 - 1e-12));
    const auto ne = nystrom_errors(lap, lap.h, IndexSet(chosen, n));
    EXPECT_NEAR(tr.eps2[static_cast<size_t>(j)], ne.eps2, 1e-8 * ne.eps2);
  }
  // First step is the argmin of ε*({i}).
  const Vector s = first_index_scores(lap);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(-s(i), scratch_eps(lap, {i}), 1e-9 * -s(i));
  Eigen::Index arg;
  s.maxCoeff(&arg);
  EXPECT_NEAR(s(tr.ordered[0]), s(arg), 1e-12 * std::abs(s(arg)));
}

INSTANTIATE_TEST_SUITE_P(Seeds, SelectProperties, ::testing::Range(0, 20));

class SelectGuarantees : public ::testing::TestWithParam<int> {};

TEST_P(SelectGuarantees, Theorem4AAnd4B) {
  const std::uint64_t seed = 1100 + static_cast<std::uint64_t>(GetParam());
  const int n = mcc::testing::random_size(seed, 6, 14);
  const auto lap = symmetrize(random_chain(n, seed));
  const int kmax = std::min(5, n - 1);
  const auto tr = greedy_select(lap, kmax);
  for (int s = 1; s <= 3; ++s) {
    const double opt = brute_force_optimal(lap, s).eps_nuc;
    for (int k = 1; k <= kmax; ++k)
      EXPECT_LE(trace_guarantee_margin(tr.eps_nuc[static_cast<size_t>(k) - 1], opt, lap.trace_K(), k, s), 0.0)
          << "k=" << k << " s=" << s;
    if (s <= kmax) EXPECT_GE(tr.eps_nuc[static_cast<size_t>(s) - 1], opt * (1.0 - 1e-12));
  }
  const Vector kd = k_spectrum_desc(lap);
  for (int k = 1; k <= kmax; ++k)
    for (int s = 1; s <= k; ++s)
      for (int r = 0; r < s; ++r) EXPECT_GE(spectral_guarantee_slack(tr.eps_nuc[static_cast<size_t>(k) - 1], kd, k, s, r), 0.0);
}

INSTANTIATE_TEST_SUITE_P(Seeds, SelectGuarantees, ::testing::Range(0, 20));
