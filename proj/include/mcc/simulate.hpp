#pragma once

#include "mcc/marked.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

namespace mcc {

/// Piecewise-constant path: states[k] is occupied on [jump_times[k], jump_times[k+1]),
/// the last one until t_max. jump_times[0] = 0.
struct Trajectory {
  std::vector<double> jump_times;
  std::vector<int> states;
  double t_max = 0.0;

  /// State occupied at time t (0 <= t <= t_max).
  int state_at(double t) const;
};

struct Estimator {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

/// Mean and standard error (sample sd / √n) of a list of samples.
Estimator summarize(const std::vector<double>& samples, std::uint64_t seed);

/// Independent generator for trajectory `index` under `seed`.
std::mt19937_64 trajectory_stream(std::uint64_t seed, std::uint64_t index);

/// Thread count: MCC_THREADS if set, otherwise hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, count) on worker_count() threads. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
void parallel_for(long count, const std::function<void(long)>& body);

/// Gillespie sampler over a sparse generator (rows sum to zero).
class JumpProcess {
 public:
  explicit JumpProcess(const SparseMatrix& R);

  int n() const { return n_; }
  double exit_rate(int i) const { return exit_[static_cast<size_t>(i)]; }
  double holding_time(int i, std::mt19937_64& rng) const;
  int next_state(int i, std::mt19937_64& rng) const;
  /// Draws an index with probability proportional to `weights`.
  static int draw(const Vector& cumulative, std::mt19937_64& rng);

 private:
  int n_ = 0;
  std::vector<double> exit_;
  std::vector<long> offset_;
  std::vector<int> target_;
  std::vector<double> cum_;
};

/// Cumulative sums of a probability vector, for JumpProcess::draw.
Vector cumulative(const Vector& p);

/// Simulates one path; `x0` empty means a stationary start.
Trajectory sample_path(const ReversibleChain& chain, std::optional<int> x0, double t_max, std::uint64_t seed);

struct EstimatorMatrix {
  Matrix mean;
  Matrix stderr_;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

/// Row x: empirical distribution of the first state of I hit from x.
EstimatorMatrix estimate_committor(const ReversibleChain& chain, const IndexSet& I, long n_traj,
                                   std::uint64_t seed);

/// E[time to reach set J from `start`].
Estimator estimate_time_to_set(const ReversibleChain& chain, const IndexSet& J, int start, long n_traj,
                               std::uint64_t seed);

/// Distribution of the entry state into J from `start`, one estimator per state of J.
std::vector<Estimator> estimate_exit_distribution(const ReversibleChain& chain, const IndexSet& J, int start,
                                                  long n_traj, std::uint64_t seed);

/// Mean first passage time from `from` to `to`.
Estimator estimate_hitting_time(const ReversibleChain& chain, int from, int to, long n_traj, std::uint64_t seed);

/// Mean of the first holding time from `start`.
Estimator estimate_first_jump_time(const ReversibleChain& chain, int start, long n_traj, std::uint64_t seed);

/// Fraction of time in each state over [0, t_max], independent batches.
std::vector<Estimator> estimate_occupation(const ReversibleChain& chain, double t_max, int batches,
                                           std::uint64_t seed);

struct ReducedDynamicsEstimate {
  std::vector<double> t;
  std::vector<Matrix> mean;     // estimates of Wᵀ e^{−L̊t} W
  std::vector<Matrix> stderr_;
  long n_samples = 0;
};

/// Samples the marked chain from π̊ and estimates P(mark₀ = a, mark_t = b)/(ĥ_a ĥ_b).
ReducedDynamicsEstimate estimate_reduced_dynamics(const MarkedChain& mc, const Vector& h_hat,
                                                  const std::vector<double>& t_grid, long n_traj,
                                                  std::uint64_t seed);

/// Same estimator, simulating the original chain and updating the mark on
/// each visit to I.
ReducedDynamicsEstimate estimate_reduced_dynamics_via_original(const ReversibleChain& chain,
                                                               const MarkedChain& mc, const Vector& h_hat,
                                                               const std::vector<double>& t_grid,
                                                               long n_traj, std::uint64_t seed);

/// Histogram of the augmented state at time t, from both samplers.
struct OccupancyComparison {
  Vector p_direct, se_direct;
  Vector p_original, se_original;
  double max_z = 0.0;  // max |difference| / pooled standard error
};

OccupancyComparison compare_marked_samplers(const ReversibleChain& chain, const MarkedChain& mc, double t,
                                            long n_traj, std::uint64_t seed);

struct CycleCounts {
  /// #(k→I→k cycles)/#(k→i→k cycles), batch-ratio estimate.
  Estimator ratio;
  double target = 0.0;  // π_k(H_ki + H_ik)/(L_ĪĪ⁻¹)_kk
  /// #(I-cycles whose first I state is i)/#(I-cycles that visit i); at most 1
  /// on every path. Its limit is `target`·C̃_ki.
  Estimator first_i_ratio;
  double first_i_target = 0.0;
  long cycles_I = 0;
  long cycles_i = 0;
  long cycles_I_first_i = 0;
  long cycles_I_with_i = 0;
  bool nested = true;  // every i-cycle endpoint is an I-cycle endpoint
};

CycleCounts estimate_cycle_counts(const ReversibleChain& chain, const SpectralLaplacian& lap, int k, int i,
                                  const IndexSet& I, double t_max, int batches, std::uint64_t seed);

}  // namespace mcc
