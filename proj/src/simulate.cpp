#include "mcc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace mcc {

int Trajectory::state_at(double t) const {
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const auto k = static_cast<size_t>(it - jump_times.begin());
  return states[k == 0 ? 0 : k - 1];
}

Estimator summarize(const std::vector<double>& x, std::uint64_t seed) {
  Estimator e;
  e.seed = seed;
  e.n_samples = static_cast<long>(x.size());
  if (x.empty()) return e;
  double sum = 0.0;
  for (double v : x) sum += v;
  e.mean = sum / static_cast<double>(x.size());
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - e.mean) * (v - e.mean);
    e.stderr_ = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  }
  return e;
}

std::mt19937_64 trajectory_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

int worker_count() {
  if (const char* env = std::getenv("MCC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(long count, const std::function<void(long)>& body) {
  const int workers = static_cast<int>(std::min<long>(worker_count(), std::max(1L, count)));
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (long i = w; i < count; i += workers) body(i);
    });
  for (auto& th : pool) th.join();
}

namespace {

double uniform01(std::mt19937_64& rng) { return std::generate_canonical<double, 64>(rng); }

}  // namespace

JumpProcess::JumpProcess(const SparseMatrix& R) : n_(static_cast<int>(R.rows())) {
  exit_.assign(static_cast<size_t>(n_), 0.0);
  offset_.assign(static_cast<size_t>(n_) + 1, 0);
  for (int i = 0; i < n_; ++i) {
    double total = 0.0;
    for (SparseMatrix::InnerIterator it(R, i); it; ++it)
      if (it.col() != i && it.value() > 0.0) {
        total += it.value();
        target_.push_back(static_cast<int>(it.col()));
        cum_.push_back(total);
      }
    for (long k = offset_[static_cast<size_t>(i)]; k < static_cast<long>(cum_.size()); ++k)
      cum_[static_cast<size_t>(k)] /= total;
    exit_[static_cast<size_t>(i)] = total;
    offset_[static_cast<size_t>(i) + 1] = static_cast<long>(cum_.size());
  }
}

double JumpProcess::holding_time(int i, std::mt19937_64& rng) const {
  return -std::log1p(-uniform01(rng)) / exit_[static_cast<size_t>(i)];
}

int JumpProcess::next_state(int i, std::mt19937_64& rng) const {
  const long lo = offset_[static_cast<size_t>(i)];
  const long hi = offset_[static_cast<size_t>(i) + 1];
  const double u = uniform01(rng);
  auto first = cum_.begin() + lo;
  auto last = cum_.begin() + hi;
  auto it = std::upper_bound(first, last, u);
  if (it == last) --it;
  return target_[static_cast<size_t>(it - cum_.begin())];
}

int JumpProcess::draw(const Vector& cum, std::mt19937_64& rng) {
  const double u = uniform01(rng) * cum(cum.size() - 1);
  const double* b = cum.data();
  const double* e = b + cum.size();
  const double* it = std::upper_bound(b, e, u);
  if (it == e) --it;
  return static_cast<int>(it - b);
}

Vector cumulative(const Vector& p) {
  Vector c(p.size());
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    s += p(i);
    c(i) = s;
  }
  return c;
}

Trajectory sample_path(const ReversibleChain& chain, std::optional<int> x0, double t_max, std::uint64_t seed) {
  if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  const JumpProcess jp(chain.R);
  auto rng = trajectory_stream(seed, 0);
  Trajectory tr;
  tr.t_max = t_max;
  int x = x0 ? *x0 : JumpProcess::draw(cumulative(chain.pi), rng);
  if (x < 0 || x >= chain.n) throw Error(ErrorKind::InvalidArgument, "start state out of range");
  double t = 0.0;
  tr.jump_times.push_back(0.0);
  tr.states.push_back(x);
  while (true) {
    t += jp.holding_time(x, rng);
    if (t > t_max) break;
    x = jp.next_state(x, rng);
    tr.jump_times.push_back(t);
    tr.states.push_back(x);
  }
  return tr;
}

namespace {

// Runs from `start` until the path enters `target`; returns (entry state, elapsed time).
std::pair<int, double> run_until(const JumpProcess& jp, const std::vector<char>& target, int start,
                                 std::mt19937_64& rng) {
  int x = start;
  double t = 0.0;
  while (!target[static_cast<size_t>(x)]) {
    t += jp.holding_time(x, rng);
    x = jp.next_state(x, rng);
  }
  return {x, t};
}

std::vector<char> mask_of(const IndexSet& J, int n) {
  std::vector<char> m(static_cast<size_t>(n), 0);
  for (int j : J) m[static_cast<size_t>(j)] = 1;
  return m;
}

}  // namespace

EstimatorMatrix estimate_committor(const ReversibleChain& chain, const IndexSet& I, long n_traj,
                                   std::uint64_t seed) {
  const int n = chain.n;
  const int r = I.size();
  const JumpProcess jp(chain.R);
  const auto mask = mask_of(I, n);
  EstimatorMatrix out;
  out.mean = Matrix::Zero(n, r);
  out.stderr_ = Matrix::Zero(n, r);
  out.n_samples = n_traj;
  out.seed = seed;
  std::vector<int> hits(static_cast<size_t>(n_traj));
  for (int x = 0; x < n; ++x) {
    if (mask[static_cast<size_t>(x)]) {
      out.mean(x, I.position(x)) = 1.0;
      continue;
    }
    parallel_for(n_traj, [&](long j) {
      auto rng = trajectory_stream(seed, static_cast<std::uint64_t>(x) * static_cast<std::uint64_t>(n_traj) +
                                             static_cast<std::uint64_t>(j));
      hits[static_cast<size_t>(j)] = run_until(jp, mask, x, rng).first;
    });
    Vector counts = Vector::Zero(r);
    for (int y : hits) counts(I.position(y)) += 1.0;
    const double N = static_cast<double>(n_traj);
    for (int p = 0; p < r; ++p) {
      const double m = counts(p) / N;
      out.mean(x, p) = m;
      out.stderr_(x, p) = n_traj > 1 ? std::sqrt(m * (1.0 - m) * N / (N - 1.0) / N) : 0.0;
    }
  }
  return out;
}

Estimator estimate_time_to_set(const ReversibleChain& chain, const IndexSet& J, int start, long n_traj,
                               std::uint64_t seed) {
  const JumpProcess jp(chain.R);
  const auto mask = mask_of(J, chain.n);
  std::vector<double> t(static_cast<size_t>(n_traj));
  parallel_for(n_traj, [&](long j) {
    auto rng = trajectory_stream(seed, static_cast<std::uint64_t>(j));
    t[static_cast<size_t>(j)] = run_until(jp, mask, start, rng).second;
  });
  return summarize(t, seed);
}

std::vector<Estimator> estimate_exit_distribution(const ReversibleChain& chain, const IndexSet& J, int start,
                                                  long n_traj, std::uint64_t seed) {
  const JumpProcess jp(chain.R);
  const auto mask = mask_of(J, chain.n);
  std::vector<int> hit(static_cast<size_t>(n_traj));
  parallel_for(n_traj, [&](long j) {
    auto rng = trajectory_stream(seed, static_cast<std::uint64_t>(j));
    hit[static_cast<size_t>(j)] = run_until(jp, mask, start, rng).first;
  });
  std::vector<Estimator> out;
  for (int p = 0; p < J.size(); ++p) {
    std::vector<double> ind(static_cast<size_t>(n_traj));
    for (long j = 0; j < n_traj; ++j) ind[static_cast<size_t>(j)] = hit[static_cast<size_t>(j)] == J[p] ? 1.0 : 0.0;
    out.push_back(summarize(ind, seed));
  }
  return out;
}

Estimator estimate_hitting_time(const ReversibleChain& chain, int from, int to, long n_traj, std::uint64_t seed) {
  return estimate_time_to_set(chain, IndexSet({to}, chain.n), from, n_traj, seed);
}

Estimator estimate_first_jump_time(const ReversibleChain& chain, int start, long n_traj, std::uint64_t seed) {
  const JumpProcess jp(chain.R);
  std::vector<double> t(static_cast<size_t>(n_traj));
  parallel_for(n_traj, [&](long j) {
    auto rng = trajectory_stream(seed, static_cast<std::uint64_t>(j));
    t[static_cast<size_t>(j)] = jp.holding_time(start, rng);
  });
  return summarize(t, seed);
}

std::vector<Estimator> estimate_occupation(const ReversibleChain& chain, double t_max, int batches,
                                           std::uint64_t seed) {
  const JumpProcess jp(chain.R);
  const Vector cpi = cumulative(chain.pi);
  Matrix frac = Matrix::Zero(batches, chain.n);
  parallel_for(batches, [&](long b) {
    auto rng = trajectory_stream(seed, static_cast<std::uint64_t>(b));
    int x = JumpProcess::draw(cpi, rng);
    double t = 0.0;
    while (t < t_max) {
      const double dt = std::min(jp.holding_time(x, rng), t_max - t);
      frac(b, x) += dt / t_max;
      t += dt;
      if (t < t_max) x = jp.next_state(x, rng);
    }
  });
  std::vector<Estimator> out;
  for (int i = 0; i < chain.n; ++i) {
    std::vector<double> v(static_cast<size_t>(batches));
    for (int b = 0; b < batches; ++b) v[static_cast<size_t>(b)] = frac(b, i);
    out.push_back(summarize(v, seed));
  }
  return out;
}

namespace {

void check_grid(const std::vector<double>& t_grid) {
  for (size_t k = 0; k < t_grid.size(); ++k)
    if (t_grid[k] < 0.0 || (k > 0 && t_grid[k] < t_grid[k - 1]))
      throw Error(ErrorKind::InvalidArgument, "time grid must be nonnegative and ascending");
}

ReducedDynamicsEstimate reduce_marks(const std::vector<int>& start_mark, const std::vector<int>& marks,
                                     const std::vector<double>& t_grid, int r, const Vector& h_hat,
                                     long n_traj) {
  ReducedDynamicsEstimate out;
  out.t = t_grid;
  out.n_samples = n_traj;
  const size_t g = t_grid.size();
  const double N = static_cast<double>(n_traj);
  for (size_t k = 0; k < g; ++k) {
    Matrix counts = Matrix::Zero(r, r);
    for (long j = 0; j < n_traj; ++j)
      counts(start_mark[static_cast<size_t>(j)], marks[static_cast<size_t>(j) * g + k]) += 1.0;
    Matrix mean(r, r), se(r, r);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) {
        const double p = counts(a, b) / N;
        const double scale = h_hat(a) * h_hat(b);
        mean(a, b) = p / scale;
        se(a, b) = (n_traj > 1 ? std::sqrt(p * (1.0 - p) / (N - 1.0)) : 0.0) / scale;
      }
    out.mean.push_back(mean);
    out.stderr_.push_back(se);
  }
  return out;
}

}  // namespace

ReducedDynamicsEstimate estimate_reduced_dynamics(const MarkedChain& mc, const Vector& h_hat,
                                                  const std::vector<double>& t_grid, long n_traj,
                                                  std::uint64_t seed) {
  check_grid(t_grid);
  const JumpProcess jp(mc.R);
  const Vector cpi = cumulative(mc.pi);
  const size_t g = t_grid.size();
  std::vector<int> start(static_cast<size_t>(n_traj));
  std::vector<int> marks(static_cast<size_t>(n_traj) * g);
  auto mark_of = [&](int s) { return mc.I.position(mc.states[static_cast<size_t>(s)].mark); };
  parallel_for(n_traj, [&](long j) {
    auto rng = trajectory_stream(seed, static_cast<std::uint64_t>(j));
    int s = JumpProcess::draw(cpi, rng);
    start[static_cast<size_t>(j)] = mark_of(s);
    double t = 0.0;
    double next = jp.holding_time(s, rng);
    for (size_t k = 0; k < g; ++k) {
      while (next <= t_grid[k]) {
        s = jp.next_state(s, rng);
        t = next;
        next = t + jp.holding_time(s, rng);
      }
      marks[static_cast<size_t>(j) * g + k] = mark_of(s);
    }
  });
  return reduce_marks(start, marks, t_grid, mc.I.size(), h_hat, n_traj);
}

ReducedDynamicsEstimate estimate_reduced_dynamics_via_original(const ReversibleChain& chain,
                                                               const MarkedChain& mc, const Vector& h_hat,
                                                               const std::vector<double>& t_grid,
                                                               long n_traj, std::uint64_t seed) {
  check_grid(t_grid);
  const JumpProcess jp(chain.R);
  const Vector cpi = cumulative(mc.pi);
  const size_t g = t_grid.size();
  std::vector<int> start(static_cast<size_t>(n_traj));
  std::vector<int> marks(static_cast<size_t>(n_traj) * g);
  parallel_for(n_traj, [&](long j) {
    auto rng = trajectory_stream(seed, static_cast<std::uint64_t>(j));
    const MarkedState st = mc.states[static_cast<size_t>(JumpProcess::draw(cpi, rng))];
    int mark = mc.I.position(st.mark);
    int x = st.position;
    start[static_cast<size_t>(j)] = mark;
    double t = 0.0;
    double next = jp.holding_time(x, rng);
    for (size_t k = 0; k < g; ++k) {
      while (next <= t_grid[k]) {
        x = jp.next_state(x, rng);
        const int p = mc.I.position(x);
        if (p >= 0) mark = p;
        t = next;
        next = t + jp.holding_time(x, rng);
      }
      marks[static_cast<size_t>(j) * g + k] = mark;
    }
  });
  return reduce_marks(start, marks, t_grid, mc.I.size(), h_hat, n_traj);
}

OccupancyComparison compare_marked_samplers(const ReversibleChain& chain, const MarkedChain& mc, double t,
                                            long n_traj, std::uint64_t seed) {
  const int m = mc.m();
  const Vector cpi = cumulative(mc.pi);
  const JumpProcess jm(mc.R);
  const JumpProcess jo(chain.R);
  std::vector<int> direct(static_cast<size_t>(n_traj)), original(static_cast<size_t>(n_traj));
  parallel_for(n_traj, [&](long j) {
    auto rng = trajectory_stream(seed, static_cast<std::uint64_t>(j));
    int s = JumpProcess::draw(cpi, rng);
    double clock = jm.holding_time(s, rng);
    while (clock <= t) {
      s = jm.next_state(s, rng);
      clock += jm.holding_time(s, rng);
    }
    direct[static_cast<size_t>(j)] = s;

    auto rng2 = trajectory_stream(seed ^ 0x9e3779b97f4a7c15ULL, static_cast<std::uint64_t>(j));
    const MarkedState st = mc.states[static_cast<size_t>(JumpProcess::draw(cpi, rng2))];
    int mark = st.mark;
    int x = st.position;
    clock = jo.holding_time(x, rng2);
    while (clock <= t) {
      x = jo.next_state(x, rng2);
      if (mc.I.contains(x)) mark = x;
      clock += jo.holding_time(x, rng2);
    }
    original[static_cast<size_t>(j)] = mc.index_of(mark, x);
  });
  OccupancyComparison out;
  const double N = static_cast<double>(n_traj);
  out.p_direct = Vector::Zero(m);
  out.p_original = Vector::Zero(m);
  for (long j = 0; j < n_traj; ++j) {
    out.p_direct(direct[static_cast<size_t>(j)]) += 1.0 / N;
    const int o = original[static_cast<size_t>(j)];
    if (o < 0) throw Error(ErrorKind::InvalidArgument, "original sampler reached a pruned augmented state");
    out.p_original(o) += 1.0 / N;
  }
  auto se = [N](double p) { return std::sqrt(p * (1.0 - p) / (N - 1.0)); };
  out.se_direct = out.p_direct.unaryExpr(se);
  out.se_original = out.p_original.unaryExpr(se);
  for (int s = 0; s < m; ++s) {
    const double pooled = std::hypot(out.se_direct(s), out.se_original(s));
    if (pooled > 0.0) out.max_z = std::max(out.max_z, std::abs(out.p_direct(s) - out.p_original(s)) / pooled);
  }
  return out;
}

CycleCounts estimate_cycle_counts(const ReversibleChain& chain, const SpectralLaplacian& lap, int k, int i,
                                  const IndexSet& I, double t_max, int batches, std::uint64_t seed) {
  if (I.contains(k)) throw Error(ErrorKind::InvalidArgument, "k must lie outside I");
  if (!I.contains(i)) throw Error(ErrorKind::InvalidArgument, "i must lie in I");
  if (batches < 2) throw Error(ErrorKind::InvalidArgument, "need at least two batches");
  const JumpProcess jp(chain.R);
  const double horizon = t_max / batches;
  struct Batch {
    long I = 0, i = 0, first_i = 0, with_i = 0;
    bool nested = true;
  };
  std::vector<Batch> res(static_cast<size_t>(batches));
  parallel_for(batches, [&](long b) {
    auto rng = trajectory_stream(seed, static_cast<std::uint64_t>(b));
    Batch out;
    int x = k;
    double t = 0.0;
    bool in_I_phase = false, in_i_phase = false, first_is_i = false, saw_i = false;
    while (true) {
      t += jp.holding_time(x, rng);
      if (t > horizon) break;
      x = jp.next_state(x, rng);
      if (I.contains(x)) {
        if (!in_I_phase) {
          in_I_phase = true;
          first_is_i = (x == i);
        }
        if (x == i) {
          saw_i = true;
          in_i_phase = true;
        }
      }
      if (x == k) {
        bool closed_I = false;
        if (in_I_phase) {
          ++out.I;
          if (first_is_i) ++out.first_i;
          if (saw_i) ++out.with_i;
          in_I_phase = false;
          saw_i = false;
          closed_I = true;
        }
        if (in_i_phase) {
          ++out.i;
          if (!closed_I) out.nested = false;
          in_i_phase = false;
        }
      }
    }
    if (out.with_i != out.i) out.nested = false;
    res[static_cast<size_t>(b)] = out;
  });

  CycleCounts cc;
  std::vector<double> a(static_cast<size_t>(batches)), d(static_cast<size_t>(batches)),
      f(static_cast<size_t>(batches)), w(static_cast<size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    const Batch& r = res[static_cast<size_t>(b)];
    cc.cycles_I += r.I;
    cc.cycles_i += r.i;
    cc.cycles_I_first_i += r.first_i;
    cc.cycles_I_with_i += r.with_i;
    cc.nested = cc.nested && r.nested;
    a[static_cast<size_t>(b)] = static_cast<double>(r.I);
    d[static_cast<size_t>(b)] = static_cast<double>(r.i);
    f[static_cast<size_t>(b)] = static_cast<double>(r.first_i);
    w[static_cast<size_t>(b)] = static_cast<double>(r.with_i);
  }
  // Ratio of sums with a delta-method standard error over batches.
  auto ratio = [&](const std::vector<double>& num, const std::vector<double>& den) {
    Estimator e;
    e.seed = seed;
    e.n_samples = batches;
    double sn = 0.0, sd = 0.0;
    for (int b = 0; b < batches; ++b) {
      sn += num[static_cast<size_t>(b)];
      sd += den[static_cast<size_t>(b)];
    }
    if (sd <= 0.0) {
      e.mean = std::numeric_limits<double>::quiet_NaN();
      return e;
    }
    e.mean = sn / sd;
    double ss = 0.0;
    for (int b = 0; b < batches; ++b) {
      const double r = num[static_cast<size_t>(b)] - e.mean * den[static_cast<size_t>(b)];
      ss += r * r;
    }
    const double B = static_cast<double>(batches);
    e.stderr_ = std::sqrt(ss / (B - 1.0) / B) / (sd / B);
    return e;
  };
  cc.ratio = ratio(a, d);
  cc.first_i_ratio = ratio(f, w);

  const HittingTimes ht = hitting_times(lap);
  const std::vector<int> comp = I.complement();
  const Matrix lcc = submatrix(lap.L, comp, comp);
  const Matrix linv = lcc.llt().solve(Matrix::Identity(lcc.rows(), lcc.cols()));
  const int kp = static_cast<int>(std::find(comp.begin(), comp.end(), k) - comp.begin());
  cc.target = chain.pi(k) * (ht.H(k, i) + ht.H(i, k)) / linv(kp, kp);
  const Matrix ct = committor_absorbing_solve(chain, I);
  cc.first_i_target = cc.target * ct(k, I.position(i));
  return cc;
}

}  // namespace mcc
