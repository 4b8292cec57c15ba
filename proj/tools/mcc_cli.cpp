#include "mcc/compress.hpp"
#include "mcc/io.hpp"
#include "mcc/marked.hpp"
#include "mcc/select.hpp"
#include "mcc/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>

namespace fs = std::filesystem;
using namespace mcc;

namespace {

// Marked chains up to this size get dense references (expm, identity suite).
constexpr int kDenseMarkedLimit = 600;
constexpr double kFamilyAlpha = 0.0027;  // two-sided 3σ level

struct Context {
  RunConfig cfg;
  std::string hash;
  fs::path out;
};

void write_json(const Context& ctx, const std::string& name, Json body) {
  body["provenance"] = provenance(ctx.hash);
  write_file_atomic(ctx.out / name, body.dump(2) + "\n");
}

void write_text(const Context& ctx, const std::string& name, const std::string& text) {
  write_file_atomic(ctx.out / name, text);
}

Json input_key(const RunConfig& c) {
  return Json{{"input", c.input}, {"format", c.format}, {"mode", c.mode},
              {"synthetic_n", c.synthetic_n}, {"synthetic_m", c.synthetic_m}, {"seed", c.seed}};
}

// Reuses the chain written by `build` when it was produced from the same input.
ReversibleChain obtain_chain(const Context& ctx) {
  const fs::path cached = ctx.out / "chain.mtx";
  const fs::path meta = ctx.out / "chain.json";
  if (fs::exists(cached) && fs::exists(meta)) {
    try {
      const Json j = Json::parse(read_file(meta));
      if (j.value("input_key", Json()) == input_key(ctx.cfg)) return load_rates_chain(cached);
    } catch (const Json::exception&) {
    }
  }
  return load_input(ctx.cfg);
}

IndexSet chosen_subset(const Context& ctx, const SpectralLaplacian& lap) {
  const int n = lap.n();
  if (!ctx.cfg.states.empty()) {
    for (int s : ctx.cfg.states)
      if (s >= n) throw Error(ErrorKind::InvalidConfig, "state " + std::to_string(s) + " out of range");
    return IndexSet(ctx.cfg.states, n);
  }
  if (ctx.cfg.subset_size > n) throw Error(ErrorKind::KTooLarge, "subset_size exceeds the number of states");
  return IndexSet(greedy_select(lap, ctx.cfg.subset_size).ordered, n);
}

double gamma_of(const Context& ctx, const SpectralLaplacian& lap) {
  return ctx.cfg.gamma > 0.0 ? ctx.cfg.gamma : default_gamma(lap);
}

std::vector<double> curve_grid(const Context& ctx, const SpectralLaplacian& lap) {
  const auto g = time_grid(ctx.cfg, lap);
  const double lo = std::max(g.front(), 1e-300);
  return log_grid(lo, std::max(g.back(), lo), ctx.cfg.curve_points);
}

// |z| threshold keeping the family-wise two-sided error at the 3σ level.
double family_threshold(long count) {
  if (count <= 1) return 3.0;
  const double per = 1.0 - std::pow(1.0 - kFamilyAlpha, 1.0 / static_cast<double>(count));
  double lo = 0.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > per ? lo : hi) = mid;
  }
  return hi;
}

struct ZFamily {
  std::vector<double> z;
  void add(double est, double se, double target) {
    const double diff = std::abs(est - target);
    z.push_back(diff <= 1e-12 ? 0.0 : (se > 0.0 ? diff / se : INFINITY));
  }
  double max_z() const { return z.empty() ? 0.0 : *std::max_element(z.begin(), z.end()); }
  void report(CheckReport& rep, const std::string& name) const {
    const double thr = family_threshold(static_cast<long>(z.size()));
    rep.add(name, max_z(), thr, std::to_string(z.size()) + " estimators");
  }
};

Json fail_items(const CheckReport& r, const std::string& suite) {
  Json out = Json::array();
  for (const auto& it : r.items)
    if (!it.passed)
      out.push_back({{"suite", suite}, {"name", it.name}, {"residual", it.residual},
                     {"tolerance", it.tolerance}, {"note", it.note}});
  return out;
}

int finish(const Context& ctx, const std::string& command, const CheckReport& rep, Json body) {
  body["command"] = command;
  body["checks"] = check_report_json(rep);
  body["passed"] = rep.all_passed();
  write_json(ctx, command + ".json", body);
  if (rep.all_passed()) return 0;
  write_json(ctx, "failures.json", Json{{"command", command}, {"failures", fail_items(rep, command)}});
  return 1;
}

// ---- build -------------------------------------------------------------

int cmd_build(const Context& ctx) {
  const ReversibleChain chain = load_input(ctx.cfg);
  const SpectralLaplacian lap = symmetrize(chain);
  const ChainResiduals res = chain_residuals(chain);
  CheckReport rep;
  rep.add("row_sum", res.row_sum, 1e-12);
  rep.add("detailed_balance", res.detailed_balance, 1e-10);
  rep.add("stationarity", res.stationarity, 1e-10);
  rep.require("null_rank_one", lap.null_rank == 1);
  save_chain(ctx.out / "chain.mtx", chain);
  Json body{{"n", chain.n},
            {"nnz", chain.R.nonZeros() - chain.n},
            {"trace_K", lap.trace_K()},
            {"lambda_2", chain.n > 1 ? lap.eigenvalues(1) : 0.0},
            {"lambda_max", lap.eigenvalues(chain.n - 1)},
            {"pi_min", chain.pi.minCoeff()},
            {"pi_max", chain.pi.maxCoeff()},
            {"input_key", input_key(ctx.cfg)}};
  write_json(ctx, "chain.json", body);
  return finish(ctx, "build", rep, body);
}

// ---- select ------------------------------------------------------------

int cmd_select(const Context& ctx) {
  const ReversibleChain chain = obtain_chain(ctx);
  const SpectralLaplacian lap = symmetrize(chain);
  if (ctx.cfg.k > lap.n()) throw Error(ErrorKind::KTooLarge, "k exceeds the number of states");
  SelectOptions opts;
  opts.track_eps2 = true;
  const SelectionTrace tr = greedy_select(lap, ctx.cfg.k, opts);
  write_text(ctx, "selection.csv", selection_trace_csv(tr, ctx.hash));

  CsvWriter curves({"config_hash", "version", "k", "eps2", "eps_nuc", "psi2", "psi_nuc", "spectral_lower_bound"});
  CheckReport rep;
  int below = 0, increases = 0;
  for (size_t k = 0; k < tr.ordered.size(); ++k) {
    const std::vector<int> prefix(tr.ordered.begin(), tr.ordered.begin() + static_cast<long>(k) + 1);
    const Obliqueness psi = obliqueness(lap, lap.h, IndexSet(prefix, lap.n()));
    curves.row({ctx.hash, std::string(kLibraryVersion), std::to_string(k + 1), CsvWriter::num(tr.eps2[k]),
                CsvWriter::num(tr.eps_nuc[k]), CsvWriter::num(psi.psi2), CsvWriter::num(psi.psi_nuc),
                CsvWriter::num(tr.spectral_lower_bound[k])});
    const double scale = std::max(1.0, std::abs(tr.eps_nuc[0]));
    if (tr.eps_nuc[k] < tr.spectral_lower_bound[k] - 1e-10 * scale) ++below;
    if (k > 0 && tr.eps_nuc[k] > tr.eps_nuc[k - 1] + 1e-10 * scale) ++increases;
  }
  write_text(ctx, "selection_curves.csv", curves.str());
  if (ctx.cfg.verify_selection) {
    rep.add("eps_nuc_below_spectral_bound", below, 0.0, "count over k");
    rep.add("eps_nuc_increases", increases, 0.0, "count over k");
  }
  Json body = selection_trace_json(tr);
  return finish(ctx, "select", rep, Json{{"selection", body}, {"n", lap.n()}, {"k", ctx.cfg.k}});
}

// ---- compress ----------------------------------------------------------

std::vector<CurvePoint> projective_curves(const SpectralLaplacian& lap, const CommittorBundle& b,
                                          const std::vector<double>& grid) {
  const ProjectiveBasis basis = projective_basis(lap, b);
  const Matrix B = lap.eigenvectors.transpose() * basis.V;
  std::vector<CurvePoint> pts;
  for (double t : grid) {
    const Matrix comp = sym_apply(basis.eigA, [t](double x) { return std::exp(-x * t); });
    const Vector d = (-lap.eigenvalues * t).array().exp();
    const Matrix ref = B.transpose() * d.asDiagonal() * B;
    for (int a = 0; a < ref.rows(); ++a)
      for (int c = 0; c < ref.cols(); ++c) pts.push_back({t, a, c, comp(a, c), ref(a, c), 0.0});
  }
  return pts;
}

std::vector<CurvePoint> reduced_curves(const Context& ctx, const MarkedChain& mc, const CommittorBundle& b,
                                       const InducedChain& ic, const std::vector<double>& grid,
                                       std::string& method) {
  std::vector<CurvePoint> pts;
  const int r = b.I.size();
  auto push = [&](double t, const Matrix& ref, const Matrix* se) {
    const Matrix comp = sym_expm_neg(ic.L_hat, t);
    for (int a = 0; a < r; ++a)
      for (int c = 0; c < r; ++c)
        pts.push_back({t, a, c, comp(a, c), ref(a, c), se ? (*se)(a, c) : 0.0});
  };
  if (mc.m() <= kDenseMarkedLimit) {
    method = "dense";
    const MarkedProjections proj = projections(mc, b);
    const Matrix Lm = mc.dense_laplacian();
    for (double t : grid) push(t, proj.W.transpose() * expm(Matrix(-Lm * t)) * proj.W, nullptr);
  } else {
    method = "monte-carlo";
    const auto est = estimate_reduced_dynamics(mc, b.h_hat, grid, ctx.cfg.n_traj, ctx.cfg.seed);
    for (size_t k = 0; k < grid.size(); ++k) push(grid[k], est.mean[k], &est.stderr_[k]);
  }
  return pts;
}

int cmd_compress(const Context& ctx) {
  const ReversibleChain chain = obtain_chain(ctx);
  const SpectralLaplacian lap = symmetrize(chain);
  const IndexSet I = chosen_subset(ctx, lap);
  const CommittorBundle b = committor_closed_form(lap, I);
  const InducedChain ic = induced_chain(chain, b);
  const auto grid = time_grid(ctx.cfg, lap);
  const BoundReport br = error_curves(lap, b, ic, grid);
  write_text(ctx, "bounds.csv", bound_report_csv(br, ctx.hash));
  write_text(ctx, "committor.csv", committor_csv(b, ctx.hash));
  CheckReport rep;
  if (ctx.cfg.verify_bounds) rep.add("bound_violations", br.violations, 0.0, "grid points x inequalities");
  Json body{{"subset", I.indices()}, {"bounds", bound_report_json(br)}, {"k_condition", b.k_condition}};
  if (ctx.cfg.curves) {
    const auto cg = curve_grid(ctx, lap);
    write_text(ctx, "curves_projective.csv", curves_csv("projective", projective_curves(lap, b, cg), ctx.hash));
    const MarkedChain mc = build_marked(chain, b);
    std::string method;
    write_text(ctx, "curves_reduced.csv",
               curves_csv("reduced", reduced_curves(ctx, mc, b, ic, cg, method), ctx.hash));
    body["reduced_reference"] = method;
    body["marked_states"] = mc.m();
  }
  return finish(ctx, "compress", rep, body);
}

// ---- verify ------------------------------------------------------------

void verify_committor(const Context& ctx, const ReversibleChain& chain, const SpectralLaplacian& lap,
                      const CommittorBundle& b, CheckReport& rep) {
  const Matrix oracle = committor_absorbing_solve(chain, b.I);
  rep.add("committor_vs_absorbing", max_abs(b.Ct - oracle), 1e-9);
  rep.add("committor_row_sums", (b.Ct.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
  rep.add("committor_min_entry", std::max(0.0, -b.Ct.minCoeff()), 1e-12);
  const double g = gamma_of(ctx, lap);
  const KilledCommittor kc = killed_committor(killed(lap, g), lap.h, b.I);
  rep.add("killed_committor_vs_absorbing", max_abs(kc.Ct - killed_committor_absorbing_solve(chain, b.I, g)), 1e-9);
  // Killed committor approaches C̃ linearly in γ once γ is below the spectral gap.
  std::vector<double> errs;
  for (double gk : {1e-1, 1e-2, 1e-3})
    errs.push_back(max_abs(killed_committor_absorbing_solve(chain, b.I, gk / lap.trace_K()) - oracle));
  double worst_slope = INFINITY;
  for (size_t q = 1; q < errs.size(); ++q)
    if (errs[q] > 1e-13) worst_slope = std::min(worst_slope, std::log10(errs[q - 1] / errs[q]));
  const bool shrinking = worst_slope >= 0.9;
  rep.require("killed_committor_converges", shrinking);
}

void verify_induced(const ReversibleChain& chain, const SpectralLaplacian& lap, const CommittorBundle& b,
                    const InducedChain& ic, CheckReport& rep) {
  rep.append(interpretation_checks(chain, ic), "induced.");
  rep.add("hitting_preservation", hitting_preservation(lap, ic), 1e-8 * std::max(1.0, max_abs(hitting_times(lap).H)));
  const InducedChain viak = induced_from_k(lap, lap.h, b.I);
  rep.add("induced_from_k", max_abs(viak.R_hat - ic.R_hat), 1e-9 * std::max(1.0, max_abs(ic.R_hat)));
}

void verify_bounds(const Context& ctx, const SpectralLaplacian& lap, const CommittorBundle& b,
                   const InducedChain& ic, CheckReport& rep) {
  const auto grid = time_grid(ctx.cfg, lap);
  const BoundReport br = error_curves(lap, b, ic, grid);
  rep.add("bound_violations", br.violations, 0.0);
  const Obliqueness psi = obliqueness(lap, lap.h, b.I);
  const double viah = obliqueness_from_hitting(lap, b);
  rep.add("psi_nuc_vs_hitting", std::abs(psi.psi_nuc - viah) / std::max(std::abs(viah), 1e-300), 1e-7);
  const double eps = schur_trace(lap, b.I);
  rep.require("psi_nuc_le_r_eps_nuc", psi.psi_nuc <= b.I.size() * eps * (1.0 + 1e-10) + 1e-12);
  const IntegratedOccupation io = integrated_occupation_check(lap, b.I, gamma_of(ctx, lap));
  rep.add("integrated_sp", io.residual_sp, 1e-9);
  rep.add("integrated_proj", io.residual_proj, 1e-9);
  if (lap.n() <= 2000) {
    double neg = 0.0, rows = 0.0;
    for (double t : grid) {
      const Matrix pt = structure_preserving(lap.h, b, ic, t).Pt;
      neg = std::max(neg, std::max(0.0, -pt.minCoeff()));
      rows = std::max(rows, (pt.rowwise().sum().array() - 1.0).abs().maxCoeff());
    }
    rep.add("sp_negativity", neg, 1e-12);
    rep.add("sp_row_sums", rows, 1e-10);
  }
}

void verify_marked(const Context& ctx, const ReversibleChain& chain, const SpectralLaplacian& lap,
                   const CommittorBundle& b, const InducedChain& ic, CheckReport& rep, Json& notes) {
  const MarkedChain mc = build_marked(chain, b);
  notes["marked_states"] = mc.m();
  notes["pruned_states"] = mc.pruned.size();
  rep.add("marked_stationarity", mc.stationarity_residual(), 1e-10);
  if (static_cast<int>(mc.unpruned_states.size()) > kDenseMarkedLimit) {
    notes["marked_dense_suite"] = "skipped: marked chain too large";
    return;
  }
  const double g = gamma_of(ctx, lap);
  const KilledOperators ko = killed(lap, g);
  const KilledCommittor kc = killed_committor(ko, lap.h, b.I);
  const MarkedProjections proj = projections(mc, b, kc);
  rep.append(identity_suite(mc, proj, lap, b, ic, ko, kc), "marked.");
  const SpectrumComparison sp = marked_spectrum(mc, chain);
  rep.add("marked_spectrum", sp.max_deviation, 1e-8 * std::max(1.0, std::abs(sp.expected(0))));
  notes["pruning_changed_spectrum"] = sp.pruning_changed_spectrum;
}

void verify_selection(const SpectralLaplacian& lap, CheckReport& rep) {
  const int n = lap.n();
  const int kmax = std::min(n - 1, 8);
  if (kmax < 1) return;
  const SelectionTrace tr = greedy_select(lap, kmax);
  for (int k = 1; k < kmax; ++k)
    if (tr.eps_nuc[static_cast<size_t>(k)] > tr.eps_nuc[static_cast<size_t>(k - 1)] * (1.0 + 1e-10) + 1e-12) {
      rep.require("greedy_decreasing", false, "k = " + std::to_string(k + 1));
      return;
    }
  rep.require("greedy_decreasing", true);
  if (n > kBruteForceMaxStates) return;
  const double tr_k = lap.trace_K();
  double worst = -INFINITY;
  for (int s = 1; s <= std::min(3, n - 1); ++s) {
    const BruteForceResult opt = brute_force_optimal(lap, s);
    for (int k = 1; k <= std::min(5, kmax); ++k)
      worst = std::max(worst, trace_guarantee_margin(tr.eps_nuc[static_cast<size_t>(k - 1)], opt.eps_nuc, tr_k, k, s));
  }
  rep.add("greedy_trace_guarantee_margin", std::max(0.0, worst), 1e-12);
}

int cmd_verify(const Context& ctx) {
  const ReversibleChain chain = obtain_chain(ctx);
  const SpectralLaplacian lap = symmetrize(chain);
  const IndexSet I = chosen_subset(ctx, lap);
  CheckReport rep;
  Json notes{{"subset", I.indices()}, {"n", lap.n()}};
  if (ctx.cfg.verify_chain) {
    const ChainResiduals res = chain_residuals(chain);
    rep.add("chain.row_sum", res.row_sum, 1e-12);
    rep.add("chain.detailed_balance", res.detailed_balance, 1e-10);
    rep.add("chain.stationarity", res.stationarity, 1e-10);
    rep.require("chain.null_rank_one", lap.null_rank == 1);
    const Matrix lk = lap.L * lap.K;
    const Matrix proj = Matrix::Identity(lap.n(), lap.n()) - lap.h * lap.h.transpose();
    rep.add("chain.pseudoinverse", max_abs(lk - proj), 1e-9);
  }
  const CommittorBundle b = committor_closed_form(lap, I);
  const InducedChain ic = induced_chain(chain, b);
  if (ctx.cfg.verify_committor) verify_committor(ctx, chain, lap, b, rep);
  if (ctx.cfg.verify_induced) verify_induced(chain, lap, b, ic, rep);
  if (ctx.cfg.verify_marked) verify_marked(ctx, chain, lap, b, ic, rep, notes);
  if (ctx.cfg.verify_bounds) verify_bounds(ctx, lap, b, ic, rep);
  if (ctx.cfg.verify_selection) verify_selection(lap, rep);
  return finish(ctx, "verify", rep, notes);
}

// ---- simulate ----------------------------------------------------------

// Up to `count` states spread evenly over `pool`.
std::vector<int> spread(const std::vector<int>& pool, int count) {
  std::vector<int> out;
  if (pool.empty()) return out;
  const int m = static_cast<int>(pool.size());
  const int c = std::min(count, m);
  for (int q = 0; q < c; ++q) out.push_back(pool[static_cast<size_t>(static_cast<long>(q) * m / c)]);
  return out;
}

int cmd_simulate(const Context& ctx) {
  const ReversibleChain chain = obtain_chain(ctx);
  const SpectralLaplacian lap = symmetrize(chain);
  const IndexSet I = chosen_subset(ctx, lap);
  const CommittorBundle b = committor_closed_form(lap, I);
  const HittingTimes ht = hitting_times(lap);
  const long N = ctx.cfg.n_traj;
  const std::uint64_t seed = ctx.cfg.seed;
  CheckReport rep;
  Json notes{{"subset", I.indices()}, {"n_traj", N}, {"seed", seed}};
  const std::vector<int> comp = I.complement();

  // Committor rows at a handful of starting states.
  ZFamily fc;
  const auto starts = spread(comp, 8);
  for (size_t q = 0; q < starts.size(); ++q) {
    const int x = starts[q];
    const auto dist = estimate_exit_distribution(chain, I, x, N, seed + 101 * (q + 1));
    for (int p = 0; p < I.size(); ++p) {
      const double target = b.Ct(x, p);
      const double se = std::max(dist[static_cast<size_t>(p)].stderr_,
                                 std::sqrt(target * (1.0 - target) / static_cast<double>(N)));
      fc.add(dist[static_cast<size_t>(p)].mean, se, target);
    }
  }
  if (!fc.z.empty()) fc.report(rep, "committor_max_z");

  ZFamily fh;
  const auto pairs_from = spread(comp.empty() ? I.indices() : comp, 3);
  for (size_t q = 0; q < pairs_from.size(); ++q) {
    const int to = I[static_cast<int>(q % static_cast<size_t>(I.size()))];
    if (to == pairs_from[q]) continue;
    const Estimator e = estimate_hitting_time(chain, pairs_from[q], to, N, seed + 211 * (q + 1));
    fh.add(e.mean, e.stderr_, ht.H(pairs_from[q], to));
  }
  if (!fh.z.empty()) fh.report(rep, "hitting_time_max_z");

  if (!comp.empty()) {
    int k = comp.front();
    for (int s : comp)
      if (chain.pi(s) > chain.pi(k)) k = s;
    const int i = I[0];
    const double cycle = ht.H(k, i) + ht.H(i, k);
    const double t_max = std::max(50.0, static_cast<double>(N) / 5.0) * cycle;
    const CycleCounts cc = estimate_cycle_counts(chain, lap, k, i, I, t_max, 50, seed + 307);
    rep.require("cycle_nested", cc.nested);
    rep.require("cycle_first_i_le_with_i", cc.cycles_I_first_i <= cc.cycles_I_with_i);
    ZFamily fr;
    fr.add(cc.ratio.mean, cc.ratio.stderr_, cc.target);
    fr.add(cc.first_i_ratio.mean, cc.first_i_ratio.stderr_, cc.first_i_target);
    fr.report(rep, "cycle_ratio_max_z");
    notes["cycle"] = {{"k", k}, {"i", i}, {"ratio", cc.ratio.mean}, {"ratio_se", cc.ratio.stderr_},
                      {"target", cc.target}, {"first_i_ratio", cc.first_i_ratio.mean},
                      {"first_i_target", cc.first_i_target}, {"cycles_I", cc.cycles_I},
                      {"cycles_i", cc.cycles_i}};
  }

  const MarkedChain mc = build_marked(chain, b);
  if (mc.m() <= kDenseMarkedLimit) {
    const MarkedProjections proj = projections(mc, b);
    const Matrix Lm = mc.dense_laplacian();
    const auto grid = curve_grid(ctx, lap);
    const auto est = estimate_reduced_dynamics(mc, b.h_hat, grid, N, seed + 401);
    ZFamily fr;
    std::vector<CurvePoint> pts;
    const InducedChain ic = induced_chain(chain, b);
    for (size_t q = 0; q < grid.size(); ++q) {
      const Matrix dense = proj.W.transpose() * expm(Matrix(-Lm * grid[q])) * proj.W;
      for (int a = 0; a < I.size(); ++a)
        for (int c = 0; c < I.size(); ++c) {
          // Binomial floor so that empty cells still carry a standard error.
          const double w = b.h_hat(a) * b.h_hat(c);
          const double p = std::clamp(dense(a, c) * w, 0.0, 1.0);
          const double floor = std::sqrt(p * (1.0 - p) / static_cast<double>(N)) / w;
          fr.add(est.mean[q](a, c), std::max(est.stderr_[q](a, c), floor), dense(a, c));
          pts.push_back({grid[q], a, c, est.mean[q](a, c), dense(a, c), est.stderr_[q](a, c)});
        }
    }
    fr.report(rep, "reduced_dynamics_max_z");
    write_text(ctx, "curves_reduced_mc.csv", curves_csv("reduced-monte-carlo", pts, ctx.hash));
  } else {
    notes["reduced_dynamics"] = "skipped: marked chain too large for a dense reference";
  }
  return finish(ctx, "simulate", rep, notes);
}

// ---- report ------------------------------------------------------------

int cmd_report(const Context& ctx) {
  Json summary{{"documents", Json::object()}};
  bool passed = true;
  Json failures = Json::array();
  for (const char* name : {"build", "select", "compress", "verify", "simulate"}) {
    const fs::path p = ctx.out / (std::string(name) + ".json");
    if (!fs::exists(p)) continue;
    Json doc;
    try {
      doc = Json::parse(read_file(p));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::ParseError, p.string() + ": " + e.what());
    }
    summary["documents"][name] = doc;
    if (!doc.value("passed", false)) {
      passed = false;
      failures.push_back(name);
    }
  }
  if (summary["documents"].empty()) throw Error(ErrorKind::IoError, "no outputs to merge in " + ctx.out.string());
  summary["passed"] = passed;
  summary["failed_commands"] = failures;
  write_json(ctx, "summary.json", summary);
  if (passed) return 0;
  write_json(ctx, "failures.json", Json{{"command", "report"}, {"failed_commands", failures}});
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  prefer_safe_blas_kernel(argv);
  CLI::App app{"Markov chain compression toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON configuration file");

  Json over = Json::object();
  auto str_opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(flag, [&over, key](const std::string& v) { over[key] = v; }, help);
  };
  auto int_opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<long>(flag, [&over, key](long v) { over[key] = v; }, help);
  };
  auto dbl_opt = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<double>(flag, [&over, key](double v) { over[key] = v; }, help);
  };
  str_opt("-i,--input", "input", "input file");
  str_opt("--format", "format", "mm-adjacency | mm-rates | edges-csv | synthetic-webgraph | random-chain | fixture-k3 | fixture-p2");
  str_opt("--mode", "mode", "webgraph | rates");
  int_opt("--n", "synthetic_n", "states for generated inputs");
  int_opt("--m", "synthetic_m", "edges per new node for the synthetic webgraph");
  int_opt("-k,--k", "k", "states to select");
  int_opt("--subset-size", "subset_size", "greedy subset size for compress/verify/simulate");
  dbl_opt("--t-min", "t_min", "first time point");
  dbl_opt("--t-max", "t_max", "last time point (0 = default grid)");
  int_opt("--t-points", "t_points", "time points");
  int_opt("--curve-points", "curve_points", "time points for reduced-subspace curves");
  dbl_opt("--gamma", "gamma", "killing rate (0 = 1/(10 Tr K))");
  int_opt("--seed", "seed", "random seed");
  int_opt("--n-traj", "n_traj", "Monte Carlo trajectories");
  str_opt("-o,--out", "output_dir", "output directory");
  app.add_option_function<std::vector<int>>("--states", [&over](const std::vector<int>& v) { over["states"] = v; },
                                            "explicit subset")
      ->delimiter(',');
  app.add_flag_callback("--linear-time", [&over] { over["t_log"] = false; }, "linear time grid");
  for (const char* suite : {"chain", "committor", "induced", "marked", "bounds", "selection"}) {
    const std::string key = std::string("verify_") + suite;
    app.add_flag_callback(std::string("--skip-") + suite, [&over, key] { over[key] = false; },
                          std::string("disable the ") + suite + " checks");
  }
  app.add_flag_callback("--no-curves", [&over] { over["curves"] = false; }, "skip curve files");

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Context&);
  };
  const Sub subs[] = {{"build", "validate and cache the chain", cmd_build},
                      {"select", "greedy nuclear maximization", cmd_select},
                      {"compress", "bound report and reduced-subspace curves", cmd_compress},
                      {"verify", "invariant and identity suites", cmd_verify},
                      {"simulate", "Monte Carlo corroborations", cmd_simulate},
                      {"report", "merge outputs into summary.json", cmd_report}};
  app.fallthrough();
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  CLI11_PARSE(app, argc, argv);

  Context ctx;
  try {
    if (!config_path.empty()) ctx.cfg = load_config(config_path);
    ctx.cfg.merge(over);
    ctx.cfg.validate();
    ctx.hash = ctx.cfg.hash();
    ctx.out = ctx.cfg.output_dir;
    fs::create_directories(ctx.out);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    std::cout << Json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "IoError: " << e.what() << "\n";
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const auto started = std::chrono::steady_clock::now();
  int code = 0;
  try {
    for (const auto& s : subs)
      if (name == s.name) code = s.run(ctx);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    try {
      write_json(ctx, "failures.json",
                 Json{{"command", name}, {"error", std::string(to_string(e.kind()))}, {"message", e.what()}});
    } catch (const std::exception&) {
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::cout << name << ": " << (code == 0 ? "ok" : "FAILED") << " (" << secs << " s, " << ctx.out.string()
            << ")\n";
  return code;
}
