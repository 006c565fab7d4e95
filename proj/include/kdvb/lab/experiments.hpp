#pragma once

// Experiment drivers. Every number they emit comes from a public library
// call; the drivers only choose inputs and compare.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kdvb/carleman.hpp"
#include "kdvb/control.hpp"
#include "kdvb/evolution.hpp"
#include "kdvb/observability.hpp"
#include "kdvb/oracles.hpp"
#include "kdvb/rng.hpp"
#include "kdvb/sobolev.hpp"
#include "kdvb/weight_psi.hpp"
#include "kdvb/lab/config.hpp"
#include "kdvb/lab/report.hpp"

namespace kdvb::lab {

namespace detail {

class Stopwatch {
 public:
  explicit Stopwatch(RunReport& r, int criterion) : r_(r), c_(criterion), t0_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    r_.criterion_seconds[c_] +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  RunReport& r_;
  int c_;
  std::chrono::steady_clock::time_point t0_;
};

inline RunReport start_report(const ExperimentConfig& c) {
  RunReport r;
  r.name = c.name;
  r.experiment = c.experiment;
  r.config = config_echo(c);
  r.input_hash = git_blob_hash(r.config.dump());
  return r;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Smooth source vanishing with two derivatives at both ends of [-L, L].
inline SourceTerm smooth_source(const GridPtr& g, double T) {
  return SourceTerm{[g, T](double t) {
    const double L = g->L();
    Vec v(g->n());
    for (int i = 0; i < g->n(); ++i) {
      const double y = g->x(i) / L;
      v[i] = std::sin(M_PI * t / T) * std::pow(1 - y * y, 2) * (1 + y);
    }
    return v;
  }};
}

// In the operator's domain: u(-L) = u(L) = u_x(L) = 0.
inline StateVector domain_field(const GridPtr& g) {
  const double L = g->L();
  return StateVector::sample(g, [L](double x) { return std::sin(M_PI * (x + L) / (2 * L)) * (L - x) / (2 * L); });
}

inline StateVector initial_state(const ExperimentConfig& c, const GridPtr& g) {
  const auto& s = c.simulate;
  if (s.initial == "zero") return StateVector::zero(g);
  if (s.initial == "random") {
    Rng rng(c.seed);
    return random_state(g, rng);
  }
  return dirichlet_mode(g, s.mode);
}

inline Trajectory simulate_run(const ExperimentConfig& c, const GridPtr& g) {
  const DiscreteOperator A = build_operator(g, OperatorKind::Forward);
  const StateVector u0 = initial_state(c, g);
  if (c.simulate.source == "smooth") return evolve_forced(A, u0, smooth_source(g, c.time.T), 0.0, c.time.T, c.time.nt);
  return evolve(A, u0, 0.0, c.time.T, c.time.nt);
}

}  // namespace detail

// ------------------------------------------------------------------ simulate

inline RunReport cmd_simulate(const ExperimentConfig& c, int threads = 1) {
  (void)threads;
  RunReport r = detail::start_report(c);
  const auto& s = c.simulate;
  const GridPtr g = build_grid(c.grid.L, c.grid.n);
  const DiscreteOperator A = build_operator(g, OperatorKind::Forward);
  {
    detail::Stopwatch sw(r, 0);
    const Trajectory tr = detail::simulate_run(c, g);
    const Vec h1 = sobolev_squared_norms(*g, tr.states(), 1.0).cwiseSqrt();
    auto& t = r.table("trajectory", {"t", "l2_norm", "h1_norm"});
    for (int k = 0; k <= tr.steps(); ++k) t.add({tr.time(k), tr.norms()[k], h1[k]});
    const Trajectory again = detail::simulate_run(c, g);
    r.flag("rerun through the library is bit-identical", 0, again.norms() == tr.norms() && again.states() == tr.states());
    if (s.source == "none")
      r.check("unforced norm nonincreasing (max step ratio)", 2, max_step_ratio(tr), "<=", 1 + 1e-10);
    if (s.initial == "zero" && s.source == "none")
      r.check("zero data stays zero", 0, tr.states().cwiseAbs().maxCoeff(), "==", 0.0);
  }
  {
    detail::Stopwatch sw(r, 1);
    Rng rng(c.seed);
    double worst = -1e300;
    for (int k = 0; k < s.random_states; ++k) {
      const StateVector u = random_state(g, rng);
      const double q = g->h() * u.values.dot(A.apply(u.values));
      worst = std::max(worst, q / (g->h() * u.values.squaredNorm()));
    }
    r.check("max (Au,u)/|u|^2 over random states", 1, worst, "<=", 1e-12,
            std::to_string(s.random_states) + " states, n = " + std::to_string(c.grid.n));
    auto& t = r.table("energy_residual", {"n", "h", "residual", "order"});
    std::vector<double> hs, res;
    for (int n : s.residual_n_list) {
      const GridPtr gn = build_grid(c.grid.L, n);
      hs.push_back(gn->h());
      res.push_back(std::abs(dissipativity_residual(build_operator(gn, OperatorKind::Forward), detail::domain_field(gn))));
    }
    double worst_order = 1e300;
    for (std::size_t k = 0; k < res.size(); ++k) {
      double order = std::nan("");
      if (k > 0) {
        order = std::log(res[k - 1] / res[k]) / std::log(hs[k - 1] / hs[k]);
        worst_order = std::min(worst_order, order);
      }
      t.add({static_cast<double>(s.residual_n_list[k]), hs[k], res[k], order});
    }
    r.check("energy identity residual order under refinement", 1, worst_order, ">=", 1.0,
            "smallest observed order between consecutive grids");
  }
  {
    detail::Stopwatch sw(r, 2);
    Rng rng(c.seed + 1);
    double worst = 0;
    for (int k = 0; k < 5; ++k) worst = std::max(worst, max_step_ratio(evolve(A, random_state(g, rng), 0.0, c.time.T, c.time.nt)));
    r.check("unforced random states: max step ratio", 2, worst, "<=", 1 + 1e-10);

    const GridPtr ge = build_grid(c.grid.L, s.expm_n);
    const DiscreteOperator Ae = build_operator(ge, OperatorKind::Forward);
    const StateVector u0 = random_state(ge, rng);
    const Vec exact = expm_endpoint(Ae, u0.values, c.time.T);
    auto& t = r.table("expm_convergence", {"nt", "dt", "relative_error", "error_ratio"});
    std::vector<double> err;
    for (int nt : s.expm_nt_list) {
      const Trajectory tr = evolve(Ae, u0, 0.0, c.time.T, nt);
      err.push_back((tr.values(nt) - exact).norm() / exact.norm());
      t.add({static_cast<double>(nt), c.time.T / nt, err.back(),
             err.size() > 1 ? err[err.size() - 2] / err.back() : std::nan("")});
    }
    r.check("expm oracle relative error at finest step", 2, err.back(), "<=", 1e-3,
            "n = " + std::to_string(s.expm_n) + ", nt = " + std::to_string(s.expm_nt_list.back()));
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 1; k < err.size(); ++k) {
      lo = std::min(lo, err[k - 1] / err[k]);
      hi = std::max(hi, err[k - 1] / err[k]);
    }
    r.check("expm error ratio under dt halving, smallest", 2, lo, ">=", 3.0);
    r.check("expm error ratio under dt halving, largest", 2, hi, "<=", 5.0);
  }
  {
    detail::Stopwatch sw(r, 8);
    auto& t = r.table("weighted_contraction", {"b", "X", "max_ratio_growth_weight", "max_ratio_decay_weight"});
    for (double b : s.b_list) {
      if (b == 0) continue;
      const GridPtr gb = half_line_grid(b, s.weighted_n);
      const auto u0 = StateVector::sample(gb, [](double x) { return x * std::exp(-(x - 2) * (x - 2)); });
      const auto w = weighted_contraction_check(b, u0, c.time.T, s.weighted_nt);
      t.add({b, gb->right(), w.max_ratio_growth_weight, w.max_ratio_decay_weight});
      r.check("growth-weight contraction, b = " + detail::fmt(b), 8, w.max_ratio_growth_weight, "<=", 1 + 1e-8);
    }
  }
  {
    detail::Stopwatch sw(r, 9);
    auto& t = r.table("smoothing", {"theta", "n", "source_norm", "solution_norm", "ratio"});
    for (double th : s.thetas) {
      std::vector<double> ratios;
      for (int n : s.smoothing_n_list) {
        const GridPtr gn = build_grid(c.grid.L, n);
        const GainReport gr = smoothing_gain(th, detail::smooth_source(gn, c.time.T), gn, c.time.T, n);
        ratios.push_back(gr.ratio);
        t.add({th, static_cast<double>(n), gr.source_norm, gr.solution_norm, gr.ratio});
      }
      double spread = 0;
      for (double v : ratios) spread = std::max(spread, std::abs(v / ratios.front() - 1));
      r.check("smoothing ratio drift across grids, theta = " + detail::fmt(th), 9, spread, "<=", 0.10,
              "max |ratio(n)/ratio(n0) - 1|");
    }
  }
  return r;
}

// ------------------------------------------------------------- observability

inline RunReport cmd_observability(const ExperimentConfig& c, int threads = 1) {
  RunReport r = detail::start_report(c);
  const auto& o = c.observability;
  detail::Stopwatch sw(r, 5);
  std::vector<Interval> omegas{c.omega.interval()};
  for (double l : c.omega.l_list) omegas.push_back({-l, l});

  auto& tc = r.table("constants", {"n", "tau", "C_obs", "iterations", "converged"});
  auto& tn = r.table("nested_omega", {"n", "l", "C_obs"});
  std::vector<double> reference;
  double min_c = 1e300;
  bool all_converged = true, nested_ok = true;
  std::string nested_detail;
  for (int n : o.n_list) {
    const GridPtr g = build_grid(c.grid.L, n);
    const auto grams = assemble_gramians(g, c.time.T, n, omegas, threads);
    for (double tau : o.taus) {
      const auto res = observability_constant(grams.front(), tau);
      tc.add({static_cast<double>(n), tau, res.C_obs, static_cast<double>(res.iterations), res.converged ? 1.0 : 0.0});
      min_c = std::min(min_c, res.C_obs);
      all_converged = all_converged && res.converged;
    }
    const auto ref = observability_constant(grams.front(), o.reference_tau);
    reference.push_back(ref.C_obs);
    min_c = std::min(min_c, ref.C_obs);
    all_converged = all_converged && ref.converged;
    if (n == o.n_list.back()) {
      auto& tw = r.table("worst_initial_state", {"x", "u0"});
      for (int i = 0; i < n; ++i) tw.add({g->x(i), ref.worst_u0[i]});
      // Sampled quotients under the same floor stay below the constant.
      Rng rng(c.seed);
      double worst = 0;
      const Gramian& gr = grams.front();
      for (int k = 0; k < o.sample_trials; ++k) {
        const Vec u = rng.normal_vector(n);
        worst = std::max(worst, std::sqrt(u.dot(gr.G_full * u) / (u.dot(gr.G_omega * u) + ref.floor * u.squaredNorm())));
      }
      r.check("random initial states below C_obs (max quotient / C_obs)", 0, worst / ref.C_obs, "<=", 1 + 1e-8,
              std::to_string(o.sample_trials) + " samples");
    }
    // Chain (-l, l) for increasing l: the constant must not grow.
    std::vector<double> chain;
    for (std::size_t k = 1; k < omegas.size(); ++k) {
      const auto rk = observability_constant(grams[k], o.reference_tau);
      chain.push_back(rk.C_obs);
      tn.add({static_cast<double>(n), c.omega.l_list[k - 1], rk.C_obs});
      all_converged = all_converged && rk.converged;
      if (chain.size() > 1 && chain.back() > chain[chain.size() - 2]) {
        nested_ok = false;
        nested_detail += "n = " + std::to_string(n) + " l = " + detail::fmt(c.omega.l_list[k - 1]) + "; ";
      }
    }
  }
  r.check("min C_obs over all rows", 5, min_c, ">=", 1.0);
  r.flag("every eigen solve converged", 5, all_converged);
  if (reference.size() >= 2) {
    const double a = reference[reference.size() - 2], b = reference.back();
    r.check("relative C_obs change between the two finest grids", 5, std::abs(b - a) / a, "<", 0.05,
            "n = " + std::to_string(o.n_list[o.n_list.size() - 2]) + " -> " + std::to_string(o.n_list.back()) +
                ", tau = " + detail::fmt(o.reference_tau));
  }
  if (omegas.size() > 2)
    r.flag("enlarging omega never increases C_obs", 5, nested_ok, nested_detail.empty() ? "monotone" : nested_detail);

  {
    const GridPtr g = build_grid(c.grid.L, o.oracle_n);
    const auto gr = assemble_gramians(g, c.time.T, o.oracle_nt, c.omega.interval());
    const auto lib = observability_constant(gr, o.reference_tau, EigenMethod::Iterative);
    const auto dense = dense_observability(g, c.time.T, o.oracle_nt, c.omega.interval(), o.reference_tau);
    r.check("C_obs vs dense generalized-eigen oracle (relative)", 5, std::abs(lib.C_obs - dense.C_obs) / dense.C_obs,
            "<=", 1e-8, "n = " + std::to_string(o.oracle_n) + ", block iteration vs dense");
    const double h = g->h();
    const auto full = assemble_gramians(g, c.time.T, o.oracle_nt, Interval{-c.grid.L + h / 2, c.grid.L - h / 2});
    r.check("full observation region gives C_obs = 1 (deviation)", 0,
            std::abs(observability_constant(full, 0.0).C_obs - 1), "<=", 1e-10);
  }
  return r;
}

// ------------------------------------------------------------------ carleman

inline RunReport cmd_carleman(const ExperimentConfig& c, int threads = 1) {
  RunReport r = detail::start_report(c);
  const auto& k = c.carleman;
  const double L = c.grid.L, T = c.time.T;
  std::optional<WeightPsi> built;
  try {
    built = build_psi(L, c.omega.interval());
  } catch (const ConstructionFailure& e) {
    r.flag("weight construction: " + e.condition(), 0, false, e.what());
    return r;
  }
  const WeightPsi& psi = *built;
  for (const auto& pc : check_psi(psi)) r.flag("weight: " + pc.condition, 0, pc.ok, pc.detail);
  {
    auto& t = r.table("weight_profile", {"x", "psi", "psi_x", "psi_xx", "psi_xxx"});
    for (int i = 0; i <= 200; ++i) {
      const double x = -L + 2 * L * i / 200;
      t.add({x, psi(x), psi(x, 1), psi(x, 2), psi(x, 3)});
    }
  }

  double s_star = 0;
  {
    detail::Stopwatch sw(r, 3);
    Rng rng(c.seed);
    std::array<double, 8> worst{};
    double worst_split = 0;
    for (int i = 0; i < k.coefficient_samples; ++i) {
      const double s = rng.uniform(0.1, 50), t = T * rng.uniform(0.01, 0.99), x = rng.uniform(-L, L);
      const auto b = coefficient_bundle({s, T, psi}, t, x);
      const auto gaps = b.relative_gaps();
      for (int j = 0; j < 8; ++j) worst[j] = std::max(worst[j], gaps[j]);
      worst_split = std::max(worst_split, std::abs(b.closed.D - b.lead - b.D1) / b.scale.D);
    }
    auto& t = r.table("dual_path_gaps", {"coefficient", "max_relative_gap"});
    for (int j = 0; j < 8; ++j) t.add({static_cast<double>(j), worst[j]});
    r.check("dual-path coefficient agreement (max relative gap)", 3, *std::max_element(worst.begin(), worst.end()),
            "<=", 1e-10, std::to_string(k.coefficient_samples) + " samples; coefficient rows A..H");
    r.check("D equals leading term plus remainder (relative)", 0, worst_split, "<=", 1e-12);

    const SStarReport ss = find_s_star(psi, T, k.scan_nx, k.scan_nt, threads);
    s_star = ss.s_star;
    auto& ts = r.table("positivity_scans", {"s", "ok", "min_lead", "min_D", "min_G", "min_H"});
    for (std::size_t j = 0; j < ss.scans.size(); ++j) {
      const auto& sc = ss.scans[j];
      ts.add({ss.s_checked[j], sc.ok ? 1.0 : 0.0, sc.min_lead, sc.min_D, sc.min_G, sc.min_H});
    }
    r.flag("D, G, H positivity for every checked s >= s*", 3, ss.all_ok, "s* = " + detail::fmt(s_star));
    const auto below = scan_positivity({0.99 * s_star, T, psi}, scan_mesh(psi, T, k.scan_nx, k.scan_nt), threads);
    r.flag("positivity fails just below s*", 0, !below.ok, below.first_failure);
  }
  {
    detail::Stopwatch sw(r, 0);
    const auto we = verify_weight_estimates({s_star, T, psi}, k.weight_samples, c.seed);
    auto& t = r.table("weight_estimates", {"quantity", "fit", "bound"});
    t.add({1, we.K1_fit, we.K1_bound});
    t.add({2, we.K2_fit, we.K2_bound});
    for (int j = 0; j < 7; ++j) t.add({10.0 + j, we.C_fit[j], we.C_bound[j]});
    r.check("weight derivative estimates (max violation)", 0, we.max_violation, "<=", 0.0);
  }
  {
    detail::Stopwatch sw(r, 4);
    std::vector<double> svals;
    if (k.s) svals = *k.s;
    else
      for (double m : k.multiples) svals.push_back(m * s_star);
    const GridPtr g = build_grid(L, c.grid.n);
    const DiscreteOperator A = build_operator(g, OperatorKind::Forward);
    Rng rng(c.seed + 1);
    std::vector<Vec> u0s;
    for (int i = 0; i < k.trials; ++i) u0s.push_back(rng.normal_vector(g->n()));
    const int ns = static_cast<int>(svals.size());
    Mat ratio(k.trials, ns), g5(k.trials, ns), hat(k.trials, ns);
    parallel_chunks(k.trials, threads, [&](int b, int e) {
      for (int i = b; i < e; ++i) {
        const Trajectory tr = evolve(A, StateVector(u0s[i], g), 0.0, T, c.time.nt);
        for (int j = 0; j < ns; ++j) {
          const CarlemanParams p{svals[j], T, psi};
          ratio(i, j) = carleman_ratio(tr, p).ratio;
          const auto w = weighted_observability_ineq(tr, p);
          g5(i, j) = w.ratio.ratio;
          hat(i, j) = w.max_hat_over_check;
        }
      }
    });
    auto& t = r.table("ratio_sweep", {"s", "max_ratio", "min_ratio", "max_weighted_obs_ratio", "max_hat_over_check"});
    double bmax = 0, bmin = 1e300, hat_max = 0;
    bool finite = true;
    for (int j = 0; j < ns; ++j) {
      const double mx = ratio.col(j).maxCoeff();
      t.add({svals[j], mx, ratio.col(j).minCoeff(), g5.col(j).maxCoeff(), hat.col(j).maxCoeff()});
      finite = finite && ratio.col(j).allFinite() && g5.col(j).allFinite();
      bmax = std::max(bmax, mx);
      bmin = std::min(bmin, mx);
      hat_max = std::max(hat_max, hat.col(j).maxCoeff());
    }
    r.flag("all ratios finite", 4, finite);
    r.check("spread of the ratio bound over s (max/min)", 4, bmax / bmin, "<", 10.0,
            std::to_string(k.trials) + " trials, " + std::to_string(ns) + " values of s");
    r.check("weighted observability: sup phi_hat/phi_check", 0, hat_max, "<", 4.0 / 3.0);
    double scale_gap = 0;
    const Trajectory t1 = evolve(A, StateVector(u0s.front(), g), 0.0, T, c.time.nt);
    const Trajectory t5 = evolve(A, StateVector(5.0 * u0s.front(), g), 0.0, T, c.time.nt);
    for (double s : svals) {
      const CarlemanParams p{s, T, psi};
      scale_gap = std::max(scale_gap, std::abs(carleman_ratio(t5, p).ratio / carleman_ratio(t1, p).ratio - 1));
    }
    r.check("ratio invariance under u0 -> 5 u0", 4, scale_gap, "<=", 1e-10);
  }
  return r;
}

// ------------------------------------------------------------------- control

inline RunReport cmd_control(const ExperimentConfig& c, int threads = 1) {
  (void)threads;
  RunReport r = detail::start_report(c);
  const auto& k = c.control;
  const GridPtr g = build_grid(c.grid.L, c.grid.n);
  auto has = [&](const char* m) { return std::find(k.modes.begin(), k.modes.end(), m) != k.modes.end(); };
  auto problem = [&](const GridPtr& grid, const Vec& u0) {
    ControlProblem p;
    p.grid = grid;
    p.T = c.time.T;
    p.nt = c.time.nt;
    p.omega = c.omega.interval();
    p.u0 = u0;
    p.tau = k.tau;
    p.tol = k.cg_tol;
    p.max_iter = k.cg_max;
    return p;
  };
  auto& runs = r.table("runs", {"mode", "iterations", "endpoint_error", "control_norm", "duality_gap", "converged"});
  auto history = [&](const std::string& name, const ControlResult& res) {
    auto& t = r.table(name, {"iteration", "relative_defect"});
    for (std::size_t i = 0; i < res.defect_history.size(); ++i) t.add({static_cast<double>(i), res.defect_history[i]});
  };

  if (has("null")) {
    detail::Stopwatch sw(r, 6);
    const ControlResult res = null_control(problem(g, dirichlet_mode(g, 1).values));
    runs.add({0, static_cast<double>(res.iterations), res.endpoint_error, res.control_norm, res.duality_gap,
              res.converged ? 1.0 : 0.0});
    history("null_defect", res);
    r.check("null control: relative endpoint defect", 6, res.endpoint_error, "<=", 1e-6);
    r.check("null control: iterations", 6, res.iterations, "<=", 500);
    const Vec mask = region_mask(*g, c.omega.interval());
    double outside = 0;
    for (int i = 0; i < g->n(); ++i)
      if (mask[i] == 0) outside = std::max(outside, res.control.row(i).cwiseAbs().maxCoeff());
    r.check("null control: largest control value outside omega", 6, outside, "==", 0.0);

    const ControlResult zero = null_control(problem(g, Vec::Zero(g->n())));
    r.check("zero data: control and defect vanish", 0, zero.control.cwiseAbs().maxCoeff() + zero.endpoint_error, "==",
            0.0);

    const GridPtr go = build_grid(c.grid.L, k.oracle_n);
    ControlProblem po = problem(go, dirichlet_mode(go, 1).values);
    po.nt = k.oracle_n;
    po.tau = 1e-6;
    po.tol = 1e-13;
    po.max_iter = 400;
    const ControlResult ro = null_control(po);
    const Mat dense = dense_null_control(po);
    r.check("null control vs dense saddle solve (relative)", 6, (ro.control - dense).norm() / dense.norm(), "<=", 1e-6,
            "n = " + std::to_string(k.oracle_n) + ", tau = 1e-6");
  }
  if (has("steering")) {
    detail::Stopwatch sw(r, 0);
    ControlProblem p = problem(g, dirichlet_mode(g, 1).values);
    p.uT = dirichlet_mode(g, 2).values;
    const ControlResult res = steering_control(p);
    runs.add({1, static_cast<double>(res.iterations), res.endpoint_error, res.control_norm, res.duality_gap,
              res.converged ? 1.0 : 0.0});
    history("steering_defect", res);
    r.check("steering: relative endpoint defect", 0, res.endpoint_error, "<=", k.cg_tol);
  }
  if (has("cutoff")) {
    detail::Stopwatch sw(r, 7);
    const auto& cu = c.cutoff;
    const GridPtr gc = build_grid(c.grid.L, cu.n);
    const ControlSettings cs{c.omega.interval(), k.tau, k.cg_tol, k.cg_max};
    const StateVector u0 = dirichlet_mode(gc, 1), uT = dirichlet_mode(gc, 2);
    const double ep = eps_prime(c);
    const ConstructionResult res = theorem_1_1_trajectory(u0, uT, cu.eps, ep, cu.T, cu.nt, cs);
    auto& t = r.table("cutoff_trajectory", {"t", "l2_norm", "cutoff", "corrector_norm"});
    for (int i = 0; i <= res.u.steps(); ++i)
      t.add({res.u.time(i), res.u.norms()[i], res.cutoff(res.u.time(i)), res.corrector.v.norms()[i]});
    r.check("cutoff construction: initial defect", 7, res.initial_defect, "==", 0.0);
    r.check("cutoff construction: terminal defect vs S(T)uT", 7, res.terminal_defect, "<=", 1e-4);
    r.check("cutoff construction: deviation from free run for t <= eps'", 7, res.early_deviation, "==", 0.0);
    const ConstructionResult same = theorem_1_1_trajectory(u0, u0, cu.eps, ep, cu.T, cu.nt, cs);
    r.check("cutoff construction with uT = u0: source norm", 7, same.source_norm, "<=", 1e-8);
    runs.add({2, static_cast<double>(res.corrector.control.iterations), res.terminal_defect, res.source_norm,
              res.corrector.control.duality_gap, res.corrector.converged ? 1.0 : 0.0});
  }
  if (has("half-line")) {
    detail::Stopwatch sw(r, 8);
    const auto& w = c.half_line;
    const GridPtr gh = build_interval_grid(0.0, w.X, w.n);
    const auto u0 = StateVector::sample(gh, [](double x) { return x * x * std::exp(-x); });
    const auto uT = StateVector::sample(gh, [](double x) { return std::sin(x) * x * std::exp(-0.5 * x); });
    const ControlSettings cs{{w.omega_lo, w.omega_hi}, k.tau, k.cg_tol, w.cg_max};
    const ConstructionResult res = theorem_1_2_trajectory(u0, uT, w.b, w.eps, w.T, w.nt, cs);
    auto& t = r.table("half_line_trajectory", {"t", "l2_norm"});
    for (int i = 0; i <= res.u.steps(); ++i) t.add({res.u.time(i), res.u.norms()[i]});
    r.check("half-line construction: initial defect", 8, res.initial_defect, "<=", 1e-3);
    r.check("half-line construction: weighted terminal defect", 8, res.terminal_defect, "<=", 1e-3);
    runs.add({3, static_cast<double>(res.corrector.control.iterations), res.terminal_defect, res.source_norm,
              res.corrector.control.duality_gap, res.corrector.converged ? 1.0 : 0.0});
  }
  return r;
}

// ------------------------------------------------------------------ dispatch

inline RunReport run_experiment(const ExperimentConfig& c, int threads = 1) {
  require(threads >= 1, "threads must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  if (c.experiment == "simulate") r = cmd_simulate(c, threads);
  else if (c.experiment == "observability") r = cmd_observability(c, threads);
  else if (c.experiment == "carleman") r = cmd_carleman(c, threads);
  else if (c.experiment == "control") r = cmd_control(c, threads);
  else throw InvalidArgument("unknown experiment " + c.experiment);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

struct SuiteReport {
  std::vector<RunReport> runs;
  Json aggregate;
  bool passed() const {
    for (const auto& r : runs)
      if (!r.passed()) return false;
    return true;
  }
};

inline std::vector<std::filesystem::path> config_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InvalidArgument("reproduce-all: not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".toml") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InvalidArgument("reproduce-all: no .toml configs in " + dir.string());
  return files;
}

// Every config is validated before the first experiment starts.
inline SuiteReport cmd_reproduce_all(const std::filesystem::path& dir, const std::filesystem::path& out,
                                     std::optional<std::uint64_t> seed = std::nullopt, int threads = 1,
                                     std::ostream* log = nullptr) {
  std::vector<ExperimentConfig> configs;
  for (const auto& f : config_files(dir)) {
    configs.push_back(load_config(f));
    if (seed) configs.back().seed = *seed;
  }
  for (std::size_t i = 0; i < configs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (configs[i].name == configs[j].name) throw ConfigError(configs[i].source_path, "duplicate name " + configs[i].name);
  SuiteReport s;
  Json entries = Json::array();
  for (const auto& c : configs) {
    s.runs.push_back(run_experiment(c, threads));
    const RunReport& r = s.runs.back();
    write_report(r, out);
    if (log) *log << r.name << ": " << (r.passed() ? "pass" : "FAIL") << " (" << detail::fmt(r.wall_seconds) << " s)\n";
    Json e;
    e["name"] = r.name;
    e["experiment"] = r.experiment;
    e["config"] = c.source_path;
    e["input_hash"] = r.input_hash;
    e["report"] = r.name + ".json";
    e["passed"] = r.passed();
    Json failed = Json::array();
    for (const auto& ch : r.checks)
      if (!ch.passed) failed.push_back(ch.name);
    e["failed_checks"] = failed;
    entries.push_back(e);
  }
  s.aggregate["name"] = "reproduce-all";
  s.aggregate["runs"] = entries;
  s.aggregate["input_hash"] = git_blob_hash(entries.dump());
  s.aggregate["passed"] = s.passed();
  std::filesystem::create_directories(out);
  write_file(out / "reproduce-all.json", s.aggregate.dump(2) + "\n");
  return s;
}

}  // namespace kdvb::lab
