#pragma once

#include "hydec/lp.hpp"
#include "hydec/model.hpp"
#include "hydec/scenario.hpp"

namespace hydec {

/// Affine lower bound on an electricity Bellman function over (P, Q).
struct Cut {
    double intercept = 0.0;  // EUR
    double slope_p = 0.0;    // EUR/kWh
    double slope_q = 0.0;    // EUR/kWh

    double at(double p, double q) const { return intercept + slope_p * p + slope_q * q; }
};

/// Polyhedral lower approximations of the electricity Bellman functions,
/// one cut list per stage; the terminal stage carries the two pieces of the
/// surrogate final cost exactly.
struct CutSet {
    int horizon = 0;
    std::vector<std::vector<Cut>> stage_cuts;  // index h = 0..T; stage_cuts[h] bounds V_h
    std::vector<double> theta_floor;           // per h, safe lower bound on V_h
    std::vector<double> lambda;                // multiplier the cuts were built for

    double evaluate(int h, double p, double q) const {
        double v = theta_floor.at(static_cast<std::size_t>(h));
        for (const Cut& c : stage_cuts[static_cast<std::size_t>(h)]) v = std::max(v, c.at(p, q));
        return v;
    }
};

inline double grid_floor(const PlantSpec& plant, const NoiseModel& noise) {
    return -(plant.ppa_cap + noise.pv_max());
}

/// Safe lower bound on the stage-h electricity objective over all feasible
/// controls; used to keep the epigraph variables bounded before any cut of a
/// stage exists.
inline double stage_objective_floor(int h, const std::vector<double>& lambda,
                                    const PlantSpec& plant, const NoiseModel& noise) {
    const double lam = lambda.at(static_cast<std::size_t>(h));
    const double e_max = max_consumption(plant);
    const double eg_lo = grid_floor(plant, noise);
    const double c_g = plant.c_grid[static_cast<std::size_t>(h)];
    const double ppa_term = std::min(0.0, (plant.c_ppa - lam) * plant.ppa_cap);
    const double grid_term = std::min({-lam * eg_lo, 0.0, (c_g - lam) * e_max});
    const auto& pv = noise.at(h).pv;
    const double pv_term = lam >= 0.0 ? -lam * pv.max_outcome() : -lam * pv.min_outcome();
    return ppa_term + grid_term + pv_term;
}

/// Terminal surrogate pieces plus per-stage objective floors for a given
/// multiplier; stages 1..T-1 start without cuts.
inline CutSet init_cut_set(const std::vector<double>& lambda, const PlantSpec& plant,
                           const NoiseModel& noise) {
    require_betas_admissible(plant.beta1, plant.beta2, plant);
    const int T = plant.horizon;
    CutSet cs;
    cs.horizon = T;
    cs.lambda = lambda;
    cs.stage_cuts.assign(static_cast<std::size_t>(T) + 1, {});
    cs.stage_cuts[static_cast<std::size_t>(T)] = {
        Cut{-plant.c_subsidy, 0.0, plant.beta1},
        Cut{-plant.c_subsidy, 0.0, plant.beta2},
    };
    cs.theta_floor.assign(static_cast<std::size_t>(T) + 1, 0.0);
    cs.theta_floor[static_cast<std::size_t>(T)] =
        plant.beta1 * plant.q_lower() - plant.c_subsidy;
    for (int h = T - 1; h >= 0; --h)
        cs.theta_floor[static_cast<std::size_t>(h)] =
            cs.theta_floor[static_cast<std::size_t>(h) + 1] +
            stage_objective_floor(h, lambda, plant, noise);
    return cs;
}

/// One-stage deterministic equivalent of the electricity allocation problem
/// at hour h: the PPA draw is shared across the stage's PV outcomes, the
/// recourse variables and epigraph are per outcome.
struct StageLp {
    LinearProgram lp;
    int row_ppa_cap = -1;  // e_ppa <= p_in
    struct CutRow {
        int row;
        double slope_p, slope_q;
    };
    std::vector<CutRow> cut_rows;
    int var_e_ppa = -1;
    std::vector<int> var_e_grid, var_e_n, var_e_r, var_theta;
    std::vector<std::pair<int, int>> basis_hint;
};

inline StageLp build_stage_problem(int h, const std::vector<double>& lambda, double p_in,
                                   double q_in, const CutSet& cuts, const PlantSpec& plant,
                                   const NoiseModel& noise) {
    const double lam = lambda.at(static_cast<std::size_t>(h));
    const double c_g = plant.c_grid.at(static_cast<std::size_t>(h));
    const double e_max = max_consumption(plant);
    const double eg_lo = grid_floor(plant, noise);
    const auto& pv = noise.at(h).pv;
    const std::size_t n_out = pv.outcomes.size();
    const auto& next_cuts = cuts.stage_cuts.at(static_cast<std::size_t>(h) + 1);
    const double floor_next = cuts.theta_floor.at(static_cast<std::size_t>(h) + 1);

    StageLp sp;
    LinearProgram& lp = sp.lp;
    sp.var_e_ppa = lp.add_variable(0.0, kInf, plant.c_ppa - lam);
    for (std::size_t w = 0; w < n_out; ++w) {
        const double pr = pv.probs[w];
        sp.var_e_grid.push_back(lp.add_variable(eg_lo, kInf, -lam * pr));
        sp.var_e_n.push_back(lp.add_variable(0.0, kInf, c_g * pr));
        sp.var_e_r.push_back(lp.add_variable(-kInf, kInf, 0.0));
        sp.var_theta.push_back(lp.add_variable(floor_next, kInf, pr));
        lp.constant += -lam * pr * pv.outcomes[w];
    }
    sp.row_ppa_cap = lp.add_row(RowSense::LE, p_in, {{sp.var_e_ppa, 1.0}});
    for (std::size_t w = 0; w < n_out; ++w) {
        lp.add_row(RowSense::LE, e_max - pv.outcomes[w],
                   {{sp.var_e_ppa, 1.0}, {sp.var_e_grid[w], 1.0}});
        lp.add_row(RowSense::LE, 0.0, {{sp.var_e_grid[w], 1.0}, {sp.var_e_n[w], -1.0}});
        lp.add_row(RowSense::LE, e_max, {{sp.var_e_r[w], 1.0}});
        lp.add_row(RowSense::LE, pv.outcomes[w], {{sp.var_e_r[w], 1.0}, {sp.var_e_ppa, -1.0}});
        int best_row = -1;
        double best_val = -kInf;
        for (const Cut& c : next_cuts) {
            const double rhs = c.intercept + c.slope_p * p_in + c.slope_q * q_in;
            const int row = lp.add_row(
                RowSense::GE, rhs,
                {{sp.var_theta[w], 1.0},
                 {sp.var_e_ppa, c.slope_p},
                 {sp.var_e_n[w], -c.slope_q * (1.0 - plant.p)},
                 {sp.var_e_r[w], c.slope_q * plant.p}});
            sp.cut_rows.push_back({row, c.slope_p, c.slope_q});
            if (rhs > best_val) {
                best_val = rhs;
                best_row = row;
            }
        }
        if (best_row >= 0 && best_val > floor_next)
            sp.basis_hint.emplace_back(best_row, sp.var_theta[w]);
    }
    return sp;
}

/// Allocation decided at one stage: the shared PPA draw and the recourse for
/// each PV outcome.
struct StageDecision {
    double value = 0.0;
    double e_ppa = 0.0;
    std::vector<double> e_grid;  // per outcome
};

inline StageDecision solve_stage_lp(const StageLp& sp, bool use_hint = true) {
    LpOptions opt;
    if (use_hint) opt.basis_hint = sp.basis_hint;
    LpSolution sol = solve_lp(sp.lp, opt);
    if (sol.status != LpStatus::Optimal && use_hint) sol = solve_lp(sp.lp);
    if (sol.status != LpStatus::Optimal)
        throw SolverError("stage LP not optimal: " + sol.note);
    StageDecision d;
    d.value = sol.objective;
    d.e_ppa = sol.x[static_cast<std::size_t>(sp.var_e_ppa)];
    for (int v : sp.var_e_grid) d.e_grid.push_back(sol.x[static_cast<std::size_t>(v)]);
    return d;
}

struct SddpResult {
    CutSet cuts;
    double lower_bound = 0.0;
    std::vector<double> bound_history;  // one entry per iteration
};

/// SDDP on the electricity allocation problem. Each iteration samples one PV
/// path forward, then adds one cut per stage on the way back from the duals
/// of the stage problems; the root value at (ppa_cap, 0) is the lower bound.
inline SddpResult sddp_solve(const std::vector<double>& lambda, const PlantSpec& plant,
                             const NoiseModel& noise, int iterations, std::uint64_t seed) {
    plant.validate();
    noise.validate();
    const int T = plant.horizon;
    if (static_cast<int>(lambda.size()) != T)
        throw ConfigError("multiplier must have one entry per hour");

    SddpResult res;
    res.cuts = init_cut_set(lambda, plant, noise);
    const double p_frac = plant.p;
    const double e_max = max_consumption(plant);

    auto solve_at = [&](int h, double p, double q) {
        StageLp sp = build_stage_problem(h, lambda, p, q, res.cuts, plant, noise);
        try {
            return std::make_pair(solve_stage_lp(sp), std::move(sp));
        } catch (const SolverError& err) {
            std::ostringstream os;
            os << err.what() << " (stage " << h << ", p=" << p << ", q=" << q << ")";
            throw SolverError(os.str());
        }
    };

    auto add_cut = [&](int h, double p, double q) {
        StageLp sp = build_stage_problem(h, lambda, p, q, res.cuts, plant, noise);
        LpOptions opt;
        opt.basis_hint = sp.basis_hint;
        LpSolution sol = solve_lp(sp.lp, opt);
        if (sol.status != LpStatus::Optimal) sol = solve_lp(sp.lp);
        if (sol.status != LpStatus::Optimal) {
            std::ostringstream os;
            os << "backward stage LP not optimal at stage " << h << ": " << sol.note;
            throw SolverError(os.str());
        }
        Cut c;
        c.slope_p = sol.duals[static_cast<std::size_t>(sp.row_ppa_cap)];
        c.slope_q = 0.0;
        for (const auto& cr : sp.cut_rows) {
            const double y = sol.duals[static_cast<std::size_t>(cr.row)];
            c.slope_p += y * cr.slope_p;
            c.slope_q += y * cr.slope_q;
        }
        c.intercept = sol.objective - c.slope_p * p - c.slope_q * q;
        res.cuts.stage_cuts[static_cast<std::size_t>(h)].push_back(c);
    };

    std::vector<std::pair<double, double>> visited(static_cast<std::size_t>(T));
    for (int it = 0; it < iterations; ++it) {
        std::mt19937_64 rng(split_seed(seed, static_cast<std::uint64_t>(it)));
        double p = plant.ppa_cap, q = 0.0;
        for (int h = 0; h < T; ++h) {
            visited[static_cast<std::size_t>(h)] = {p, q};
            auto [dec, sp] = solve_at(h, p, q);
            const auto& pvm = noise.at(h).pv;
            const std::size_t w = pvm.sample_index(uniform01(rng));
            const double e_grid = dec.e_grid[w];
            const double e_r = std::min(e_max, dec.e_ppa + pvm.outcomes[w]);
            p -= dec.e_ppa;
            q += (1.0 - p_frac) * positive_part(e_grid) - p_frac * e_r;
        }
        for (int h = T - 1; h >= 1; --h)
            add_cut(h, visited[static_cast<std::size_t>(h)].first,
                    visited[static_cast<std::size_t>(h)].second);
        auto [root, sp0] = solve_at(0, plant.ppa_cap, 0.0);
        res.lower_bound = root.value;
        res.bound_history.push_back(root.value);
    }
    if (iterations == 0) {
        auto [root, sp0] = solve_at(0, plant.ppa_cap, 0.0);
        res.lower_bound = root.value;
        res.bound_history.push_back(root.value);
    }
    return res;
}

// --- fast polyhedral stage evaluation (no LP) ---------------------------

/// Solves the same stage problem as the LP, exploiting that for fixed PPA
/// draw the recourse reduces to a one-dimensional convex piecewise-linear
/// minimization over the grid draw along the cut envelope.
class AllocationEvaluator {
  public:
    AllocationEvaluator(const CutSet& cuts, const std::vector<double>& lambda,
                        const PlantSpec& plant, const NoiseModel& noise)
        : cuts_(&cuts), lambda_(lambda), plant_(&plant), noise_(&noise) {
        e_max_ = max_consumption(plant);
        eg_lo_ = grid_floor(plant, noise);
        const int T = plant.horizon;
        pruned_.resize(static_cast<std::size_t>(T) + 1);
        for (int h = 1; h <= T; ++h) {
            const double q_lo = -h * plant.p * e_max_;
            const double q_hi = h * (1.0 - plant.p) * e_max_;
            pruned_[static_cast<std::size_t>(h)] =
                prune_cuts(cuts.stage_cuts[static_cast<std::size_t>(h)],
                           cuts.theta_floor[static_cast<std::size_t>(h)], 0.0, plant.ppa_cap,
                           q_lo, q_hi);
        }
    }

    /// Pairwise dominance over the reachable box; affine dominance holds
    /// everywhere iff it holds at the four corners.
    static std::vector<Cut> prune_cuts(const std::vector<Cut>& cuts, double floor_value,
                                       double p_lo, double p_hi, double q_lo, double q_hi) {
        std::vector<Cut> out;
        const double corners[4][2] = {{p_lo, q_lo}, {p_lo, q_hi}, {p_hi, q_lo}, {p_hi, q_hi}};
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            bool dominated = true;
            for (auto& c : corners)
                if (cuts[i].at(c[0], c[1]) > floor_value + 1e-12) dominated = false;
            if (dominated) continue;
            dominated = false;
            for (std::size_t j = 0; j < cuts.size() && !dominated; ++j) {
                if (i == j) continue;
                bool all = true;
                for (auto& c : corners)
                    if (cuts[j].at(c[0], c[1]) < cuts[i].at(c[0], c[1]) - 1e-12) all = false;
                // strict on index breaks mutual-domination ties
                if (all && (j < i || !equal_cut(cuts[i], cuts[j]))) dominated = true;
            }
            if (!dominated) out.push_back(cuts[i]);
        }
        return out;
    }

    /// Value of the cut envelope for stage h at (p, q).
    double envelope(int h, double p, double q) const {
        double v = cuts_->theta_floor[static_cast<std::size_t>(h)];
        for (const Cut& c : pruned_[static_cast<std::size_t>(h)]) v = std::max(v, c.at(p, q));
        return v;
    }

    StageDecision solve_stage(int h, double p_in, double q_in) const {
        const double lam = lambda_[static_cast<std::size_t>(h)];
        const double c_g = plant_->c_grid[static_cast<std::size_t>(h)];
        const auto& pv = noise_->at(h).pv;
        const std::size_t n_out = pv.outcomes.size();

        auto outcome_value = [&](double e_ppa, std::size_t w, double* arg) {
            const double pvw = pv.outcomes[w];
            const double p_next = p_in - e_ppa;
            const double r = std::min(e_max_, e_ppa + pvw);
            const double q0 = q_in - plant_->p * r;
            const double ub = e_max_ - pvw - e_ppa;
            return inner_grid_min(h, lam, c_g, p_next, q0, ub, arg);
        };

        auto total = [&](double e_ppa) {
            double v = (plant_->c_ppa - lam) * e_ppa;
            for (std::size_t w = 0; w < n_out; ++w) {
                v += pv.probs[w] * (outcome_value(e_ppa, w, nullptr) - lam * pv.outcomes[w]);
            }
            return v;
        };

        // ternary search on the convex objective over [0, p_in]
        double lo = 0.0, hi = std::max(0.0, p_in);
        for (int it = 0; it < 96 && hi - lo > 1e-11 * (1.0 + p_in); ++it) {
            const double m1 = lo + (hi - lo) / 3.0;
            const double m2 = hi - (hi - lo) / 3.0;
            if (total(m1) <= total(m2)) hi = m2;
            else lo = m1;
        }
        double best_e = 0.5 * (lo + hi), best_v = total(best_e);
        for (double cand : {0.0, std::max(0.0, p_in)}) {
            const double v = total(cand);
            if (v < best_v - 1e-12 * (1.0 + std::abs(best_v))) {
                best_v = v;
                best_e = cand;
            }
        }
        StageDecision d;
        d.value = best_v;
        d.e_ppa = best_e;
        d.e_grid.resize(n_out);
        for (std::size_t w = 0; w < n_out; ++w) {
            double arg = 0.0;
            outcome_value(best_e, w, &arg);
            d.e_grid[w] = arg;
        }
        return d;
    }

  private:
    static bool equal_cut(const Cut& a, const Cut& b) {
        return a.intercept == b.intercept && a.slope_p == b.slope_p && a.slope_q == b.slope_q;
    }

    /// min over e_grid in [eg_lo, ub] of
    ///   c_g (e)_+ - lam e + W(p_next, q0 + (1-p)(e)_+)
    /// where W is the stage-(h+1) cut envelope.
    double inner_grid_min(int h, double lam, double c_g, double p_next, double q0, double ub,
                          double* argmin) const {
        const double floor_next = cuts_->theta_floor[static_cast<std::size_t>(h) + 1];
        const auto& cs = pruned_[static_cast<std::size_t>(h) + 1];
        const double coef = 1.0 - plant_->p;

        auto w_at = [&](double z) {
            double v = floor_next;
            for (const Cut& c : cs) v = std::max(v, c.intercept + c.slope_p * p_next + c.slope_q * z);
            return v;
        };

        double best_v = kInf, best_e = 0.0;
        auto consider = [&](double e, double v) {
            if (v < best_v - 1e-13 * (1.0 + std::abs(v))) {
                best_v = v;
                best_e = e;
            }
        };

        if (ub >= 0.0) {
            // positive branch: max over lines  b_i + m_i e  with
            // b_i = cut value at q0, m_i = sq_i * (1-p) + c_g - lam
            // floor line: b = floor, m = c_g - lam
            // candidates: e = 0, e = ub, envelope breakpoints in between
            lines_.clear();
            lines_.push_back({floor_next, c_g - lam});
            for (const Cut& c : cs)
                lines_.push_back({c.intercept + c.slope_p * p_next + c.slope_q * q0,
                                  c.slope_q * coef + c_g - lam});
            const double v0 = pwl_max_min(0.0, ub, &pos_arg_);
            consider(pos_arg_, v0);
        } else {
            // only exports are feasible: evaluate the negative branch at ub
            consider(ub, -lam * ub + w_at(q0));
        }
        // negative branch: -lam e + W(p_next, q0), e in [eg_lo, min(ub, 0)]
        const double neg_hi = std::min(ub, 0.0);
        const double w0 = w_at(q0);
        if (lam > 0.0) consider(neg_hi, -lam * neg_hi + w0);
        else if (lam < 0.0) consider(eg_lo_, -lam * eg_lo_ + w0);
        else consider(neg_hi, w0);

        if (argmin) *argmin = best_e;
        return best_v;
    }

    /// Minimum of max-of-lines over [lo, hi]; fills *arg with the minimizer.
    double pwl_max_min(double lo, double hi, double* arg) const {
        // The max of lines is convex; walk candidate points where the active
        // slope can change sign.
        double at_lo = -kInf, at_hi = -kInf;
        for (auto& [b, m] : lines_) {
            at_lo = std::max(at_lo, b + m * lo);
            at_hi = std::max(at_hi, b + m * hi);
        }
        double best = at_lo, best_e = lo;
        if (at_hi < best) {
            best = at_hi;
            best_e = hi;
        }
        // candidate interior points: intersections of the steepest negative
        // envelope line with every other line
        for (std::size_t i = 0; i < lines_.size(); ++i) {
            for (std::size_t j = i + 1; j < lines_.size(); ++j) {
                const auto& [bi, mi] = lines_[i];
                const auto& [bj, mj] = lines_[j];
                if (mi == mj) continue;
                if ((mi < 0.0) == (mj < 0.0)) continue;  // sign change only
                const double x = (bj - bi) / (mi - mj);
                if (x <= lo || x >= hi) continue;
                double v = -kInf;
                for (auto& [b, m] : lines_) v = std::max(v, b + m * x);
                if (v < best) {
                    best = v;
                    best_e = x;
                }
            }
        }
        *arg = best_e;
        return best;
    }

    const CutSet* cuts_;
    std::vector<double> lambda_;
    const PlantSpec* plant_;
    const NoiseModel* noise_;
    double e_max_ = 0.0, eg_lo_ = 0.0;
    std::vector<std::vector<Cut>> pruned_;
    mutable std::vector<std::pair<double, double>> lines_;
    mutable double pos_arg_ = 0.0;
};

struct AllocationStats {
    std::vector<double> supply_profile;  // E[e_ppa + e_grid + e_pv] per hour, kWh
    double mean_cost = 0.0;              // stage costs + surrogate terminal, EUR
};

/// Rolls the cut-greedy allocation policy over sampled PV paths.
inline AllocationStats simulate_allocation(const CutSet& cuts, const std::vector<double>& lambda,
                                           const PlantSpec& plant, const NoiseModel& noise,
                                           int n_paths, std::uint64_t seed) {
    if (n_paths < 1) throw ConfigError("need at least one simulation path");
    const int T = plant.horizon;
    const AllocationEvaluator eval(cuts, lambda, plant, noise);
    const double e_max = max_consumption(plant);

    std::vector<std::vector<double>> supply(static_cast<std::size_t>(n_paths));
    std::vector<double> cost(static_cast<std::size_t>(n_paths), 0.0);
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t path = lo; path < hi; ++path) {
            std::mt19937_64 rng(split_seed(seed, path));
            auto& prof = supply[path];
            prof.assign(static_cast<std::size_t>(T), 0.0);
            double p = plant.ppa_cap, q = 0.0, c = 0.0;
            for (int h = 0; h < T; ++h) {
                const auto& pvm = noise.at(h).pv;
                const std::size_t w = pvm.sample_index(uniform01(rng));
                const double pv = pvm.outcomes[w];
                StageDecision dec = eval.solve_stage(h, p, q);
                const double e_grid = dec.e_grid[w];
                prof[static_cast<std::size_t>(h)] = dec.e_ppa + e_grid + pv;
                c += plant.c_ppa * dec.e_ppa +
                     plant.c_grid[static_cast<std::size_t>(h)] * positive_part(e_grid) -
                     lambda[static_cast<std::size_t>(h)] * (dec.e_ppa + e_grid + pv);
                p -= dec.e_ppa;
                q += (1.0 - plant.p) * positive_part(e_grid) -
                     plant.p * std::min(e_max, dec.e_ppa + pv);
            }
            cost[path] = c + surrogate_final_cost(q, plant);
        }
    }, worker_threads());

    AllocationStats stats;
    stats.supply_profile.assign(static_cast<std::size_t>(T), 0.0);
    for (int path = 0; path < n_paths; ++path) {
        for (int h = 0; h < T; ++h)
            stats.supply_profile[static_cast<std::size_t>(h)] +=
                supply[static_cast<std::size_t>(path)][static_cast<std::size_t>(h)];
        stats.mean_cost += cost[static_cast<std::size_t>(path)];
    }
    for (double& v : stats.supply_profile) v /= n_paths;
    stats.mean_cost /= n_paths;
    return stats;
}

// --- constructive transformations between the two formulations ----------

struct AllocationStep {
    double e_ppa = 0.0;
    double e_grid = 0.0;
    double e_pv = 0.0;
};

struct AugmentedStep {
    double e_ppa = 0.0;
    double e_grid = 0.0;
    double e_pv = 0.0;
    double e_n = 0.0;
    double e_r = 0.0;
};

inline void require_allocation_feasible(const std::vector<AllocationStep>& seq,
                                        const PlantSpec& plant, const NoiseModel& noise,
                                        double tol = 1e-9) {
    const double e_max = max_consumption(plant);
    const double eg_lo = grid_floor(plant, noise);
    double used_ppa = 0.0;
    for (const auto& s : seq) {
        if (s.e_ppa < -tol) throw InfeasibleError("negative PPA draw");
        if (s.e_grid < eg_lo - tol) throw InfeasibleError("grid draw below its floor");
        if (s.e_ppa + s.e_grid + s.e_pv > e_max + tol)
            throw InfeasibleError("total supply exceeds the plant's maximal consumption");
        used_ppa += s.e_ppa;
    }
    if (used_ppa > plant.ppa_cap + tol) throw InfeasibleError("PPA budget exhausted");
}

inline void require_augmented_feasible(const std::vector<AugmentedStep>& seq,
                                       const PlantSpec& plant, const NoiseModel& noise,
                                       double tol = 1e-9) {
    const double e_max = max_consumption(plant);
    std::vector<AllocationStep> base;
    for (const auto& s : seq) {
        base.push_back({s.e_ppa, s.e_grid, s.e_pv});
        if (s.e_n < -tol || s.e_n < s.e_grid - tol)
            throw InfeasibleError("e_n must dominate the positive part of the grid draw");
        if (s.e_r > e_max + tol || s.e_r > s.e_ppa + s.e_pv + tol)
            throw InfeasibleError("e_r exceeds its caps");
    }
    require_allocation_feasible(base, plant, noise, tol);
}

/// Tight augmentation: e_n = (e_grid)+, e_r = min(E_max, e_ppa + e_pv).
/// The result is feasible for the linear-dynamics formulation and its
/// terminal score equals the one of the true dynamics.
inline std::vector<AugmentedStep> lift_gamma(const std::vector<AllocationStep>& seq,
                                             const PlantSpec& plant, const NoiseModel& noise) {
    require_allocation_feasible(seq, plant, noise);
    const double e_max = max_consumption(plant);
    std::vector<AugmentedStep> out;
    out.reserve(seq.size());
    for (const auto& s : seq)
        out.push_back({s.e_ppa, s.e_grid, s.e_pv, positive_part(s.e_grid),
                       std::min(e_max, s.e_ppa + s.e_pv)});
    return out;
}

/// Drops the auxiliary decisions; the terminal score of the projection is
/// recomputed with the true nonlinear dynamics.
inline std::vector<AllocationStep> project_phi(const std::vector<AugmentedStep>& seq,
                                               const PlantSpec& plant, const NoiseModel& noise) {
    require_augmented_feasible(seq, plant, noise);
    std::vector<AllocationStep> out;
    out.reserve(seq.size());
    for (const auto& s : seq) out.push_back({s.e_ppa, s.e_grid, s.e_pv});
    return out;
}

inline double allocation_terminal_q(const std::vector<AllocationStep>& seq,
                                    const PlantSpec& plant) {
    double q = 0.0;
    for (const auto& s : seq) q = step_cumulative(q, s.e_grid, s.e_ppa, s.e_pv, plant);
    return q;
}

inline double augmented_terminal_q(const std::vector<AugmentedStep>& seq,
                                   const PlantSpec& plant) {
    double q = 0.0;
    for (const auto& s : seq) q += (1.0 - plant.p) * s.e_n - plant.p * s.e_r;
    return q;
}

inline double electricity_stage_costs(const std::vector<AllocationStep>& seq,
                                      const std::vector<double>& lambda,
                                      const PlantSpec& plant) {
    double c = 0.0;
    for (std::size_t h = 0; h < seq.size(); ++h) {
        const auto& s = seq[h];
        c += plant.c_ppa * s.e_ppa + plant.c_grid.at(h) * positive_part(s.e_grid) -
             lambda.at(h) * (s.e_ppa + s.e_grid + s.e_pv);
    }
    return c;
}

}  // namespace hydec
