#pragma once

#include "hydec/model.hpp"
#include "hydec/scenario.hpp"

namespace hydec {

/// Discretization of the operational controls and the stock state.
struct OperationalGrids {
    std::vector<double> stock;                // uniform, ascending
    std::vector<double> load;                 // ascending, within [l_min, 1]
    std::vector<std::vector<double>> h_out;   // per hour, ascending from 0

    int n_stock() const { return static_cast<int>(stock.size()); }
    double stock_step() const {
        return stock.size() > 1 ? (stock.back() - stock.front()) / (stock.size() - 1.0) : 1.0;
    }

    void validate(const PlantSpec& plant) const {
        if (stock.size() < 2) throw ConfigError("stock grid needs at least two points");
        if (std::abs(stock.front() - plant.s_min) > 1e-9 ||
            std::abs(stock.back() - plant.s_max) > 1e-9)
            throw ConfigError("stock grid must span [s_min, s_max]");
        const double step = stock_step();
        for (std::size_t i = 1; i < stock.size(); ++i)
            if (std::abs(stock[i] - stock[i - 1] - step) > 1e-9 * (1.0 + step))
                throw ConfigError("stock grid must be uniform");
        if (load.empty() || load.front() < plant.electrolyser.l_min - 1e-12 ||
            load.back() > 1.0 + 1e-12)
            throw ConfigError("load grid must lie within [l_min, 1]");
        if (static_cast<int>(h_out.size()) != plant.horizon)
            throw ConfigError("need one extraction grid per hour");
    }
};

/// Default grids: uniform stock and load grids, per-hour extraction grid up
/// to 1.2x the mean demand (or an explicit cap).
inline OperationalGrids build_operational_grids(const PlantSpec& plant, const NoiseModel& noise,
                                                int n_stock, int n_load, int n_h_out,
                                                const std::vector<double>& h_out_max = {}) {
    if (noise.horizon() != plant.horizon)
        throw ConfigError("noise model and plant horizon disagree");
    OperationalGrids g;
    g.stock = linspace(plant.s_min, plant.s_max, n_stock);
    g.load = linspace(plant.electrolyser.l_min, 1.0, n_load);
    g.h_out.reserve(static_cast<std::size_t>(plant.horizon));
    for (int h = 0; h < plant.horizon; ++h) {
        double cap;
        if (!h_out_max.empty())
            cap = h_out_max.size() == 1 ? h_out_max[0] : h_out_max.at(static_cast<std::size_t>(h));
        else
            cap = 1.2 * noise.at(h).demand.mean();
        if (cap <= 0.0) g.h_out.push_back({0.0});
        else g.h_out.push_back(linspace(0.0, cap, n_h_out));
    }
    g.validate(plant);
    return g;
}

/// Tabulated Bellman values of the operational subproblem on the
/// (stock, mode) grid, with the minimizing control per cell.
struct ValueFunctionO {
    struct Choice {
        std::int8_t mode_cmd = 0;    // Mode as int
        std::int16_t load_idx = -1;  // -1 for zero load (COLD / IDLE)
        std::int16_t h_out_idx = 0;
    };

    std::vector<double> stock_grid;
    std::vector<double> load_grid;
    std::vector<std::vector<double>> h_out_grid;  // per hour
    std::vector<double> lambda;                   // multiplier the table was solved for
    // value[h][mode] has n_stock + 1 entries; the extra entry duplicates the
    // last one so interpolation never reads past the end.
    std::vector<std::array<std::vector<double>, 3>> value;   // h = 0..T
    std::vector<std::array<std::vector<Choice>, 3>> choice;  // h = 0..T-1

    int horizon() const { return static_cast<int>(choice.size()); }
    int n_stock() const { return static_cast<int>(stock_grid.size()); }

    double load_of(const Choice& c) const {
        return c.load_idx >= 0 ? load_grid[static_cast<std::size_t>(c.load_idx)] : 0.0;
    }

    double h_out_of(int h, const Choice& c) const {
        return h_out_grid[static_cast<std::size_t>(h)][static_cast<std::size_t>(c.h_out_idx)];
    }

    double value_at(int h, double s, Mode m) const {
        const auto& v = value.at(static_cast<std::size_t>(h))[static_cast<int>(m)];
        const double step = (stock_grid.back() - stock_grid.front()) / (stock_grid.size() - 1.0);
        const double pos = (s - stock_grid.front()) / step;
        const int n = n_stock();
        if (pos <= 0.0) return v[0];
        if (pos >= n - 1) return v[static_cast<std::size_t>(n) - 1];
        const int idx = static_cast<int>(pos);
        const double w = pos - idx;
        return v[static_cast<std::size_t>(idx)] * (1.0 - w) +
               v[static_cast<std::size_t>(idx) + 1] * w;
    }

    int nearest_index(double s) const {
        const double step = (stock_grid.back() - stock_grid.front()) / (stock_grid.size() - 1.0);
        const int idx = static_cast<int>(std::lround((s - stock_grid.front()) / step));
        return std::clamp(idx, 0, n_stock() - 1);
    }
};

namespace detail {

/// One admissible (mode command, load) combination with its
/// hour-independent quantities for a fixed previous mode.
struct OpControlEval {
    Mode cmd = Mode::Cold;
    std::int16_t load_idx = -1;
    double h_prod = 0.0;
    double energy = 0.0;  // electrolyser + compressor, kWh
};

inline std::vector<OpControlEval> enumerate_mode_loads(const PlantSpec& plant,
                                                       const OperationalGrids& grids,
                                                       Mode m_prev) {
    std::vector<OpControlEval> out;
    for (Mode cmd : kModes) {
        const int n_load = cmd == Mode::Start ? static_cast<int>(grids.load.size()) : 1;
        for (int li = 0; li < n_load; ++li) {
            const double load = cmd == Mode::Start ? grids.load[static_cast<std::size_t>(li)] : 0.0;
            OpControlEval ev;
            ev.cmd = cmd;
            ev.load_idx = cmd == Mode::Start ? static_cast<std::int16_t>(li)
                                             : static_cast<std::int16_t>(-1);
            ev.h_prod = hydrogen_production(load, m_prev, cmd, plant);
            ev.energy = electrolyser_energy(load, m_prev, cmd, plant) +
                        compressor_energy(ev.h_prod, plant);
            out.push_back(ev);
        }
    }
    return out;
}

}  // namespace detail

/// Backward induction for the operational subproblem: at each hour and
/// (stock, mode) cell, minimize the expected backup cost plus the priced
/// electricity consumption plus the interpolated next value. Controls whose
/// next stock can leave the storage bounds for some demand outcome are
/// pruned before taking the expectation. Ties resolve to the first control
/// in (mode command, load, extraction) order.
inline ValueFunctionO solve_operational(const std::vector<double>& lambda, const PlantSpec& plant,
                                        const NoiseModel& noise, const OperationalGrids& grids) {
    plant.validate();
    noise.validate();
    grids.validate(plant);
    const int T = plant.horizon;
    if (static_cast<int>(lambda.size()) != T)
        throw ConfigError("multiplier must have one entry per hour");

    const int n = grids.n_stock();
    const double ds = grids.stock_step();
    const double tol = 1e-9 * (1.0 + grids.stock.back() - grids.stock.front());

    ValueFunctionO vf;
    vf.stock_grid = grids.stock;
    vf.load_grid = grids.load;
    vf.h_out_grid = grids.h_out;
    vf.lambda = lambda;
    vf.value.assign(static_cast<std::size_t>(T) + 1, {});
    vf.choice.assign(static_cast<std::size_t>(T), {});
    for (int m = 0; m < 3; ++m) vf.value[static_cast<std::size_t>(T)][m].assign(n + 1, 0.0);

    std::vector<int> base_idx;
    std::vector<double> frac;
    for (int h = T - 1; h >= 0; --h) {
        const auto& st = noise.at(h);
        const auto& ho_grid = grids.h_out[static_cast<std::size_t>(h)];
        const std::size_t n_out = st.demand.outcomes.size();
        base_idx.assign(n_out, 0);
        frac.assign(n_out, 0.0);
        const auto& next = vf.value[static_cast<std::size_t>(h) + 1];
        auto& cur = vf.value[static_cast<std::size_t>(h)];
        auto& cho = vf.choice[static_cast<std::size_t>(h)];
        for (int m = 0; m < 3; ++m) {
            cur[m].assign(static_cast<std::size_t>(n) + 1, kInf);
            cho[m].assign(static_cast<std::size_t>(n), ValueFunctionO::Choice{});
        }

        for (int mp = 0; mp < 3; ++mp) {
            const auto mode_loads =
                detail::enumerate_mode_loads(plant, grids, static_cast<Mode>(mp));
            double* best = cur[mp].data();
            auto* choice = cho[mp].data();
            for (const auto& ml : mode_loads) {
                const auto& cmd_next = next[static_cast<int>(ml.cmd)];
                const double priced = lambda[static_cast<std::size_t>(h)] * ml.energy;
                for (std::int16_t oi = 0; oi < static_cast<std::int16_t>(ho_grid.size()); ++oi) {
                    const double h_out = ho_grid[static_cast<std::size_t>(oi)];
                    double base = priced;
                    int lo_i = 0, hi_i = n - 1;
                    for (std::size_t k = 0; k < n_out; ++k) {
                        const double d = st.demand.outcomes[k];
                        base += st.demand.probs[k] * plant.c_backup * positive_part(d - h_out);
                        const double off = (ml.h_prod - std::min(d, h_out)) / ds;
                        lo_i = std::max(lo_i, static_cast<int>(std::ceil(-off - tol / ds)));
                        hi_i = std::min(hi_i, static_cast<int>(std::floor((n - 1) - off + tol / ds)));
                        int f = static_cast<int>(std::floor(off));
                        double w = off - f;
                        if (w < 1e-12) w = 0.0;
                        else if (w > 1.0 - 1e-12) { w = 0.0; f += 1; }
                        base_idx[k] = f;
                        frac[k] = w;
                    }
                    if (lo_i > hi_i) continue;
                    for (int i = lo_i; i <= hi_i; ++i) {
                        double val = base;
                        for (std::size_t k = 0; k < n_out; ++k) {
                            int idx = i + base_idx[k];
                            double w = frac[k];
                            if (idx < 0) { idx = 0; w = 0.0; }
                            else if (idx > n - 1) { idx = n - 1; w = 0.0; }
                            val += st.demand.probs[k] *
                                   ((1.0 - w) * cmd_next[static_cast<std::size_t>(idx)] +
                                    w * cmd_next[static_cast<std::size_t>(idx) + 1]);
                        }
                        if (val < best[i]) {
                            best[i] = val;
                            choice[i] = ValueFunctionO::Choice{
                                static_cast<std::int8_t>(ml.cmd), ml.load_idx, oi};
                        }
                    }
                }
            }
            cur[mp][static_cast<std::size_t>(n)] = cur[mp][static_cast<std::size_t>(n) - 1];
        }
    }
    return vf;
}

/// Minimizing control stored for the cell nearest to the queried stock.
inline ValueFunctionO::Choice operational_policy(const ValueFunctionO& vf, double s, Mode m,
                                                 int h) {
    const int i = vf.nearest_index(s);
    const double v =
        vf.value.at(static_cast<std::size_t>(h))[static_cast<int>(m)][static_cast<std::size_t>(i)];
    if (!std::isfinite(v)) throw InfeasibleError("no feasible control at the queried state");
    return vf.choice.at(static_cast<std::size_t>(h))[static_cast<int>(m)]
                     [static_cast<std::size_t>(i)];
}

/// Exact forward propagation of the (stock, mode) distribution under the
/// tabulated policy; off-grid stocks split their mass between the two
/// neighbouring grid points with the interpolation weights. Returns the
/// expected plant consumption per hour (kWh).
inline std::vector<double> expected_consumption_profile(const ValueFunctionO& vf,
                                                        const PlantSpec& plant,
                                                        const NoiseModel& noise,
                                                        const State& initial) {
    const int T = vf.horizon();
    const int n = vf.n_stock();
    const double ds = (vf.stock_grid.back() - vf.stock_grid.front()) / (n - 1.0);

    std::array<std::array<std::vector<double>, 3>, 2> dist;
    for (int b = 0; b < 2; ++b)
        for (int m = 0; m < 3; ++m) dist[b][m].assign(static_cast<std::size_t>(n), 0.0);
    dist[0][static_cast<int>(initial.m)][static_cast<std::size_t>(vf.nearest_index(initial.s))] =
        1.0;

    std::vector<double> profile(static_cast<std::size_t>(T), 0.0);
    for (int h = 0; h < T; ++h) {
        const auto& st = noise.at(h);
        auto& cur = dist[h % 2];
        auto& nxt = dist[(h + 1) % 2];
        for (int m = 0; m < 3; ++m) std::fill(nxt[m].begin(), nxt[m].end(), 0.0);
        for (int m = 0; m < 3; ++m) {
            for (int i = 0; i < n; ++i) {
                const double mass = cur[m][static_cast<std::size_t>(i)];
                if (mass == 0.0) continue;
                const auto& ch =
                    vf.choice[static_cast<std::size_t>(h)][m][static_cast<std::size_t>(i)];
                const Mode cmd = static_cast<Mode>(ch.mode_cmd);
                const double load = vf.load_of(ch);
                const double h_prod = hydrogen_production(load, static_cast<Mode>(m), cmd, plant);
                const double energy = electrolyser_energy(load, static_cast<Mode>(m), cmd, plant) +
                                      compressor_energy(h_prod, plant);
                profile[static_cast<std::size_t>(h)] += mass * energy;
                const double h_out = vf.h_out_of(h, ch);
                for (std::size_t k = 0; k < st.demand.outcomes.size(); ++k) {
                    const double delta = h_prod - std::min(st.demand.outcomes[k], h_out);
                    double pos = std::clamp(i + delta / ds, 0.0, n - 1.0);
                    const int idx = std::min(static_cast<int>(pos), n - 2);
                    const double w = pos - idx;
                    const double pm = mass * st.demand.probs[k];
                    nxt[static_cast<int>(cmd)][static_cast<std::size_t>(idx)] += pm * (1.0 - w);
                    nxt[static_cast<int>(cmd)][static_cast<std::size_t>(idx) + 1] += pm * w;
                }
            }
        }
    }
    return profile;
}

}  // namespace hydec
