#pragma once

#include <array>
#include <sstream>
#include <utility>

#include "hydec/common.hpp"

namespace hydec {

/// Electrolyser operating modes. COLD draws nothing, IDLE keeps the stacks
/// warm at a constant draw, START produces hydrogen at a chosen load.
enum class Mode : int { Cold = 0, Idle = 1, Start = 2 };

inline constexpr std::array<Mode, 3> kModes{Mode::Cold, Mode::Idle, Mode::Start};

inline const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Cold: return "cold";
        case Mode::Idle: return "idle";
        case Mode::Start: return "start";
    }
    return "?";
}

inline Mode mode_from_name(const std::string& s) {
    if (s == "cold") return Mode::Cold;
    if (s == "idle") return Mode::Idle;
    if (s == "start") return Mode::Start;
    throw ConfigError("unknown electrolyser mode '" + s + "'");
}

/// Piecewise-linear curve on [x_front, x_back], evaluated by linear
/// interpolation between breakpoints.
class PiecewiseLinearCurve {
  public:
    PiecewiseLinearCurve() = default;

    explicit PiecewiseLinearCurve(std::vector<std::pair<double, double>> points) {
        if (points.size() < 1) throw ConfigError("curve needs at least one breakpoint");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
                throw ConfigError("curve breakpoints must be finite");
            if (i > 0 && points[i].first <= points[i - 1].first)
                throw ConfigError("curve breakpoints must be strictly increasing in x");
        }
        xs_.reserve(points.size());
        ys_.reserve(points.size());
        for (auto& [x, y] : points) {
            xs_.push_back(x);
            ys_.push_back(y);
        }
    }

    double operator()(double x) const {
        constexpr double tol = 1e-9;
        if (x < xs_.front() - tol || x > xs_.back() + tol)
            throw InfeasibleError("curve evaluated outside its domain");
        if (x <= xs_.front()) return ys_.front();
        if (x >= xs_.back()) return ys_.back();
        std::size_t hi = 1;
        while (xs_[hi] < x) ++hi;
        const double w = (x - xs_[hi - 1]) / (xs_[hi] - xs_[hi - 1]);
        return ys_[hi - 1] * (1.0 - w) + ys_[hi] * w;
    }

    double domain_lo() const { return xs_.front(); }
    double domain_hi() const { return xs_.back(); }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

  private:
    std::vector<double> xs_, ys_;
};

struct ElectrolyserSpec {
    /// mu[from][to]: fraction of the hour left for production/idling after
    /// the mode transition. Diagonal is 1 (no transition, full hour).
    std::array<std::array<double, 3>, 3> mu{};
    /// Unitary consumption (kWh per kg) as a function of the load.
    PiecewiseLinearCurve phi_e;
    double m_max = 0.0;   // maximal hourly production, kg/h
    double e_idle = 0.0;  // idle draw, kWh/h
    double l_min = 0.0;   // minimal admissible load fraction

    double mu_at(Mode from, Mode to) const {
        return mu[static_cast<int>(from)][static_cast<int>(to)];
    }

    void validate() const {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double v = mu[i][j];
                if (!(v >= 0.0 && v <= 1.0))
                    throw ConfigError("mu entries must lie in [0, 1]");
                if (i == j && v != 1.0)
                    throw ConfigError("mu diagonal must equal 1");
            }
        if (!(m_max > 0.0)) throw ConfigError("m_max must be positive");
        if (!(l_min > 0.0 && l_min <= 1.0)) throw ConfigError("l_min must lie in (0, 1]");
        if (e_idle < 0.0) throw ConfigError("e_idle must be nonnegative");
        if (phi_e.domain_lo() > l_min + 1e-12 || phi_e.domain_hi() < 1.0 - 1e-12)
            throw ConfigError("phi_e must cover [l_min, 1]");
        for (double y : phi_e.ys())
            if (!std::isfinite(y) || y < 0.0) throw ConfigError("phi_e values must be finite and nonnegative");
    }
};

/// Transition-time table of the reference electrolyser.
inline std::array<std::array<double, 3>, 3> default_mu_table() {
    return {{{1.0, 5.0 / 6.0, 99.0 / 120.0},
             {119.0 / 120.0, 1.0, 299.0 / 300.0},
             {119.0 / 120.0, 119.0 / 120.0, 1.0}}};
}

/// Bundled unitary-consumption curve: decreasing towards full load, with
/// 55 kWh/kg at load 1 so that the reference plant's maximal consumption
/// works out to 1403 kWh.
inline PiecewiseLinearCurve default_phi_curve() {
    return PiecewiseLinearCurve(
        {{0.1, 70.0}, {0.3, 62.0}, {0.5, 58.0}, {0.7, 56.0}, {0.85, 55.2}, {1.0, 55.0}});
}

struct PlantSpec {
    ElectrolyserSpec electrolyser;
    double e_comp = 0.0;  // compressor draw, kWh/kg
    double s_min = 0.0;   // storage bounds, kg
    double s_max = 0.0;
    double ppa_cap = 0.0;  // cumulated PPA energy budget, kWh
    double c_ppa = 0.0;    // EUR/kWh
    std::vector<double> c_grid;  // EUR/kWh per hour, length = horizon
    double c_backup = 0.0;       // EUR per kg of unmet demand
    double c_subsidy = 0.0;      // EUR
    double p = 0.0;              // subsidy threshold fraction
    int horizon = 0;             // hours
    double beta1 = 0.0;          // slopes of the surrogate final cost
    double beta2 = 0.0;

    void validate() const {
        electrolyser.validate();
        if (e_comp < 0.0) throw ConfigError("e_comp must be nonnegative");
        if (!(s_min >= 0.0 && s_min < s_max)) throw ConfigError("need 0 <= s_min < s_max");
        if (ppa_cap < 0.0) throw ConfigError("ppa_cap must be nonnegative");
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("subsidy threshold p must lie in (0, 1)");
        if (horizon <= 0) throw ConfigError("horizon must be positive");
        if (static_cast<int>(c_grid.size()) != horizon)
            throw ConfigError("c_grid must have one entry per hour");
        for (double c : c_grid)
            if (!std::isfinite(c) || c < 0.0) throw ConfigError("grid prices must be finite and nonnegative");
        if (c_ppa < 0.0 || c_backup < 0.0 || c_subsidy < 0.0)
            throw ConfigError("costs must be nonnegative");
    }

    double q_upper() const;
    double q_lower() const;
};

struct State {
    double s = 0.0;        // stored hydrogen, kg
    Mode m = Mode::Cold;   // electrolyser mode
    double p_stock = 0.0;  // remaining PPA budget, kWh
    double q = 0.0;        // cumulative-electricity score, kWh
};

struct Control {
    double e_ppa = 0.0;        // kWh
    double e_grid = 0.0;       // kWh, negative = export
    double load = 0.0;         // fraction of m_max
    Mode mode_cmd = Mode::Cold;
    double h_out = 0.0;        // hydrogen extracted for the demand, kg
};

/// Load set coupled to the mode command: {0} for COLD/IDLE, [l_min, 1] for START.
inline bool load_admissible(double load, Mode mode_cmd, const ElectrolyserSpec& e,
                            double tol = 1e-9) {
    if (mode_cmd == Mode::Start) return load >= e.l_min - tol && load <= 1.0 + tol;
    return std::abs(load) <= tol;
}

inline void require_load_admissible(double load, Mode mode_cmd, const ElectrolyserSpec& e) {
    if (!load_admissible(load, mode_cmd, e)) {
        std::ostringstream os;
        os << "load " << load << " incompatible with mode command " << mode_name(mode_cmd);
        throw InfeasibleError(os.str());
    }
}

/// Maximal hourly electricity consumption of the whole plant (kWh).
inline double max_consumption(const PlantSpec& spec) {
    return (spec.electrolyser.phi_e(1.0) + spec.e_comp) * spec.electrolyser.m_max;
}

inline double PlantSpec::q_upper() const {
    return horizon * (1.0 - p) * max_consumption(*this);
}

inline double PlantSpec::q_lower() const {
    return -horizon * p * max_consumption(*this);
}

/// Hydrogen produced over the hour (kg), reduced by the transition time.
inline double hydrogen_production(double load, Mode m_prev, Mode mode_cmd,
                                  const PlantSpec& spec) {
    require_load_admissible(load, mode_cmd, spec.electrolyser);
    return load * spec.electrolyser.mu_at(m_prev, mode_cmd) * spec.electrolyser.m_max;
}

/// Electricity drawn by the electrolyser (kWh); zero in COLD.
inline double electrolyser_energy(double load, Mode m_prev, Mode mode_cmd,
                                  const PlantSpec& spec) {
    require_load_admissible(load, mode_cmd, spec.electrolyser);
    const double mu = spec.electrolyser.mu_at(m_prev, mode_cmd);
    double e = 0.0;
    if (mode_cmd == Mode::Start && load > 0.0)
        e += spec.electrolyser.phi_e(load) * load * mu * spec.electrolyser.m_max;
    if (mode_cmd == Mode::Idle) e += spec.electrolyser.e_idle * mu;
    return e;
}

inline double compressor_energy(double h_prod, const PlantSpec& spec) {
    if (h_prod < 0.0) throw InfeasibleError("hydrogen production cannot be negative");
    return spec.e_comp * h_prod;
}

/// Stock update: extraction beyond the demand is re-injected. The caller is
/// responsible for checking the result against the storage bounds.
inline double step_stock(double s, double h_prod, double demand, double h_out) {
    return s + h_prod - std::min(demand, h_out);
}

inline bool stock_within_bounds(const PlantSpec& spec, double s, double tol = 1e-9) {
    return s >= spec.s_min - tol && s <= spec.s_max + tol;
}

/// Cumulative-electricity update: grid purchases count against the subsidy,
/// renewable supply counts for it up to the plant's maximal consumption.
inline double step_cumulative(double q, double e_grid, double e_ppa, double e_pv,
                              const PlantSpec& spec) {
    return q + (1.0 - spec.p) * positive_part(e_grid) -
           spec.p * std::min(max_consumption(spec), e_ppa + e_pv);
}

inline double step_ppa(double p_stock, double e_ppa) {
    if (e_ppa < -1e-12) throw InfeasibleError("PPA draw cannot be negative");
    if (e_ppa > p_stock + 1e-9) {
        std::ostringstream os;
        os << "PPA draw " << e_ppa << " exceeds remaining budget " << p_stock;
        throw InfeasibleError(os.str());
    }
    return p_stock - e_ppa;
}

/// Instantaneous cost of hour h (EUR): PPA + grid purchases + backup.
inline double stage_cost(double e_ppa, double e_grid, double demand, double h_out, int h,
                         const PlantSpec& spec) {
    return spec.c_ppa * e_ppa + spec.c_grid.at(static_cast<std::size_t>(h)) * positive_part(e_grid) +
           spec.c_backup * positive_part(demand - h_out);
}

/// Final cost: the subsidy is granted when the terminal score is nonpositive.
inline double subsidy_cost(double q_terminal, const PlantSpec& spec) {
    return q_terminal <= 0.0 ? -spec.c_subsidy : 0.0;
}

inline double surrogate_beta_bound(const PlantSpec& spec) {
    return spec.c_subsidy / spec.q_upper();
}

inline void require_betas_admissible(double beta1, double beta2, const PlantSpec& spec) {
    const double bound = surrogate_beta_bound(spec);
    if (!(beta1 >= 0.0 && beta1 < beta2 && beta2 <= bound + 1e-12)) {
        std::ostringstream os;
        os << "surrogate slopes must satisfy 0 <= beta1 < beta2 <= " << bound
           << " (got beta1=" << beta1 << ", beta2=" << beta2 << ")";
        throw ConfigError(os.str());
    }
}

/// Convex nondecreasing surrogate of the subsidy cost.
inline double surrogate_final_cost(double q_terminal, double beta1, double beta2,
                                   const PlantSpec& spec) {
    require_betas_admissible(beta1, beta2, spec);
    return std::max(beta1 * q_terminal, beta2 * q_terminal) - spec.c_subsidy;
}

inline double surrogate_final_cost(double q_terminal, const PlantSpec& spec) {
    return surrogate_final_cost(q_terminal, spec.beta1, spec.beta2, spec);
}

}  // namespace hydec
