#pragma once

// Shared instance builders for the test suites.

#include "hydec/model.hpp"
#include "hydec/scenario.hpp"

namespace testing_support {

/// Production-scale plant with the reference parameters and a flat grid
/// price unless one is supplied.
inline hydec::PlantSpec reference_plant(int horizon = 168, std::vector<double> c_grid = {}) {
    hydec::PlantSpec p;
    p.electrolyser.mu = hydec::default_mu_table();
    p.electrolyser.phi_e = hydec::default_phi_curve();
    p.electrolyser.m_max = 23.0;
    p.electrolyser.e_idle = 3.0;
    p.electrolyser.l_min = 0.1;
    p.e_comp = 6.0;
    p.s_min = 25.0;
    p.s_max = 750.0;
    p.ppa_cap = 41650.0;
    p.c_ppa = 0.075;
    p.c_backup = 5000.0;
    p.c_subsidy = 5e6;
    p.p = 0.2;
    p.horizon = horizon;
    p.beta1 = 0.0;
    p.beta2 = 26.5;
    if (c_grid.empty()) c_grid.assign(static_cast<std::size_t>(horizon), 0.10);
    p.c_grid = std::move(c_grid);
    p.validate();
    return p;
}

/// Small integer-valued plant: productions, demands and extraction grids all
/// land exactly on a unit stock grid, so tree enumeration and tabulated
/// dynamic programming agree to machine precision.
inline hydec::PlantSpec toy_plant(int horizon, std::vector<double> c_grid = {},
                                  double c_backup = 10.0) {
    hydec::PlantSpec p;
    p.electrolyser.mu = {{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}}};
    p.electrolyser.phi_e = hydec::PiecewiseLinearCurve({{0.5, 2.0}, {1.0, 2.0}});
    p.electrolyser.m_max = 2.0;
    p.electrolyser.e_idle = 1.0;
    p.electrolyser.l_min = 0.5;
    p.e_comp = 1.0;  // max consumption = (2 + 1) * 2 = 6 kWh
    p.s_min = 0.0;
    p.s_max = 4.0;
    p.ppa_cap = 6.0;
    p.c_ppa = 0.4;
    p.c_backup = c_backup;
    p.c_subsidy = 50.0;
    p.p = 0.2;
    p.horizon = horizon;
    p.beta1 = 0.0;
    p.beta2 = 3.0;  // bound: 50 / (T * 0.8 * 6)
    if (c_grid.empty()) c_grid.assign(static_cast<std::size_t>(horizon), 0.6);
    p.c_grid = std::move(c_grid);
    p.validate();
    return p;
}

inline hydec::DiscreteMarginal point_mass(double v) { return {{v}, {1.0}}; }

inline hydec::NoiseModel toy_noise(int horizon, std::vector<hydec::DiscreteMarginal> demand,
                                   std::vector<hydec::DiscreteMarginal> pv) {
    hydec::NoiseModel n;
    for (int h = 0; h < horizon; ++h) {
        hydec::StageDistribution st;
        st.demand = demand[static_cast<std::size_t>(h) % demand.size()];
        st.pv = pv[static_cast<std::size_t>(h) % pv.size()];
        n.stages.push_back(std::move(st));
    }
    n.validate();
    return n;
}

}  // namespace testing_support
