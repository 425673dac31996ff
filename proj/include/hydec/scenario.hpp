#pragma once

#include <random>

#include "hydec/common.hpp"

namespace hydec {

/// Finite discrete distribution of a scalar quantity.
struct DiscreteMarginal {
    std::vector<double> outcomes;
    std::vector<double> probs;

    void validate() const {
        if (outcomes.empty() || outcomes.size() != probs.size())
            throw ConfigError("marginal needs matching outcome/probability lists");
        double sum = 0.0;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (!std::isfinite(outcomes[i]) || outcomes[i] < 0.0)
                throw ConfigError("outcomes must be finite and nonnegative");
            if (!(probs[i] >= 0.0)) throw ConfigError("probabilities must be nonnegative");
            sum += probs[i];
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("probabilities must sum to 1");
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < outcomes.size(); ++i) m += outcomes[i] * probs[i];
        return m;
    }

    double max_outcome() const {
        double m = 0.0;
        for (double o : outcomes) m = std::max(m, o);
        return m;
    }

    double min_outcome() const {
        double m = kInf;
        for (double o : outcomes) m = std::min(m, o);
        return m;
    }

    /// Inverse-CDF draw from a uniform in [0, 1); platform independent.
    std::size_t sample_index(double u) const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.size() - 1;
    }
};

/// Per-hour demand and PV marginals; the two are drawn independently of each
/// other within the hour.
struct StageDistribution {
    DiscreteMarginal demand;  // kg
    DiscreteMarginal pv;      // kWh

    void validate() const {
        demand.validate();
        pv.validate();
    }
};

/// Stagewise-independent noise over the whole horizon.
struct NoiseModel {
    std::vector<StageDistribution> stages;
    bool within_stage_independent = true;

    int horizon() const { return static_cast<int>(stages.size()); }

    void validate() const {
        if (stages.empty()) throw ConfigError("noise model must cover at least one hour");
        for (const auto& st : stages) st.validate();
        if (!within_stage_independent)
            throw ConfigError("only within-stage independent noise is supported");
    }

    const StageDistribution& at(int h) const {
        if (h < 0 || h >= horizon()) throw ConfigError("stage index out of range");
        return stages[static_cast<std::size_t>(h)];
    }

    double pv_max() const {
        double m = 0.0;
        for (const auto& st : stages) m = std::max(m, st.pv.max_outcome());
        return m;
    }
};

/// Scales a mean value by a list of factors, one outcome per factor.
inline DiscreteMarginal build_scaled_distribution(double mu, const std::vector<double>& factors,
                                                  const std::vector<double>& probs) {
    if (mu < 0.0) throw ConfigError("scaled distribution needs a nonnegative mean");
    if (factors.size() != probs.size())
        throw ConfigError("factor and probability lists must have the same length");
    DiscreteMarginal d;
    d.outcomes.reserve(factors.size());
    for (double f : factors) d.outcomes.push_back(f * mu);
    d.probs = probs;
    d.validate();
    return d;
}

/// The five-point +/-20% spread used by the bundled datasets.
inline const std::vector<double>& default_noise_factors() {
    static const std::vector<double> f{0.8, 0.9, 1.0, 1.1, 1.2};
    return f;
}

inline const std::vector<double>& default_noise_probs() {
    static const std::vector<double> p{0.2, 0.2, 0.2, 0.2, 0.2};
    return p;
}

struct NoiseDraw {
    double demand = 0.0;
    double pv = 0.0;
    std::size_t demand_idx = 0;
    std::size_t pv_idx = 0;
};

inline double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa draw; avoids distribution-class differences across
    // standard library implementations.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline NoiseDraw sample_stage(const StageDistribution& st, std::mt19937_64& rng) {
    NoiseDraw d;
    d.demand_idx = st.demand.sample_index(uniform01(rng));
    d.pv_idx = st.pv.sample_index(uniform01(rng));
    d.demand = st.demand.outcomes[d.demand_idx];
    d.pv = st.pv.outcomes[d.pv_idx];
    return d;
}

/// One demand/PV pair per hour, deterministic for a given seed.
inline std::vector<NoiseDraw> sample_path(const NoiseModel& model, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<NoiseDraw> path;
    path.reserve(model.stages.size());
    for (const auto& st : model.stages) path.push_back(sample_stage(st, rng));
    return path;
}

inline const StageDistribution& support(const NoiseModel& model, int h) { return model.at(h); }

}  // namespace hydec
