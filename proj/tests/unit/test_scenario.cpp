#include <catch2/catch_amalgamated.hpp>

#include "hydec/scenario.hpp"
#include "support/builders.hpp"

using namespace hydec;
using Catch::Approx;

TEST_CASE("scaled five-point distribution", "[scenario]") {
    auto d = build_scaled_distribution(100.0, default_noise_factors(), default_noise_probs());
    REQUIRE(d.outcomes.size() == 5);
    CHECK(d.outcomes.front() == Approx(80.0));
    CHECK(d.outcomes.back() == Approx(120.0));
    CHECK(d.mean() == Approx(100.0));

    auto degenerate = build_scaled_distribution(0.0, default_noise_factors(), default_noise_probs());
    for (double o : degenerate.outcomes) CHECK(o == 0.0);

    CHECK_THROWS_AS(build_scaled_distribution(-1.0, default_noise_factors(), default_noise_probs()),
                    ConfigError);
    CHECK_THROWS_AS(build_scaled_distribution(1.0, {0.5, 1.5}, {0.7, 0.2}), ConfigError);
}

TEST_CASE("path sampling is deterministic per seed", "[scenario]") {
    NoiseModel model = testing_support::toy_noise(
        12, {DiscreteMarginal{{1.0, 2.0}, {0.5, 0.5}}},
        {DiscreteMarginal{{0.0, 3.0, 6.0}, {0.3, 0.4, 0.3}}});
    auto a = sample_path(model, 42);
    auto b = sample_path(model, 42);
    auto c = sample_path(model, 43);
    REQUIRE(a.size() == 12);
    bool same = true, all_same_as_c = true;
    for (std::size_t h = 0; h < a.size(); ++h) {
        same = same && a[h].demand == b[h].demand && a[h].pv == b[h].pv;
        all_same_as_c = all_same_as_c && a[h].demand == c[h].demand && a[h].pv == c[h].pv;
    }
    CHECK(same);
    CHECK_FALSE(all_same_as_c);
}

TEST_CASE("degenerate model yields the unique path", "[scenario]") {
    NoiseModel model =
        testing_support::toy_noise(5, {testing_support::point_mass(2.0)},
                                   {testing_support::point_mass(7.0)});
    auto path = sample_path(model, 99);
    for (auto& draw : path) {
        CHECK(draw.demand == 2.0);
        CHECK(draw.pv == 7.0);
    }
}

TEST_CASE("empirical frequencies match the stage distribution", "[scenario][property]") {
    DiscreteMarginal m{{10.0, 20.0, 30.0, 40.0, 50.0}, {0.2, 0.2, 0.2, 0.2, 0.2}};
    m.validate();
    const int n = 100000;
    std::array<int, 5> counts{};
    std::mt19937_64 rng(2024);
    for (int i = 0; i < n; ++i) counts[m.sample_index(uniform01(rng))]++;
    const double sigma = std::sqrt(n * 0.2 * 0.8);
    for (int k = 0; k < 5; ++k)
        CHECK(std::abs(counts[static_cast<std::size_t>(k)] - n * 0.2) <= 3.0 * sigma);
}

TEST_CASE("support accessor round-trips and rejects bad hours", "[scenario]") {
    NoiseModel model = testing_support::toy_noise(
        3, {DiscreteMarginal{{1.0}, {1.0}}, DiscreteMarginal{{2.0}, {1.0}}},
        {DiscreteMarginal{{5.0}, {1.0}}});
    CHECK(support(model, 0).demand.outcomes[0] == 1.0);
    CHECK(support(model, 1).demand.outcomes[0] == 2.0);
    CHECK(support(model, 2).pv.outcomes[0] == 5.0);
    CHECK_THROWS_AS(support(model, 3), ConfigError);
    CHECK_THROWS_AS(support(model, -1), ConfigError);
}

TEST_CASE("exact expectation agrees with Monte Carlo", "[scenario][property]") {
    StageDistribution st;
    st.demand = DiscreteMarginal{{0.0, 4.0, 9.0}, {0.5, 0.3, 0.2}};
    st.pv = DiscreteMarginal{{1.0, 2.0}, {0.25, 0.75}};
    st.validate();
    auto f = [](double d, double pv) { return d * d + 3.0 * pv - 0.5 * d * pv; };

    double exact = 0.0;
    for (std::size_t i = 0; i < st.demand.outcomes.size(); ++i)
        for (std::size_t j = 0; j < st.pv.outcomes.size(); ++j)
            exact += st.demand.probs[i] * st.pv.probs[j] *
                     f(st.demand.outcomes[i], st.pv.outcomes[j]);

    const int n = 200000;
    std::mt19937_64 rng(7);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        auto draw = sample_stage(st, rng);
        const double v = f(draw.demand, draw.pv);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - exact) <= 4.0 * sd);
}
