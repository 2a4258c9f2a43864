#include <doctest.h>

#include "test_util.hpp"
#include "tokencast/baselines.hpp"
#include "tokencast/rng.hpp"

using namespace tokencast;
using tokencast::test::kMissing;
using tokencast::test::obs;

namespace {

// Reference implementation: physically tile the last season forward.
std::vector<double> tiled_reference(const std::vector<double>& context, int horizon,
                                    int season) {
    std::vector<double> tile(context.end() - season, context.end());
    std::vector<double> out;
    while (static_cast<int>(out.size()) < horizon) {
        for (const double v : tile) {
            if (static_cast<int>(out.size()) == horizon) break;
            out.push_back(v);
        }
    }
    return out;
}

} // namespace

TEST_CASE("seasonality table defaults") {
    CHECK(season_length("H") == 24);
    CHECK(season_length("D") == 7);
    CHECK(season_length("W") == 1);
    CHECK(season_length("M") == 12);
    CHECK(season_length("Q") == 4);
    CHECK(season_length("Y") == 1);
    CHECK(season_length("30min") == 48);
    CHECK(season_length("15min") == 96);
    CHECK(season_length("5min") == 1); // unknown tags fall back to 1

    SeasonalityTable custom = default_seasonality_table();
    custom["W"] = 52;
    CHECK(season_length("W", custom) == 52);
}

TEST_CASE("seasonal naive: definition and S = 1 reduction") {
    const PointForecast f = seasonal_naive(obs({1, 2, 3, 4}), 3, 2);
    CHECK(f.values == std::vector<double>{3, 4, 3});
    CHECK(!f.fell_back_to_naive);

    const PointForecast carry = seasonal_naive(obs({9, 8, 7}), 2, 1);
    CHECK(carry.values == std::vector<double>{7, 7});
}

TEST_CASE("seasonal naive matches the brute-force tiling oracle") {
    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const int season = static_cast<int>(rng.uniform_int(1, 8));
        const int len = static_cast<int>(rng.uniform_int(season, season + 30));
        const int horizon = static_cast<int>(rng.uniform_int(1, 20));
        std::vector<double> context;
        for (int i = 0; i < len; ++i) context.push_back(rng.uniform(-50, 50));
        const PointForecast f = seasonal_naive(obs(context), horizon, season);
        CHECK(f.values == tiled_reference(context, horizon, season));
    }
}

TEST_CASE("seasonal naive is phase-periodic") {
    Rng rng(62);
    std::vector<double> context;
    for (int i = 0; i < 30; ++i) context.push_back(rng.uniform(0, 10));
    const int season = 5;
    const PointForecast f = seasonal_naive(obs(context), 17, season);
    for (std::size_t h = 0; h + season < f.values.size(); ++h) {
        CHECK(f.values[h] == f.values[h + season]);
    }
}

TEST_CASE("seasonal naive: missing handling") {
    // Missing at a phase position falls back to the previous same-phase value.
    const PointForecast phase_fallback =
        seasonal_naive({{1.0, 20.0, 3.0, kMissing}}, 2, 2);
    CHECK(phase_fallback.values == std::vector<double>{3.0, 20.0});

    // No observed value at that phase anywhere: last observed value wins.
    const PointForecast last_observed =
        seasonal_naive({{kMissing, 5.0, kMissing, kMissing}}, 2, 2);
    CHECK(last_observed.values == std::vector<double>{5.0, 5.0});

    CHECK_THROWS_AS(seasonal_naive({{kMissing, kMissing}}, 1, 1), DataError);
}

TEST_CASE("seasonal naive: short context falls back to S = 1 with a flag") {
    const PointForecast f = seasonal_naive(obs({4, 5}), 3, 7);
    CHECK(f.fell_back_to_naive);
    CHECK(f.values == std::vector<double>{5, 5, 5});
}

TEST_CASE("naive: last observed value repeated") {
    CHECK(naive(obs({1, 2, 5}), 3) == std::vector<double>{5, 5, 5});
    CHECK(naive({{1.0, 5.0, kMissing}}, 1) == std::vector<double>{5.0});
    CHECK_THROWS_AS(naive({{kMissing}}, 1), DataError);

    // Equals seasonal_naive with S = 1 on missing-free inputs.
    Rng rng(63);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> context;
        const int len = static_cast<int>(rng.uniform_int(1, 20));
        for (int i = 0; i < len; ++i) context.push_back(rng.uniform(-5, 5));
        const int horizon = static_cast<int>(rng.uniform_int(1, 10));
        CHECK(naive(obs(context), horizon) ==
              seasonal_naive(obs(context), horizon, 1).values);
    }
}

TEST_CASE("as_quantile_forecast wraps a point forecast") {
    const std::vector<double> point = {1.0, 2.0};
    const std::vector<double> levels = default_quantile_levels();
    const QuantileForecast qf = as_quantile_forecast(point, levels, "p");
    CHECK(qf.id == "p");
    CHECK(qf.levels == levels);
    REQUIRE(qf.values.size() == 9);
    for (const auto& row : qf.values) CHECK(row == point);
    CHECK(qf.mean == point);
}
