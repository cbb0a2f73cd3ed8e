#include <doctest.h>

#include "udnsim/config.hpp"

using namespace udnsim;

TEST_CASE("presets")
{
    const auto a = preset(Figure::Fig2b, Density::Udn2500);
    CHECK(a.lambda_bs == 2500.0);
    CHECK(a.channel == ChannelModel::SingleSlopeNlos);
    CHECK(a.full_load);
    CHECK(preset(Figure::Fig2c, Density::Lte50).bs_antenna_height_m - preset(Figure::Fig2c, Density::Lte50).ue_antenna_height_m ==
          doctest::Approx(8.5));
    CHECK(preset(Figure::Fig2d, Density::Lte50).channel == ChannelModel::ThreeGppLosNlos);
    const auto f4a = preset(Figure::Fig4a, Density::Dense250);
    CHECK_FALSE(f4a.full_load);
    CHECK(f4a.imc_enabled);
    CHECK(f4a.rho_ue == 300.0);
    CHECK(preset(Figure::Fig4b, Density::Lte50).scheduler == SchedulerKind::ProportionalFair);
    CHECK(preset(Figure::Fig5a, Density::Lte50).direction == Direction::Downlink);
    const auto f5b = preset(Figure::Fig5b, Density::Lte50);
    CHECK(f5b.duplex == DuplexMode::DynamicTdd);
    CHECK(f5b.direction == Direction::Uplink);
    CHECK(f5b.ic_depth == 0);
    CHECK(preset(Figure::Fig5c, Density::Lte50).ic_depth == 3);
    CHECK(preset(Figure::Fig5c, Density::Lte50).ul_power == UlPowerMode::Fractional);
    CHECK(preset(Figure::Fig5d, Density::Lte50).ul_power == UlPowerMode::FullPower);
    for (auto f : all_figures) {
        CHECK(parse_figure(to_string(f)) == f);
        for (auto d : all_densities) {
            CHECK_NOTHROW(preset(f, d).validate());
        }
    }
    for (auto d : all_densities) {
        CHECK(parse_density(to_string(d)) == d);
    }
}

TEST_CASE("JSON round trip")
{
    auto c = preset(Figure::Fig5d, Density::Dense250);
    c.cutoff_km = 0.4;
    c.seed = 12345678901234ULL;
    const auto j = to_json(c);
    const auto back = apply_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.cutoff_km == c.cutoff_km);
    CHECK(back.seed == c.seed);
}

TEST_CASE("JSON errors")
{
    CHECK_THROWS_AS(apply_json({{"lambda", 50}}), ConfigError);
    CHECK_THROWS_AS(apply_json({{"trials", "many"}}), ConfigError);
    CHECK_THROWS_AS(apply_json({{"scheduler", "fifo"}}), ConfigError);
    CHECK_THROWS_AS(apply_json(nlohmann::json::array()), ConfigError);
    try {
        apply_json({{"imc_enabled", 1}});
        FAIL("accepted a number for a flag");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "imc_enabled");
    }
    CHECK(apply_json({{"gamma_db", 0.0}}).gamma == 1.0);
    CHECK(apply_json({{"gamma_db", 10.0}}).gamma == doctest::Approx(10.0));
}
