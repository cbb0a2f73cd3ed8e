#include <doctest.h>

#include <stdexcept>

#include "udnsim/mac.hpp"

using namespace udnsim;

TEST_CASE("TDD directions are fair coins")
{
    RandomStream s{rng::seed_key(4)};
    const auto d = assign_directions(100000, DuplexMode::DynamicTdd, s, 100000, Direction::Downlink);
    std::size_t dl = 0;
    for (auto x : d) {
        dl += x == Direction::Downlink ? 1 : 0;
    }
    CHECK(std::abs(dl / 1e5 - 0.5) < 0.005);

    const auto forced = assign_directions(10, DuplexMode::DynamicTdd, s, 3, Direction::Uplink);
    CHECK(forced[3] == Direction::Uplink);
    for (auto x : assign_directions(50, DuplexMode::DownlinkOnly, s, 50, Direction::Downlink)) {
        CHECK(x == Direction::Downlink);
    }
    CHECK(direction_from_uniform(0.49) == Direction::Downlink);
    CHECK(direction_from_uniform(0.5) == Direction::Uplink);
}

TEST_CASE("schedule_cell")
{
    const std::vector<std::uint32_t> att{4, 9, 13};
    const std::vector<double> f{0.2, 1.7, 0.9};
    CHECK(schedule_cell(att, SchedulerKind::ProportionalFair, f, 0.0) == 9);
    CHECK(schedule_cell(att, SchedulerKind::RoundRobin, f, 0.0) == 4);
    CHECK(schedule_cell(att, SchedulerKind::RoundRobin, f, 0.34) == 9);
    CHECK(schedule_cell(att, SchedulerKind::RoundRobin, f, 0.9999) == 13);
    const std::vector<double> tie{1.0, 2.0, 2.0};
    CHECK(schedule_cell(att, SchedulerKind::ProportionalFair, tie, 0.5) == 9);
    CHECK_THROWS_AS(schedule_cell({}, SchedulerKind::RoundRobin, {}, 0.5), std::invalid_argument);

    RandomStream s{rng::seed_key(8)};
    const std::vector<std::uint32_t> one{7};
    CHECK(schedule_cell(one, SchedulerKind::RoundRobin, s) == 7);
    CHECK(schedule_cell(one, SchedulerKind::ProportionalFair, s) == 7);

    // Any pick is one of the attached UEs; RR covers each about equally.
    std::vector<int> count(3, 0);
    for (int i = 0; i < 30000; ++i) {
        const auto u = schedule_cell(att, SchedulerKind::RoundRobin, s);
        REQUIRE((u == 4 || u == 9 || u == 13));
        count[u == 4 ? 0 : (u == 9 ? 1 : 2)]++;
        const auto p = schedule_cell(att, SchedulerKind::ProportionalFair, s);
        REQUIRE((p == 4 || p == 9 || p == 13));
    }
    for (int c : count) {
        CHECK(std::abs(c / 30000.0 - 1.0 / 3.0) < 0.015);
    }
}

TEST_CASE("PF fading is the max of K unit exponentials")
{
    RandomStream s{rng::seed_key(12)};
    double sum4 = 0;
    double sum1 = 0;
    for (int i = 0; i < 1000000; ++i) {
        sum4 += pf_scheduled_fading(4, s);
        sum1 += pf_scheduled_fading(1, s);
    }
    CHECK(std::abs(sum4 / 1e6 - (1.0 + 0.5 + 1.0 / 3.0 + 0.25)) < 0.01);
    CHECK(std::abs(sum1 / 1e6 - 1.0) < 0.01);
}

TEST_CASE("UL power control")
{
    CHECK(ul_tx_power_dbm(100.0, UlPowerMode::Fractional) == doctest::Approx(21.0));
    CHECK(ul_tx_power_dbm(107.9, UlPowerMode::Fractional) == 23.0);
    CHECK(ul_tx_power_dbm(102.5, UlPowerMode::Fractional) == doctest::Approx(23.0));
    CHECK(ul_tx_power_dbm(60.0, UlPowerMode::FullPower) == 23.0);
    CHECK(ul_tx_power_dbm(140.0, UlPowerMode::FullPower) == 23.0);
    for (double pl = 40; pl < 200; pl += 0.5) {
        CHECK(ul_tx_power_dbm(pl, UlPowerMode::Fractional) <= 23.0);
    }
}
