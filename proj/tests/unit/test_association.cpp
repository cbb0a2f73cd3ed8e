#include <doctest.h>

#include <cmath>
#include <limits>

#include "udnsim/association.hpp"

using namespace udnsim;

namespace {

Deployment make(std::vector<Point2D> bs, double side = 1.5, double h_bs = 1.5)
{
    Deployment d;
    d.region = Region{side};
    d.bs_positions = std::move(bs);
    d.bs_antenna_height_m = h_bs;
    return d;
}

} // namespace

TEST_CASE("serving BS is the minimum path loss one")
{
    // Single slope: 95.2 dB at ~0.0187 km and 88.4 dB at ~0.0123 km.
    const double r0 = std::pow(10.0, (95.2 - 145.4) / 37.5);
    const double r1 = std::pow(10.0, (88.4 - 145.4) / 37.5);
    const auto dep = make({{0.5 + r0, 0.5}, {0.5, 0.5 + r1}});
    const TrialDraws draws{rng::background_key(1, 0)};
    const std::vector<Point2D> ue{{0.5, 0.5}};
    const auto res = associate(ue, dep, ChannelModel::SingleSlopeNlos, draws);
    CHECK(res.serving_bs[0] == 1);
    CHECK(res.serving_path_loss_db[0] == doctest::Approx(88.4));
    CHECK(res.attached(1).size() == 1);
    CHECK(res.attached(0).empty());
}

TEST_CASE("exact ties go to the lower index")
{
    const auto dep = make({{0.6, 0.5}, {0.4, 0.5}, {0.5, 0.6}});
    const TrialDraws draws{rng::background_key(1, 0)};
    const std::vector<Point2D> ue{{0.5, 0.5}};
    CHECK(associate(ue, dep, ChannelModel::SingleSlopeNlos, draws).serving_bs[0] == 0);
}

TEST_CASE("single slope serves the nearest BS")
{
    RandomStream s{rng::seed_key(77)};
    const Region region{1.5};
    auto dep = deploy_bs(region, 250.0, s);
    const auto ues = drop_ues(region, 300.0, s);
    const auto res = associate(std::span{ues}.first(100), dep, ChannelModel::SingleSlopeNlos, TrialDraws{17});
    for (std::size_t u = 0; u < 100; ++u) {
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t arg = 0;
        for (std::uint32_t b = 0; b < dep.bs_count(); ++b) {
            const double d = torus_distance_2d(ues[u], dep.bs_positions[b], region);
            if (d < best) {
                best = d;
                arg = b;
            }
        }
        CHECK(res.serving_bs[u] == arg);
    }
}

TEST_CASE("pruned search agrees with an exhaustive search under random LoS")
{
    RandomStream s{rng::seed_key(78)};
    const Region region{1.5};
    for (double lambda : {50.0, 2500.0}) {
        for (double h : {1.5, 10.0}) {
            auto dep = deploy_bs(region, lambda, s);
            dep.bs_antenna_height_m = h;
            const auto ues = drop_ues(region, 300.0, s);
            const TrialDraws draws{rng::background_key(5, static_cast<std::uint64_t>(lambda))};
            const auto res = associate(ues, dep, ChannelModel::ThreeGppLosNlos, draws);
            const double hk = (h - 1.5) / 1000.0;
            for (std::uint32_t u = 0; u < ues.size(); u += 7) {
                double best = std::numeric_limits<double>::infinity();
                std::uint32_t arg = 0;
                for (std::uint32_t b = 0; b < dep.bs_count(); ++b) {
                    const double d = torus_distance_2d(ues[u], dep.bs_positions[b], region);
                    const double r = floored_distance(std::sqrt(d * d + hk * hk));
                    const bool los = draws.link_los(u, b) < los_probability(LinkType::BsToUe, r);
                    const double pl = path_loss_db(ChannelModel::ThreeGppLosNlos, LinkType::BsToUe, los, r);
                    if (pl < best) {
                        best = pl;
                        arg = b;
                    }
                }
                CHECK(res.serving_bs[u] == arg);
                CHECK(res.serving_path_loss_db[u] == doctest::Approx(best).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("a far extra BS changes nothing")
{
    const auto a = make({{0.2, 0.2}, {0.25, 0.3}});
    const auto b = make({{0.2, 0.2}, {0.25, 0.3}, {0.95, 0.95}});
    const std::vector<Point2D> ues{{0.21, 0.22}, {0.24, 0.29}, {0.3, 0.2}};
    const TrialDraws draws{99};
    const auto ra = associate(ues, a, ChannelModel::SingleSlopeNlos, draws);
    const auto rb = associate(ues, b, ChannelModel::SingleSlopeNlos, draws);
    CHECK(ra.serving_bs == rb.serving_bs);
    CHECK(ra.serving_path_loss_db == rb.serving_path_loss_db);
}

TEST_CASE("empty deployment has no coverage")
{
    CHECK_THROWS_AS(Associator(make({}), ChannelModel::ThreeGppLosNlos), NoCoverageError);
}

TEST_CASE("active set")
{
    AssociationResult r;
    r.serving_bs = {0, 0};
    CHECK(derive_active_set(r, true, 3) == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(derive_active_set(r, false, 3) == std::vector<std::uint8_t>{1, 1, 1});

    RandomStream s{rng::seed_key(42)};
    const Region region{1.5};
    const auto dep = deploy_bs(region, 2500.0, s);
    const auto ues = drop_ues(region, 676.0 / 2.25, s);
    REQUIRE(ues.size() == 676);
    const auto res = associate(ues, dep, ChannelModel::ThreeGppLosNlos, TrialDraws{3});
    std::size_t active = 0;
    for (auto f : derive_active_set(res, true, dep.bs_count())) {
        active += f;
    }
    CHECK(active <= 676);
    CHECK(active > 0);
}
