#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "udnsim/geometry.hpp"

using namespace udnsim;

TEST_CASE("torus distance wraps across the edge")
{
    const Region region{1.5};
    CHECK(torus_distance_2d({0.1, 0.1}, {1.4, 0.1}, region) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(torus_distance_2d({0.3, 0.7}, {0.3, 0.7}, region) == 0.0);
    CHECK(torus_distance_2d({0.0, 0.0}, {0.75, 0.75}, region) ==
          doctest::Approx(1.5 * std::sqrt(2.0) / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(torus_distance_2d({1.5, 0.1}, {0.1, 0.1}, region), std::invalid_argument);
    CHECK_THROWS_AS(torus_distance_2d({0.1, -0.01}, {0.1, 0.1}, region), std::invalid_argument);
}

TEST_CASE("torus distance never exceeds half the diagonal and is a metric")
{
    const Region region{1.5};
    RandomStream s{rng::seed_key(3)};
    const double cap = 1.5 * std::sqrt(2.0) / 2.0 + 1e-12;
    for (int k = 0; k < 2000; ++k) {
        const Point2D a{s.uniform() * 1.5, s.uniform() * 1.5};
        const Point2D b{s.uniform() * 1.5, s.uniform() * 1.5};
        const Point2D c{s.uniform() * 1.5, s.uniform() * 1.5};
        const double ab = torus_distance_2d(a, b, region);
        CHECK(ab <= cap);
        CHECK(ab == torus_distance_2d(b, a, region));
        CHECK(ab <= torus_distance_2d(a, c, region) + torus_distance_2d(c, b, region) + 1e-12);
    }
}

TEST_CASE("distance_3d")
{
    CHECK(distance_3d(0.0, 8.5) == doctest::Approx(0.0085).epsilon(1e-12));
    CHECK(distance_3d(0.006, 8.0) == doctest::Approx(0.010).epsilon(1e-12));
    CHECK(distance_3d(0.1, 0.0) == 0.1);
}

TEST_CASE("macro grid")
{
    const auto g = build_macro_grid(Region{1.5}, 0.5);
    CHECK(g.site_centers.size() >= 9);
    CHECK(g.site_centers.size() <= 12);
    CHECK(build_macro_grid(Region{0.5}, 10.0).site_centers.size() == 1);
    CHECK_THROWS_AS(build_macro_grid(Region{1.5}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_macro_grid(Region{1.5}, -1.0), std::invalid_argument);

    for (double isd : {0.5, 0.3, 0.17}) {
        const auto grid = build_macro_grid(Region{1.5}, isd);
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.site_centers.size(); ++i) {
            CHECK(Region{1.5}.contains(grid.site_centers[i]));
            for (std::size_t j = i + 1; j < grid.site_centers.size(); ++j) {
                const double dx = grid.site_centers[i].x_km - grid.site_centers[j].x_km;
                const double dy = grid.site_centers[i].y_km - grid.site_centers[j].y_km;
                nearest = std::min(nearest, std::hypot(dx, dy));
            }
        }
        CHECK(nearest == doctest::Approx(isd).epsilon(1e-9));
    }
}

TEST_CASE("deployment and UE drop counts")
{
    const Region region{1.5};
    RandomStream s{rng::seed_key(42)};
    const auto dep = deploy_bs(region, 2500.0, s);
    CHECK(dep.bs_positions.size() == 5625);
    for (auto p : dep.bs_positions) {
        REQUIRE(region.contains(p));
    }
    CHECK(drop_ues(region, 300.0, s).size() == 675);
    CHECK(deploy_bs(region, 0.0, s).bs_positions.empty());
    CHECK(drop_ues(region, 0.0, s).empty());

    RandomStream a{rng::seed_key(9)};
    RandomStream b{rng::seed_key(9)};
    CHECK(deploy_bs(region, 50.0, a).bs_positions == deploy_bs(region, 50.0, b).bs_positions);
}

TEST_CASE("UE drops are uniform")
{
    const Region region{1.5};
    RandomStream s{rng::seed_key(11)};
    std::vector<Point2D> pts;
    drop_uniform_points(region, 100000, s, pts);
    double mean_x = 0;
    std::array<int, 25> bins{};
    for (auto p : pts) {
        mean_x += p.x_km;
        bins[static_cast<std::size_t>(p.y_km / 0.3) * 5 + static_cast<std::size_t>(p.x_km / 0.3)]++;
    }
    mean_x /= static_cast<double>(pts.size());
    CHECK(mean_x == doctest::Approx(0.75).epsilon(0.01 / 0.75));

    // 24 degrees of freedom; the 0.999 quantile is 51.2.
    double chi2 = 0;
    for (int c : bins) {
        chi2 += (c - 4000.0) * (c - 4000.0) / 4000.0;
    }
    CHECK(chi2 < 51.2);
}

TEST_CASE("spatial index rings cover every point once")
{
    RandomStream s{rng::seed_key(5)};
    std::vector<Point2D> pts;
    drop_uniform_points(Region{1.0}, 300, s, pts);
    const SpatialIndex index{pts, 1.0};
    const Point2D q{0.05, 0.97};
    std::vector<int> seen(pts.size(), 0);
    for (int ring = 0; ring <= index.max_ring(); ++ring) {
        index.visit_ring(q, ring, [&](std::uint32_t i, double d2) {
            ++seen[i];
            CHECK(std::sqrt(d2) >= index.ring_min_distance(ring) - 1e-12);
            CHECK(d2 == doctest::Approx(torus_distance_sq(q, pts[i], 1.0)));
        });
    }
    for (int c : seen) {
        CHECK(c == 1);
    }
}
