#include "udnsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace udnsim {

Region::Region(double side_km) : side_km_{side_km}
{
    if (!(side_km > 0.0) || !std::isfinite(side_km)) {
        throw std::invalid_argument("region side must be positive, got " + std::to_string(side_km));
    }
}

bool Region::contains(Point2D p) const noexcept
{
    return std::isfinite(p.x_km) && std::isfinite(p.y_km) && p.x_km >= 0.0 && p.y_km >= 0.0 &&
           p.x_km < side_km_ && p.y_km < side_km_;
}

MacroGrid build_macro_grid(const Region& region, double isd_km)
{
    if (!(isd_km > 0.0) || !std::isfinite(isd_km)) {
        throw std::invalid_argument("inter-site distance must be positive");
    }
    MacroGrid grid;
    grid.inter_site_distance_km = isd_km;
    const double row_step = isd_km * std::sqrt(3.0) / 2.0;
    const double side = region.side_km();
    for (int row = 0; row * row_step < side; ++row) {
        const double offset = (row % 2 == 1) ? 0.5 * isd_km : 0.0;
        for (int col = 0; col * isd_km + offset < side; ++col) {
            grid.site_centers.push_back({col * isd_km + offset, row * row_step});
        }
    }
    return grid;
}

std::size_t expected_count(const Region& region, double density_per_km2)
{
    if (!(density_per_km2 >= 0.0) || !std::isfinite(density_per_km2)) {
        throw std::invalid_argument("density must be a finite non-negative number");
    }
    return static_cast<std::size_t>(std::llround(density_per_km2 * region.area_km2()));
}

void drop_uniform_points(const Region& region, std::size_t count, RandomStream& stream,
                         std::vector<Point2D>& out)
{
    const double side = region.side_km();
    const double top = std::nextafter(side, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        // u * side can round up to side for u within 2^-53 of 1.
        const double x = std::min(stream.uniform() * side, top);
        const double y = std::min(stream.uniform() * side, top);
        out.push_back({x, y});
    }
}

Deployment deploy_bs(const Region& region, double lambda_bs_per_km2, RandomStream& stream)
{
    Deployment deployment;
    deployment.region = region;
    const auto n = expected_count(region, lambda_bs_per_km2);
    deployment.bs_positions.reserve(n);
    drop_uniform_points(region, n, stream, deployment.bs_positions);
    deployment.macro_grid = build_macro_grid(region, 0.5);
    return deployment;
}

std::vector<Point2D> drop_ues(const Region& region, double rho_ues_per_km2, RandomStream& stream)
{
    std::vector<Point2D> ues;
    const auto m = expected_count(region, rho_ues_per_km2);
    ues.reserve(m);
    drop_uniform_points(region, m, stream, ues);
    return ues;
}

double torus_distance_2d(Point2D a, Point2D b, const Region& region)
{
    if (!region.contains(a) || !region.contains(b)) {
        throw std::invalid_argument("point outside region");
    }
    return std::sqrt(torus_distance_sq(a, b, region.side_km()));
}

double distance_3d(double d_km, double delta_h_m)
{
    const double h_km = delta_h_m / 1000.0;
    return std::sqrt(d_km * d_km + h_km * h_km);
}

SpatialIndex::SpatialIndex(std::span<const Point2D> points, double side_km, double target_per_cell)
    : points_(points.begin(), points.end()), side_km_{side_km}
{
    const double n = std::max<double>(1.0, static_cast<double>(points.size()));
    cells_ = std::max(1, static_cast<int>(std::floor(std::sqrt(n / target_per_cell))));
    cell_km_ = side_km / cells_;

    const auto cell_count = static_cast<std::size_t>(cells_) * cells_;
    std::vector<std::uint32_t> cell_of_point(points.size());
    cell_start_.assign(cell_count + 1, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto c = static_cast<std::uint32_t>(cell_of(points[i].y_km) * cells_ + cell_of(points[i].x_km));
        cell_of_point[i] = c;
        ++cell_start_[c + 1];
    }
    std::partial_sum(cell_start_.begin(), cell_start_.end(), cell_start_.begin());
    order_.resize(points.size());
    sorted_.resize(points.size());
    auto fill = cell_start_;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto slot = fill[cell_of_point[i]]++;
        order_[slot] = static_cast<std::uint32_t>(i);
        sorted_[slot] = points[i];
    }
}

} // namespace udnsim
