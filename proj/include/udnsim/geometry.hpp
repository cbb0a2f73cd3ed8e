#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "udnsim/rng.hpp"

namespace udnsim {

struct Point2D {
    double x_km = 0.0;
    double y_km = 0.0;

    friend bool operator==(const Point2D&, const Point2D&) = default;
};

/// The square [0, side_km)^2, treated as a torus for distances.
class Region {
public:
    explicit Region(double side_km);

    double side_km() const noexcept { return side_km_; }
    double area_km2() const noexcept { return side_km_ * side_km_; }
    bool contains(Point2D p) const noexcept;

private:
    double side_km_;
};

/// Hexagonal macro-site layout. Display and guide metadata only.
struct MacroGrid {
    double inter_site_distance_km = 0.0;
    std::vector<Point2D> site_centers;
    static constexpr int sectors_per_site = 3;
};

struct Deployment {
    Region region{1.5};
    std::vector<Point2D> bs_positions;
    double bs_antenna_height_m = 1.5;
    double ue_antenna_height_m = 1.5;
    std::optional<MacroGrid> macro_grid;

    double antenna_delta_m() const noexcept { return bs_antenna_height_m - ue_antenna_height_m; }
    std::size_t bs_count() const noexcept { return bs_positions.size(); }
};

/// Centres of a hex lattice anchored at the origin that fall inside the
/// region. Throws std::invalid_argument for isd_km <= 0.
MacroGrid build_macro_grid(const Region& region, double isd_km);

/// round(lambda * area) BSs i.i.d. uniform over the region.
Deployment deploy_bs(const Region& region, double lambda_bs_per_km2, RandomStream& stream);

/// round(rho * area) UEs i.i.d. uniform over the region.
std::vector<Point2D> drop_ues(const Region& region, double rho_ues_per_km2, RandomStream& stream);

/// Appends `count` uniform points to `out` (allocation-free hot path of drop_ues).
void drop_uniform_points(const Region& region, std::size_t count, RandomStream& stream,
                         std::vector<Point2D>& out);

std::size_t expected_count(const Region& region, double density_per_km2);

/// Axis delta b - a reduced to [-side/2, side/2].
inline double wrap_delta(double delta, double side) noexcept
{
    const double half = 0.5 * side;
    if (delta > half) {
        delta -= side;
    } else if (delta < -half) {
        delta += side;
    }
    return delta;
}

/// Squared torus distance without range checks (inputs must lie in the region).
inline double torus_distance_sq(Point2D a, Point2D b, double side) noexcept
{
    const double dx = wrap_delta(b.x_km - a.x_km, side);
    const double dy = wrap_delta(b.y_km - a.y_km, side);
    return dx * dx + dy * dy;
}

/// Torus distance in km. Throws std::invalid_argument if a point lies outside the region.
double torus_distance_2d(Point2D a, Point2D b, const Region& region);

/// sqrt(d^2 + (delta_h/1000)^2), in km.
double distance_3d(double d_km, double delta_h_m);

/// Uniform bucket grid over the torus for nearest-first searches.
class SpatialIndex {
public:
    SpatialIndex() = default;
    SpatialIndex(std::span<const Point2D> points, double side_km, double target_per_cell = 2.0);

    int cells_per_side() const noexcept { return cells_; }
    double cell_km() const noexcept { return cell_km_; }
    std::span<const Point2D> points() const noexcept { return points_; }

    /// Calls visit(index, d2_km2) for the points of every cell at Chebyshev
    /// ring `ring` around the cell of `q`. Every point of ring k is at least
    /// ring_min_distance(k) away from q. Returns false once the ring wraps
    /// past the whole torus (all cells already visited).
    template <class Visit>
    bool visit_ring(Point2D q, int ring, Visit&& visit) const;

    double ring_min_distance(int ring) const noexcept
    {
        return ring <= 1 ? 0.0 : (ring - 1) * cell_km_;
    }

    int max_ring() const noexcept { return cells_ / 2; }

private:
    int cell_of(double coord) const noexcept;
    void visit_cell(int cx, int cy, Point2D q, auto& visit) const;

    std::vector<Point2D> points_;
    std::vector<std::uint32_t> cell_start_;
    std::vector<std::uint32_t> order_;
    std::vector<Point2D> sorted_;
    double side_km_ = 1.0;
    double cell_km_ = 1.0;
    int cells_ = 1;
};

inline int SpatialIndex::cell_of(double coord) const noexcept
{
    int c = static_cast<int>(coord / cell_km_);
    return c >= cells_ ? cells_ - 1 : (c < 0 ? 0 : c);
}

inline void SpatialIndex::visit_cell(int cx, int cy, Point2D q, auto& visit) const
{
    cx = ((cx % cells_) + cells_) % cells_;
    cy = ((cy % cells_) + cells_) % cells_;
    const auto cell = static_cast<std::size_t>(cy) * cells_ + cx;
    for (auto k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
        visit(order_[k], torus_distance_sq(q, sorted_[k], side_km_));
    }
}

template <class Visit>
bool SpatialIndex::visit_ring(Point2D q, int ring, Visit&& visit) const
{
    // Rings beyond cells_/2 revisit cells; callers stop at max_ring().
    if (ring > max_ring()) {
        return false;
    }
    const int qx = cell_of(q.x_km);
    const int qy = cell_of(q.y_km);
    if (ring == 0) {
        visit_cell(qx, qy, q, visit);
        return true;
    }
    if (2 * ring == cells_) {
        // Even cell count, last ring: opposite edges are the same cells.
        for (int dx = -ring; dx <= ring - 1; ++dx) {
            visit_cell(qx + dx, qy - ring, q, visit);
        }
        for (int dy = -ring + 1; dy <= ring - 1; ++dy) {
            visit_cell(qx - ring, qy + dy, q, visit);
        }
        return true;
    }
    for (int dx = -ring; dx <= ring; ++dx) {
        visit_cell(qx + dx, qy - ring, q, visit);
        visit_cell(qx + dx, qy + ring, q, visit);
    }
    for (int dy = -ring + 1; dy <= ring - 1; ++dy) {
        visit_cell(qx - ring, qy + dy, q, visit);
        visit_cell(qx + ring, qy + dy, q, visit);
    }
    return true;
}

} // namespace udnsim
