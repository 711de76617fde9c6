#pragma once

#include <cstddef>
#include <vector>

namespace bestcell::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Hexagonal co-channel lattice with the serving base station at the origin.
///
/// Neighbouring stations sit 2·half_spacing apart. Positions are ordered by
/// ring, then by angle within the ring, so index 0 is always the serving cell.
struct GridLayout {
    double half_spacing = 0.0;  // R_c in metres
    int tiers = 0;
    std::vector<Point> positions;

    std::size_t size() const { return positions.size(); }
};

/// Distances from a mobile at r_b to its three nearest co-channel stations,
/// taken at the median bearing inside the 30° symmetry wedge.
struct NearestDistances {
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;
    double rd = 0.0;  // (r2 + r3) / 2, inner radius of the fluid ring
};

/// Number of stations in a lattice of `tiers` rings: 1 + 3·t·(t + 1).
std::size_t cell_count(int tiers);

GridLayout build_grid(double half_spacing, int tiers);

NearestDistances nearest_distances(double r_b, double half_spacing);

/// Stations per square metre of a hexagonal grid with spacing 2·R_c.
double bs_density(double half_spacing);

/// Radius of the disc whose area equals the hexagonal cells of `layout`.
///
/// Used as the outer radius of the fluid interference ring when the analytic
/// model is compared with a simulation on the same finite lattice.
double equivalent_network_radius(const GridLayout& layout);

}  // namespace bestcell::geometry
