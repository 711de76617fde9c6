#include "bestcell/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bestcell/errors.hpp"

namespace bestcell::geometry {

namespace {

constexpr double kSqrt3 = 1.73205080756887729353;

int hex_ring(int q, int r) { return std::max({std::abs(q), std::abs(r), std::abs(q + r)}); }

}  // namespace

std::size_t cell_count(int tiers) {
    const auto t = static_cast<std::size_t>(tiers);
    return 1 + 3 * t * (t + 1);
}

GridLayout build_grid(double half_spacing, int tiers) {
    if (!(half_spacing > 0.0)) throw DomainError("build_grid requires R_c > 0");
    if (tiers < 1) throw DomainError("build_grid requires at least one tier");

    struct Site {
        int ring;
        double angle;
        Point p;
    };
    std::vector<Site> sites;
    sites.reserve(cell_count(tiers));
    // Axial coordinates: basis vectors (2R_c, 0) and (R_c, √3·R_c).
    for (int q = -tiers; q <= tiers; ++q) {
        for (int r = -tiers; r <= tiers; ++r) {
            const int ring = hex_ring(q, r);
            if (ring > tiers) continue;
            const Point p{half_spacing * (2.0 * q + r), half_spacing * kSqrt3 * r};
            double angle = std::atan2(p.y, p.x);
            if (angle < 0.0) angle += 2.0 * std::numbers::pi;
            sites.push_back({ring, ring == 0 ? 0.0 : angle, p});
        }
    }
    std::sort(sites.begin(), sites.end(), [](const Site& lhs, const Site& rhs) {
        if (lhs.ring != rhs.ring) return lhs.ring < rhs.ring;
        return lhs.angle < rhs.angle;
    });

    GridLayout layout{half_spacing, tiers, {}};
    layout.positions.reserve(sites.size());
    for (const auto& s : sites) layout.positions.push_back(s.p);
    return layout;
}

NearestDistances nearest_distances(double r_b, double half_spacing) {
    if (!(half_spacing > 0.0)) throw DomainError("nearest_distances requires R_c > 0");
    if (!(r_b > 0.0 && r_b < 2.0 * half_spacing)) {
        throw DomainError("nearest_distances requires 0 < r_b < 2 R_c");
    }
    constexpr double pi = std::numbers::pi;
    const double spacing = 2.0 * half_spacing;
    const auto side = [&](double bearing) {
        return std::sqrt(r_b * r_b + spacing * spacing - 2.0 * spacing * r_b * std::cos(bearing));
    };
    NearestDistances d;
    d.r1 = side(pi / 12.0);
    d.r2 = side(pi / 3.0 - pi / 12.0);
    d.r3 = side(pi / 3.0 + pi / 12.0);
    d.rd = 0.5 * (d.r2 + d.r3);
    return d;
}

double bs_density(double half_spacing) {
    if (!(half_spacing > 0.0)) throw DomainError("bs_density requires R_c > 0");
    return 1.0 / (2.0 * kSqrt3 * half_spacing * half_spacing);
}

double equivalent_network_radius(const GridLayout& layout) {
    const double cell_area = 2.0 * kSqrt3 * layout.half_spacing * layout.half_spacing;
    return std::sqrt(static_cast<double>(layout.size()) * cell_area / std::numbers::pi);
}

}  // namespace bestcell::geometry
