#include "tatrec/geometry.hpp"
#include "tatrec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <queue>
#include <sstream>

namespace tatrec {

double DomainShape::signed_distance(double x, double y) const {
    double ddx = x - cx, ddy = y - cy;
    if (kind == ShapeKind::Disk)
        return std::hypot(ddx, ddy) - half;
    double qx = std::fabs(ddx) - half;
    double qy = std::fabs(ddy) - half;
    if (qx <= 0.0 && qy <= 0.0) return std::max(qx, qy);
    return std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
}

double DomainShape::arc_position(double x, double y) const {
    double ddx = x - cx, ddy = y - cy;
    if (kind == ShapeKind::Disk) {
        double t = std::atan2(ddy, ddx) / (2.0 * M_PI);
        t -= std::floor(t);
        return t;
    }
    // Walk the perimeter counterclockwise from the lower-left corner. The
    // dominant coordinate decides the edge, so slightly off-boundary points
    // (geodesic exits) land on the nearest edge.
    double h = half;
    double per = 8.0 * h;
    double s;
    if (std::fabs(ddx) >= std::fabs(ddy)) {
        double t = std::clamp(ddy, -h, h);
        s = (ddx > 0.0) ? 2.0 * h + (t + h)   // right edge, +y
                        : 6.0 * h + (h - t);  // left edge, -y
    } else {
        double t = std::clamp(ddx, -h, h);
        s = (ddy > 0.0) ? 4.0 * h + (h - t)   // top edge, -x
                        : (t + h);            // bottom edge, +x
    }
    double a = s / per;
    a -= std::floor(a);
    return a;
}

double DomainShape::perimeter() const {
    return kind == ShapeKind::Disk ? 2.0 * M_PI * half : 8.0 * half;
}

double DomainShape::diameter() const {
    return kind == ShapeKind::Disk ? 2.0 * half : 2.0 * std::sqrt(2.0) * half;
}

bool DomainGeometry::in_region(int i, int j) const {
    if (interior_mask[grid.idx(i, j)]) return true;
    for (const auto& b : gamma)
        if (b.i == i && b.j == j) return true;
    return false;
}

bool arc_in_interval(double arc, double s0, double s1) {
    if (s0 <= s1) return arc >= s0 && arc < s1;
    return arc >= s0 || arc < s1; // wraps through zero
}

namespace {

// Flood fill used for the connectivity checks; 4-adjacency.
int flood_count(const std::vector<std::uint8_t>& mask, const Grid2D& g, int si, int sj) {
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::queue<std::pair<int, int>> q;
    q.push({si, sj});
    seen[g.idx(si, sj)] = 1;
    int count = 0;
    while (!q.empty()) {
        auto [i, j] = q.front();
        q.pop();
        ++count;
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int n = 0; n < 4; ++n) {
            int ii = i + di[n], jj = j + dj[n];
            if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) continue;
            std::size_t k = g.idx(ii, jj);
            if (!mask[k] || seen[k]) continue;
            seen[k] = 1;
            q.push({ii, jj});
        }
    }
    return count;
}

} // namespace

DomainGeometry build_geometry(const Grid2D& grid, ShapeKind kind, double half,
                              std::optional<std::pair<double, double>> gamma_prime_arc) {
    if (!(half > 0.0))
        throw ConfigError("domain size must be positive");

    DomainGeometry geo;
    geo.grid = grid;

    const int ci = (grid.nx - 1) / 2;
    const int cj = (grid.ny - 1) / 2;

    DomainShape shape;
    shape.kind = kind;
    shape.cx = grid.x(ci);
    shape.cy = grid.y(cj);
    if (kind == ShapeKind::Square) {
        // Snap the half side to whole cells so the boundary ring lies on
        // samples exactly.
        int m = static_cast<int>(std::lround(half / grid.dx));
        if (m < 2)
            throw ConfigError("square domain too small for this grid spacing");
        shape.half = m * grid.dx;
    } else {
        shape.half = half;
        if (half / grid.dx < 3.0)
            throw ConfigError("disk domain too small for this grid spacing");
    }
    geo.shape = shape;

    // Membership of the closed region.
    std::vector<std::uint8_t> region(grid.size(), 0);
    if (kind == ShapeKind::Square) {
        int m = static_cast<int>(std::lround(shape.half / grid.dx));
        for (int j = cj - m; j <= cj + m; ++j)
            for (int i = ci - m; i <= ci + m; ++i) {
                if (i < 0 || i >= grid.nx || j < 0 || j >= grid.ny)
                    throw ConfigError("domain does not fit inside the grid");
                region[grid.idx(i, j)] = 1;
            }
    } else {
        double r_cells = shape.half / grid.dx;
        double r2 = r_cells * r_cells;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                double di = i - ci, dj = j - cj;
                if (di * di + dj * dj <= r2) region[grid.idx(i, j)] = 1;
            }
    }

    // The region must stay clear of the box edge; the buffer contract is
    // checked per solve, this guards plain indexing.
    for (int i = 0; i < grid.nx; ++i)
        if (region[grid.idx(i, 0)] || region[grid.idx(i, grid.ny - 1)])
            throw ConfigError("domain touches the box edge; enlarge the box");
    for (int j = 0; j < grid.ny; ++j)
        if (region[grid.idx(0, j)] || region[grid.idx(grid.nx - 1, j)])
            throw ConfigError("domain touches the box edge; enlarge the box");

    // Boundary ring: region samples with a 4-neighbor outside the region.
    std::vector<std::uint8_t> is_gamma(grid.size(), 0);
    geo.interior_mask.assign(grid.size(), 0);
    std::vector<BoundarySample> ring;
    for (int j = 1; j < grid.ny - 1; ++j)
        for (int i = 1; i < grid.nx - 1; ++i) {
            if (!region[grid.idx(i, j)]) continue;
            bool outside_neighbor = !region[grid.idx(i + 1, j)] || !region[grid.idx(i - 1, j)] ||
                                    !region[grid.idx(i, j + 1)] || !region[grid.idx(i, j - 1)];
            if (outside_neighbor) {
                is_gamma[grid.idx(i, j)] = 1;
                BoundarySample b;
                b.i = i;
                b.j = j;
                ring.push_back(b);
            } else {
                geo.interior_mask[grid.idx(i, j)] = 1;
            }
        }
    if (ring.size() < 8)
        throw ConfigError("degenerate domain boundary");

    // Normals and arc positions.
    for (auto& b : ring) {
        double px = grid.x(b.i), py = grid.y(b.j);
        if (kind == ShapeKind::Disk) {
            double ddx = px - shape.cx, ddy = py - shape.cy;
            double r = std::hypot(ddx, ddy);
            b.normal_x = ddx / r;
            b.normal_y = ddy / r;
        } else {
            int m = static_cast<int>(std::lround(shape.half / grid.dx));
            int di = b.i - ci, dj = b.j - cj;
            double nx_ = (di == m) ? 1.0 : (di == -m) ? -1.0 : 0.0;
            double ny_ = (dj == m) ? 1.0 : (dj == -m) ? -1.0 : 0.0;
            double len = std::hypot(nx_, ny_);
            b.normal_x = nx_ / len;
            b.normal_y = ny_ / len;
        }
        b.arc = shape.arc_position(px, py);
    }
    std::sort(ring.begin(), ring.end(),
              [](const BoundarySample& a, const BoundarySample& b) { return a.arc < b.arc; });
    geo.gamma = std::move(ring);

    // Every boundary sample must see the interior (8-neighborhood); thinner
    // configurations cannot carry the backward solve.
    for (const auto& b : geo.gamma) {
        bool ok = false;
        for (int dj = -1; dj <= 1 && !ok; ++dj)
            for (int di = -1; di <= 1 && !ok; ++di) {
                if (di == 0 && dj == 0) continue;
                if (geo.interior_mask[grid.idx(b.i + di, b.j + dj)]) ok = true;
            }
        if (!ok)
            throw ConfigError("boundary sample without interior neighbor; domain too thin");
    }

    // Connectivity of the region and of its complement (no holes).
    {
        int first = -1;
        int total = 0;
        for (std::size_t k = 0; k < region.size(); ++k) {
            if (region[k]) {
                ++total;
                if (first < 0) first = static_cast<int>(k);
            }
        }
        int reached = flood_count(region, grid, first % grid.nx, first / grid.nx);
        if (reached != total)
            throw ConfigError("domain region is not connected");
        std::vector<std::uint8_t> outside(grid.size(), 0);
        int out_total = 0;
        for (std::size_t k = 0; k < region.size(); ++k) {
            outside[k] = !region[k];
            out_total += outside[k];
        }
        if (flood_count(outside, grid, 0, 0) != out_total)
            throw ConfigError("domain region has holes");
    }

    // Clearance between the boundary ring and the box edge.
    double buf = std::numeric_limits<double>::infinity();
    for (const auto& b : geo.gamma) {
        double px = grid.x(b.i), py = grid.y(b.j);
        double d = std::min(std::min(px - grid.origin_x, grid.origin_x + grid.extent_x() - px),
                            std::min(py - grid.origin_y, grid.origin_y + grid.extent_y() - py));
        buf = std::min(buf, d);
    }
    geo.buffer_width = buf;

    geo.gamma_prime_arc = gamma_prime_arc;
    geo.gamma_prime_mask.assign(geo.gamma.size(), 1);
    if (gamma_prime_arc) {
        auto [s0, s1] = *gamma_prime_arc;
        if (s0 < 0.0 || s0 >= 1.0 || s1 < 0.0 || s1 > 1.0)
            throw ConfigError("observed-arc endpoints must lie in [0,1)");
        for (std::size_t k = 0; k < geo.gamma.size(); ++k)
            geo.gamma_prime_mask[k] = arc_in_interval(geo.gamma[k].arc, s0, s1) ? 1 : 0;
    }

    return geo;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void append_bits(std::ostringstream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    os << bits << ';';
}

} // namespace

std::uint64_t geometry_hash(const DomainGeometry& g) {
    std::ostringstream os;
    os << (g.shape.kind == ShapeKind::Disk ? "disk" : "square") << ';'
       << g.grid.nx << ';' << g.grid.ny << ';';
    append_bits(os, g.grid.dx);
    append_bits(os, g.grid.origin_x);
    append_bits(os, g.grid.origin_y);
    append_bits(os, g.shape.cx);
    append_bits(os, g.shape.cy);
    append_bits(os, g.shape.half);
    os << g.gamma.size() << ';';
    if (g.gamma_prime_arc) {
        append_bits(os, g.gamma_prime_arc->first);
        append_bits(os, g.gamma_prime_arc->second);
    }
    return fnv1a(os.str());
}

std::string hash_string(std::uint64_t h) {
    static const char* hex = "0123456789abcdef";
    std::string s(16, '0');
    for (int k = 15; k >= 0; --k) {
        s[k] = hex[h & 0xf];
        h >>= 4;
    }
    return s;
}

} // namespace tatrec
