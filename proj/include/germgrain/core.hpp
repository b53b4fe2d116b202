#pragma once

// Core geometry and randomness for germ-grain simulations: axis-aligned
// windows, flat point storage, a counter-based splittable RNG, and a uniform
// cell grid for fixed-radius neighbour queries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace germgrain {

using Point = std::vector<double>;

inline double sq(double x) { return x * x; }

/// Half-open axis-aligned box [lower, upper). Membership, volume and dilation
/// all use this convention; dilation by m > 0 gives [lower-m, upper+m).
struct Window {
    Point lower;
    Point upper;

    Window() = default;
    Window(Point lo, Point hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size() || lower.empty())
            throw std::invalid_argument("window: dimension mismatch");
        for (std::size_t i = 0; i < lower.size(); ++i)
            if (!(lower[i] < upper[i]))
                throw std::invalid_argument("window: lower must be strictly below upper");
    }
    /// Square window [lo, hi)^d.
    static Window cube(double lo, double hi, int d) {
        return Window(Point(static_cast<std::size_t>(d), lo), Point(static_cast<std::size_t>(d), hi));
    }

    int dim() const { return static_cast<int>(lower.size()); }
    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
        return v;
    }
    double side(int axis) const { return upper[static_cast<std::size_t>(axis)] - lower[static_cast<std::size_t>(axis)]; }
    bool contains(std::span<const double> p) const {
        for (std::size_t i = 0; i < lower.size(); ++i)
            if (!(p[i] >= lower[i] && p[i] < upper[i])) return false;
        return true;
    }
    Window dilated(double m) const {
        Point lo = lower, hi = upper;
        for (std::size_t i = 0; i < lo.size(); ++i) { lo[i] -= m; hi[i] += m; }
        return Window(std::move(lo), std::move(hi));
    }
    /// Erosion by m (empty result throws).
    Window eroded(double m) const { return dilated(-m); }
};

inline double distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += sq(p[i] - q[i]);
    return std::sqrt(s);
}
inline double distance(const Point& p, const Point& q) {
    return distance(std::span<const double>(p), std::span<const double>(q));
}

/// Distance from p to the closed box [lo, hi] (0 inside).
inline double dist_to_box(std::span<const double> p, std::span<const double> lo, std::span<const double> hi) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = 0.0;
        if (p[i] < lo[i]) d = lo[i] - p[i];
        else if (p[i] > hi[i]) d = p[i] - hi[i];
        s += sq(d);
    }
    return std::sqrt(s);
}

/// Finite point configuration. Points are stored flat (dim * n doubles) and
/// every point lies in window.dilated(margin_used); points in the dilated
/// collar exist only to remove edge effects and are excluded from estimators
/// that are defined on the undilated window.
struct PointPattern {
    int dim = 0;
    Window window;
    double margin_used = 0.0;
    std::vector<double> xs;

    PointPattern() = default;
    explicit PointPattern(const Window& w, double margin = 0.0)
        : dim(w.dim()), window(w), margin_used(margin) {}

    std::size_t size() const { return dim == 0 ? 0 : xs.size() / static_cast<std::size_t>(dim); }
    std::span<const double> point(std::size_t i) const {
        return std::span<const double>(xs).subspan(i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
    }
    Point point_copy(std::size_t i) const {
        auto p = point(i);
        return Point(p.begin(), p.end());
    }
    void push_back(std::span<const double> p) {
        if (static_cast<int>(p.size()) != dim) throw std::invalid_argument("pattern: point dimension mismatch");
        xs.insert(xs.end(), p.begin(), p.end());
    }
    /// Count of points inside the undilated window.
    std::size_t count_in_window() const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < size(); ++i)
            if (window.contains(point(i))) ++c;
        return c;
    }
    void validate() const {
        Window w = window.dilated(margin_used);
        for (std::size_t i = 0; i < size(); ++i)
            if (!w.contains(point(i)))
                throw std::logic_error("pattern: point outside dilated window");
    }
};

// ---------------------------------------------------------------------------
// Counter-based splittable RNG.
//
// A stream is a pure function of (root seed, derivation path): the key is the
// SplitMix64 finalizer applied to the parent key combined with the FNV-1a hash
// of the label, and the i-th output is mix64(key + i * golden). Deriving
// commutes with nothing: derive(derive(s,"a"),"b") and derive(s,"ab") are
// distinct streams by construction (different hash chains).
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30; z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27; z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) { h ^= static_cast<unsigned char>(c); h *= 0x100000001B3ULL; }
    return h;
}

struct RngStream {
    std::uint64_t seed = 0;              // root seed
    std::vector<std::string> path;       // derivation labels from the root
    std::uint64_t key = 0;
    std::uint64_t counter = 0;

    static RngStream from_seed(std::uint64_t s) {
        RngStream r;
        r.seed = s;
        r.key = mix64(s ^ kGolden);
        return r;
    }

    std::uint64_t next_u64() { return mix64(key + (++counter) * kGolden); }

    /// Uniform double in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    /// Uniform double in (0, 1]; safe as a log() argument.
    double u01_open() { return 1.0 - u01(); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift; bias < 2^-64, irrelevant for the n used here
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }
};

inline RngStream derive(const RngStream& parent, std::string_view label) {
    RngStream child;
    child.seed = parent.seed;
    child.path = parent.path;
    child.path.emplace_back(label);
    child.key = mix64(mix64(parent.key ^ 0xD6E8FEB86659FD93ULL) ^ fnv1a64(label));
    child.counter = 0;
    return child;
}

inline RngStream derive(const RngStream& parent, std::string_view label, std::uint64_t index) {
    return derive(parent, std::string(label) + ":" + std::to_string(index));
}

// --- distribution draws ----------------------------------------------------

inline double normal01(RngStream& g) {
    // Box-Muller, both uniforms fresh each call to keep draws counter-pure
    double u = g.u01_open(), v = g.u01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
}

/// Exact Poisson. Log-space Knuth below mean 30, Hormann's PTRD above.
inline std::int64_t poisson(RngStream& g, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("poisson: bad mean");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        double acc = 0.0;
        std::int64_t k = -1;
        while (acc <= mean) { acc += -std::log(g.u01_open()); ++k; }
        return k;
    }
    // PTRD (transformed rejection with decomposition)
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double U = g.u01() - 0.5;
        double V = g.u01_open();
        double us = 0.5 - std::abs(U);
        std::int64_t k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * U + mean + 0.43));
        if (us >= 0.07 && V <= v_r) return k;
        if (k < 0 || (us < 0.013 && V > us)) continue;
        if (std::log(V * inv_alpha / (a / (us * us) + b)) <=
            static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0))
            return k;
    }
}

inline std::int64_t bernoulli(RngStream& g, double p) { return g.u01() < p ? 1 : 0; }

inline std::int64_t binomial(RngStream& g, std::int64_t n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: bad parameters");
    std::int64_t k = 0;
    for (std::int64_t i = 0; i < n; ++i) k += bernoulli(g, p);
    return k;
}

/// Failures before the first success: pmf p(1-p)^i, mean 1/p - 1.
inline std::int64_t geometric(RngStream& g, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geometric: bad p");
    if (p == 1.0) return 0;
    return static_cast<std::int64_t>(std::floor(std::log(g.u01_open()) / std::log1p(-p)));
}

inline double gamma_dist(RngStream& g, double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("gamma: bad parameters");
    if (shape < 1.0) {
        double u = g.u01_open();
        return gamma_dist(g, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal01(g);
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = g.u01_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

/// pmf C(r+i-1, i) p^i (1-p)^r for real r > 0, mean r p / (1-p).
inline std::int64_t neg_binomial(RngStream& g, double r, double p) {
    if (!(r > 0.0) || !(p > 0.0 && p < 1.0)) throw std::invalid_argument("neg_binomial: bad parameters");
    double lambda = gamma_dist(g, r, p / (1.0 - p));
    return poisson(g, lambda);
}

/// Draw k from an urn of n with m marked; returns marked count.
inline std::int64_t hypergeometric(RngStream& g, std::int64_t n, std::int64_t m, std::int64_t k) {
    if (n < 0 || m < 0 || m > n || k < 0 || k > n) throw std::invalid_argument("hypergeometric: bad parameters");
    std::int64_t marked = m, total = n, got = 0;
    for (std::int64_t i = 0; i < k; ++i) {
        if (g.below(static_cast<std::uint64_t>(total)) < static_cast<std::uint64_t>(marked)) { ++got; --marked; }
        --total;
    }
    return got;
}

// ---------------------------------------------------------------------------
// Cell grid: associative map from integer cell coordinates to point indices,
// stored as a cell-sorted flat index (compact, cache-friendly). Supports
// d <= 3 (each cell coordinate must fit 21 signed bits).
// ---------------------------------------------------------------------------

struct CellGrid {
    double cell_size = 0.0;
    int dim = 0;
    // cells: sorted (packed cell id, point index) pairs
    std::vector<std::uint64_t> cell_ids;
    std::vector<std::int32_t> order;

    static constexpr std::int64_t kCoordBias = 1 << 20;

    static std::uint64_t pack(std::span<const std::int64_t> c) {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            std::int64_t b = c[i] + kCoordBias;
            if (b < 0 || b >= (1 << 21)) throw std::out_of_range("cell grid: coordinate out of range");
            k = (k << 21) | static_cast<std::uint64_t>(b);
        }
        return k;
    }

    std::int64_t cell_coord(double x) const { return static_cast<std::int64_t>(std::floor(x / cell_size)); }

    /// Indices of points in the given cell.
    std::span<const std::int32_t> cell(std::span<const std::int64_t> coords) const {
        std::uint64_t k = pack(coords);
        auto lo = std::lower_bound(cell_ids.begin(), cell_ids.end(), k);
        auto hi = std::upper_bound(lo, cell_ids.end(), k);
        return std::span<const std::int32_t>(order).subspan(
            static_cast<std::size_t>(lo - cell_ids.begin()), static_cast<std::size_t>(hi - lo));
    }
};

inline CellGrid build_cell_grid(const PointPattern& pat, double cell_size) {
    if (!(cell_size > 0.0)) throw std::invalid_argument("cell grid: cell_size must be positive");
    if (pat.dim < 1 || pat.dim > 3) throw std::invalid_argument("cell grid: dimension must be 1..3");
    CellGrid grid;
    grid.cell_size = cell_size;
    grid.dim = pat.dim;
    const std::size_t n = pat.size();
    std::vector<std::pair<std::uint64_t, std::int32_t>> tmp(n);
    std::array<std::int64_t, 3> c{};
    for (std::size_t i = 0; i < n; ++i) {
        auto p = pat.point(i);
        for (int k = 0; k < pat.dim; ++k) c[static_cast<std::size_t>(k)] = grid.cell_coord(p[static_cast<std::size_t>(k)]);
        tmp[i] = {CellGrid::pack(std::span<const std::int64_t>(c.data(), static_cast<std::size_t>(pat.dim))),
                  static_cast<std::int32_t>(i)};
    }
    std::sort(tmp.begin(), tmp.end());
    grid.cell_ids.resize(n);
    grid.order.resize(n);
    for (std::size_t i = 0; i < n; ++i) { grid.cell_ids[i] = tmp[i].first; grid.order[i] = tmp[i].second; }
    return grid;
}

/// Indices of pattern points within Euclidean distance `radius` of q
/// (closed ball), optionally excluding one index. Ascending order.
inline std::vector<std::int32_t> neighbors_within(const CellGrid& grid, const PointPattern& pat,
                                                  std::span<const double> q, double radius,
                                                  std::int32_t exclude = -1) {
    if (radius < 0.0) throw std::invalid_argument("neighbors_within: negative radius");
    std::vector<std::int32_t> out;
    std::array<std::int64_t, 3> lo{}, hi{}, cur{};
    const int d = grid.dim;
    for (int k = 0; k < d; ++k) {
        lo[static_cast<std::size_t>(k)] = grid.cell_coord(q[static_cast<std::size_t>(k)] - radius);
        hi[static_cast<std::size_t>(k)] = grid.cell_coord(q[static_cast<std::size_t>(k)] + radius);
    }
    const double r2 = radius * radius;
    cur = lo;
    for (;;) {
        for (std::int32_t idx : grid.cell(std::span<const std::int64_t>(cur.data(), static_cast<std::size_t>(d)))) {
            if (idx == exclude) continue;
            auto p = pat.point(static_cast<std::size_t>(idx));
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += sq(p[static_cast<std::size_t>(k)] - q[static_cast<std::size_t>(k)]);
            if (s <= r2) out.push_back(idx);
        }
        int axis = 0;
        while (axis < d) {
            if (++cur[static_cast<std::size_t>(axis)] <= hi[static_cast<std::size_t>(axis)]) break;
            cur[static_cast<std::size_t>(axis)] = lo[static_cast<std::size_t>(axis)];
            ++axis;
        }
        if (axis == d) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace germgrain
