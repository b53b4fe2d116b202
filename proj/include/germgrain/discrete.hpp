#pragma once

// Discrete side of the Boolean model: site fields on a scaled lattice with
// Moore adjacency, blocking contours around the origin, expected void-contour
// sums with an explicit geometric tail, and counts of open germ paths from
// the origin to the boundary of a centred box.

#include <functional>
#include <map>
#include <queue>

#include "percolation.hpp"

namespace germgrain {

// --- site fields -----------------------------------------------------------

struct LatticeGraphSpec {
    int dim = 2;
    double scale = 1.0;  // site spacing; cells are site + (-scale/2, scale/2]^d
};

struct SiteField {
    LatticeGraphSpec spec;
    std::array<std::int64_t, 3> lo{}, hi{};  // inclusive index ranges
    std::vector<std::uint8_t> open;          // row-major, axis 0 slowest

    std::int64_t extent(int axis) const {
        return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)] + 1;
    }
    std::size_t index(std::span<const std::int64_t> c) const {
        std::size_t idx = 0;
        for (int k = 0; k < spec.dim; ++k) {
            auto kk = static_cast<std::size_t>(k);
            idx = idx * static_cast<std::size_t>(extent(k)) + static_cast<std::size_t>(c[kk] - lo[kk]);
        }
        return idx;
    }
    bool in_range(std::span<const std::int64_t> c) const {
        for (int k = 0; k < spec.dim; ++k) {
            auto kk = static_cast<std::size_t>(k);
            if (c[kk] < lo[kk] || c[kk] > hi[kk]) return false;
        }
        return true;
    }
};

/// Mark a site open when some germ lies within r of the site's cell. Sites
/// cover every cell meeting the pattern's window.
inline SiteField site_field_from_pattern(const PointPattern& pat, double r, double scale) {
    if (!(r >= 0.0) || !(scale > 0.0)) throw std::invalid_argument("site field: bad r or scale");
    const int d = pat.window.dim();
    if (d < 1 || d > 3) throw std::invalid_argument("site field: dimension must be 1..3");
    SiteField f;
    f.spec = {d, scale};
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) {
        auto kk = static_cast<std::size_t>(k);
        f.lo[kk] = static_cast<std::int64_t>(std::floor((pat.window.lower[kk] - scale / 2.0) / scale)) + 1;
        f.hi[kk] = static_cast<std::int64_t>(std::ceil((pat.window.upper[kk] + scale / 2.0) / scale)) - 1;
        if (f.hi[kk] < f.lo[kk]) f.hi[kk] = f.lo[kk];
        total *= static_cast<std::size_t>(f.extent(k));
    }
    f.open.assign(total, 0);
    std::array<std::int64_t, 3> c{}, zlo{}, zhi{};
    Point cell_lo(static_cast<std::size_t>(d)), cell_hi(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < pat.size(); ++i) {
        auto p = pat.point(i);
        for (int k = 0; k < d; ++k) {
            auto kk = static_cast<std::size_t>(k);
            zlo[kk] = std::max(f.lo[kk], static_cast<std::int64_t>(std::floor((p[kk] - r - scale / 2.0) / scale)));
            zhi[kk] = std::min(f.hi[kk], static_cast<std::int64_t>(std::ceil((p[kk] + r + scale / 2.0) / scale)));
        }
        c = zlo;
        for (;;) {
            for (int k = 0; k < d; ++k) {
                auto kk = static_cast<std::size_t>(k);
                cell_lo[kk] = static_cast<double>(c[kk]) * scale - scale / 2.0;
                cell_hi[kk] = static_cast<double>(c[kk]) * scale + scale / 2.0;
            }
            if (dist_to_box(p, cell_lo, cell_hi) <= r)
                f.open[f.index(std::span<const std::int64_t>(c.data(), static_cast<std::size_t>(d)))] = 1;
            int axis = 0;
            while (axis < d) {
                auto aa = static_cast<std::size_t>(axis);
                if (++c[aa] <= zhi[aa]) break;
                c[aa] = zlo[aa];
                ++axis;
            }
            if (axis == d) break;
        }
    }
    return f;
}

/// Moore-path spanning of the open sites across the full index range, any axis.
inline bool site_percolates(const SiteField& f) {
    const int d = f.spec.dim;
    const auto n = f.open.size();
    if (n == 0) return false;
    std::array<std::int64_t, 3> c{}, nb{};
    auto decode = [&](std::size_t idx, std::array<std::int64_t, 3>& out) {
        for (int k = d - 1; k >= 0; --k) {
            auto kk = static_cast<std::size_t>(k);
            auto e = static_cast<std::size_t>(f.extent(k));
            out[kk] = f.lo[kk] + static_cast<std::int64_t>(idx % e);
            idx /= e;
        }
    };
    for (int axis = 0; axis < d; ++axis) {
        const auto ax = static_cast<std::size_t>(axis);
        std::vector<std::uint8_t> seen(n, 0);
        std::queue<std::size_t> q;
        for (std::size_t i = 0; i < n; ++i) {
            if (!f.open[i]) continue;
            decode(i, c);
            if (c[ax] == f.lo[ax]) { seen[i] = 1; q.push(i); }
        }
        bool hit = false;
        while (!q.empty() && !hit) {
            auto i = q.front(); q.pop();
            decode(i, c);
            if (c[ax] == f.hi[ax]) { hit = true; break; }
            const int count = d == 1 ? 3 : (d == 2 ? 9 : 27);
            for (int t = 0; t < count; ++t) {
                int rem = t;
                bool self = true;
                for (int k = 0; k < d; ++k) {
                    int delta = rem % 3 - 1;
                    rem /= 3;
                    nb[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)] + delta;
                    if (delta != 0) self = false;
                }
                if (self || !f.in_range(std::span<const std::int64_t>(nb.data(), static_cast<std::size_t>(d)))) continue;
                auto j = f.index(std::span<const std::int64_t>(nb.data(), static_cast<std::size_t>(d)));
                if (f.open[j] && !seen[j]) { seen[j] = 1; q.push(j); }
            }
        }
        if (hit) return true;
    }
    return false;
}

// --- blocking contours (planar) --------------------------------------------

using Contour = std::vector<std::array<int, 2>>;

namespace detail {

/// Moore-BFS escape test on Z^2: can the origin reach L-infinity shell B
/// while avoiding the blocked set?
inline bool escapes(const std::vector<std::array<int, 2>>& blocked, int B) {
    auto key = [B](int x, int y) {
        return static_cast<std::size_t>((x + B) * (2 * B + 1) + (y + B));
    };
    std::vector<std::uint8_t> bad(static_cast<std::size_t>((2 * B + 1) * (2 * B + 1)), 0);
    for (const auto& s : blocked)
        if (std::abs(s[0]) <= B && std::abs(s[1]) <= B) bad[key(s[0], s[1])] = 1;
    if (bad[key(0, 0)]) return false;
    std::vector<std::uint8_t> seen(bad.size(), 0);
    std::queue<std::array<int, 2>> q;
    seen[key(0, 0)] = 1;
    q.push({0, 0});
    while (!q.empty()) {
        auto [x, y] = q.front(); q.pop();
        if (std::abs(x) == B || std::abs(y) == B) return true;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                if (dx == 0 && dy == 0) continue;
                int nx = x + dx, ny = y + dy;
                if (std::abs(nx) > B || std::abs(ny) > B) continue;
                auto k = key(nx, ny);
                if (!bad[k] && !seen[k]) { seen[k] = 1; q.push({nx, ny}); }
            }
    }
    return false;
}

inline int contour_box(const Contour& c) {
    int B = 1;
    for (const auto& s : c) B = std::max({B, std::abs(s[0]), std::abs(s[1])});
    return B + 1;
}

}  // namespace detail

/// True when the set blocks every Moore path from the origin to infinity.
inline bool contour_blocks(const Contour& c) {
    return !detail::escapes(c, detail::contour_box(c));
}

/// True when the set blocks and no proper subset does.
inline bool contour_minimal(const Contour& c) {
    if (!contour_blocks(c)) return false;
    const int B = detail::contour_box(c);
    Contour reduced;
    reduced.reserve(c.size() - 1);
    for (std::size_t drop = 0; drop < c.size(); ++drop) {
        reduced.clear();
        for (std::size_t i = 0; i < c.size(); ++i)
            if (i != drop) reduced.push_back(c[i]);
        if (!detail::escapes(reduced, B)) return false;
    }
    return true;
}

/// Combinatorial cap on the number of length-n blocking contours in d
/// dimensions: n (3^d - 2)^(n-1).
inline double contour_count_bound(int n, int d = 2) {
    return static_cast<double>(n) * std::pow(std::pow(3.0, d) - 2.0, n - 1);
}

/// All minimal blocking contours around the origin with at most max_len
/// sites, each a nearest-neighbour simple cycle, enumerated canonically:
/// anchored at its innermost positive-x-axis site, one orientation kept.
/// Sorted by length, then lexicographically.
inline std::vector<Contour> enumerate_contours(int max_len) {
    if (max_len < 8) throw std::invalid_argument("enumerate_contours: shortest contour has 8 sites");
    std::vector<Contour> out;
    static constexpr int kDx[4] = {0, 1, 0, -1};
    static constexpr int kDy[4] = {1, 0, -1, 0};
    std::vector<std::array<int, 2>> path;
    std::map<std::array<int, 2>, bool> used;
    int anchor_t = 0;

    std::function<void(int, int)> dfs = [&](int x, int y) {
        for (int dir = 0; dir < 4; ++dir) {
            int nx = x + kDx[dir], ny = y + kDy[dir];
            if (nx == anchor_t && ny == 0) {
                if (path.size() >= 4 && path[1] < path.back()) {  // one orientation
                    if (contour_minimal(path)) out.push_back(path);
                }
                continue;
            }
            if (nx == 0 && ny == 0) continue;                       // never the origin
            if (ny == 0 && nx > 0 && nx < anchor_t) continue;       // anchor is innermost
            if (used[{nx, ny}]) continue;
            // after taking this site, at least L1-distance-minus-one further
            // sites are needed before the cycle can close on the anchor
            int back = std::abs(nx - anchor_t) + std::abs(ny);
            if (static_cast<int>(path.size()) + back > max_len) continue;
            used[{nx, ny}] = true;
            path.push_back({nx, ny});
            dfs(nx, ny);
            path.pop_back();
            used[{nx, ny}] = false;
        }
    };

    for (anchor_t = 1; anchor_t <= max_len / 2; ++anchor_t) {
        path.assign(1, {anchor_t, 0});
        used.clear();
        used[{anchor_t, 0}] = true;
        dfs(anchor_t, 0);
    }
    std::sort(out.begin(), out.end(), [](const Contour& a, const Contour& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

// --- expected void contours ------------------------------------------------

struct ContourLengthRow {
    int len = 0;
    int count = 0;
    double max_void_p = 0.0;
    double sum_void_p = 0.0;
};

struct VoidContourReport {
    double r = 0.0;
    double scale = 0.0;
    int max_len = 0;
    int reps = 0;
    std::vector<ContourLengthRow> by_length;
    double truncated_sum = 0.0;  // sum of estimated void probabilities, enumerated lengths
    double rho_hat = 0.0;        // per-site void rate read off the longest length
    double tail_bound = 0.0;     // geometric tail over lengths beyond max_len
    bool summable = false;       // 7 rho_hat < 1
};

namespace detail {

inline void finish_report(VoidContourReport& rep, const std::vector<Contour>& contours,
                          const std::vector<double>& void_p) {
    std::map<int, ContourLengthRow> rows;
    for (std::size_t i = 0; i < contours.size(); ++i) {
        auto& row = rows[static_cast<int>(contours[i].size())];
        row.len = static_cast<int>(contours[i].size());
        ++row.count;
        row.max_void_p = std::max(row.max_void_p, void_p[i]);
        row.sum_void_p += void_p[i];
        rep.truncated_sum += void_p[i];
    }
    for (auto& [len, row] : rows) rep.by_length.push_back(row);
    const int L = rep.by_length.back().len;
    rep.rho_hat = std::pow(rep.by_length.back().max_void_p, 1.0 / static_cast<double>(L));
    const double x = 7.0 * rep.rho_hat;
    rep.summable = x < 1.0;
    if (!rep.summable) {
        rep.tail_bound = std::numeric_limits<double>::infinity();
    } else if (x == 0.0) {
        rep.tail_bound = 0.0;
    } else {
        // sum over n > L of n 7^(n-1) rho^n
        rep.tail_bound = std::pow(x, L + 1) * (static_cast<double>(L + 1) - static_cast<double>(L) * x) /
                         (sq(1.0 - x) * 7.0);
    }
}

inline Window contour_window(const std::vector<Contour>& contours, double scale, double r) {
    double M = 0.0;
    for (const auto& c : contours)
        for (const auto& s : c) M = std::max({M, std::abs(static_cast<double>(s[0])), std::abs(static_cast<double>(s[1]))});
    double extent = M * scale + scale / 2.0 + r;
    return Window::cube(-extent - 1e-9, extent + 1e-9, 2);
}

inline void closed_flags(const PointPattern& pat, const std::vector<std::array<int, 2>>& sites,
                         double r, double scale, std::vector<std::uint8_t>& closed) {
    closed.assign(sites.size(), 1);
    Point lo(2), hi(2);
    for (std::size_t s = 0; s < sites.size(); ++s) {
        lo[0] = sites[s][0] * scale - scale / 2.0; hi[0] = sites[s][0] * scale + scale / 2.0;
        lo[1] = sites[s][1] * scale - scale / 2.0; hi[1] = sites[s][1] * scale + scale / 2.0;
        for (std::size_t i = 0; i < pat.size(); ++i) {
            if (dist_to_box(pat.point(i), lo, hi) <= r) { closed[s] = 0; break; }
        }
    }
}

}  // namespace detail

/// Monte Carlo estimate of the expected number of fully void contours up to
/// max_len, with the geometric tail that certifies summability. The sampling
/// window is derived from the contour extent plus r, so the estimate is
/// unaffected by the cutoff.
inline VoidContourReport expected_void_contours(const GeneratorConfig& cfg, double r, double scale,
                                                int max_len, int reps, const RngStream& root) {
    if (reps <= 0) throw std::invalid_argument("expected_void_contours: reps must be positive");
    auto contours = enumerate_contours(max_len);
    VoidContourReport rep;
    rep.r = r; rep.scale = scale; rep.max_len = max_len; rep.reps = reps;

    std::vector<std::array<int, 2>> sites;
    std::map<std::array<int, 2>, std::size_t> site_id;
    std::vector<std::vector<std::size_t>> members(contours.size());
    for (std::size_t ci = 0; ci < contours.size(); ++ci)
        for (const auto& s : contours[ci]) {
            auto [it, fresh] = site_id.try_emplace(s, sites.size());
            if (fresh) sites.push_back(s);
            members[ci].push_back(it->second);
        }

    Window w = detail::contour_window(contours, scale, r);
    std::vector<std::int64_t> void_count(contours.size(), 0);
    std::vector<std::uint8_t> closed;
    for (int repn = 0; repn < reps; ++repn) {
        auto g = derive(root, "void-rep", static_cast<std::uint64_t>(repn));
        auto pat = sample(cfg, w, 0.0, g);
        detail::closed_flags(pat, sites, r, scale, closed);
        for (std::size_t ci = 0; ci < contours.size(); ++ci) {
            bool all = true;
            for (auto s : members[ci])
                if (!closed[s]) { all = false; break; }
            if (all) ++void_count[ci];
        }
    }
    std::vector<double> void_p(contours.size());
    for (std::size_t ci = 0; ci < contours.size(); ++ci)
        void_p[ci] = static_cast<double>(void_count[ci]) / static_cast<double>(reps);
    detail::finish_report(rep, contours, void_p);
    return rep;
}

struct VoidContourScan {
    std::vector<VoidContourReport> rows;
    int certified_index = -1;  // first radius with a certified total below 1
};

/// Coupled scan over an ascending radius grid: one germ pattern per rep is
/// shared by all radii, so the reported sums are monotone nonincreasing.
/// certified_index marks the first radius whose truncated sum plus tail is
/// below 1 with a summable tail.
inline VoidContourScan rbar_upper_scan(const GeneratorConfig& cfg, const std::vector<double>& r_grid,
                                       double scale, int max_len, int reps, const RngStream& root) {
    if (r_grid.empty() || reps <= 0) throw std::invalid_argument("rbar_upper_scan: empty grid or reps");
    for (std::size_t i = 0; i + 1 < r_grid.size(); ++i)
        if (!(r_grid[i] < r_grid[i + 1])) throw std::invalid_argument("rbar_upper_scan: grid must be ascending");
    auto contours = enumerate_contours(max_len);
    std::vector<std::array<int, 2>> sites;
    std::map<std::array<int, 2>, std::size_t> site_id;
    std::vector<std::vector<std::size_t>> members(contours.size());
    for (std::size_t ci = 0; ci < contours.size(); ++ci)
        for (const auto& s : contours[ci]) {
            auto [it, fresh] = site_id.try_emplace(s, sites.size());
            if (fresh) sites.push_back(s);
            members[ci].push_back(it->second);
        }
    Window w = detail::contour_window(contours, scale, r_grid.back());
    std::vector<std::vector<std::int64_t>> void_count(r_grid.size(),
                                                      std::vector<std::int64_t>(contours.size(), 0));
    std::vector<std::uint8_t> closed;
    for (int repn = 0; repn < reps; ++repn) {
        auto g = derive(root, "void-rep", static_cast<std::uint64_t>(repn));
        auto pat = sample(cfg, w, 0.0, g);
        for (std::size_t k = 0; k < r_grid.size(); ++k) {
            detail::closed_flags(pat, sites, r_grid[k], scale, closed);
            for (std::size_t ci = 0; ci < contours.size(); ++ci) {
                bool all = true;
                for (auto s : members[ci])
                    if (!closed[s]) { all = false; break; }
                if (all) ++void_count[k][ci];
            }
        }
    }
    VoidContourScan scan;
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        VoidContourReport rep;
        rep.r = r_grid[k]; rep.scale = scale; rep.max_len = max_len; rep.reps = reps;
        std::vector<double> void_p(contours.size());
        for (std::size_t ci = 0; ci < contours.size(); ++ci)
            void_p[ci] = static_cast<double>(void_count[k][ci]) / static_cast<double>(reps);
        detail::finish_report(rep, contours, void_p);
        if (scan.certified_index < 0 && rep.summable && rep.truncated_sum + rep.tail_bound < 1.0)
            scan.certified_index = static_cast<int>(k);
        scan.rows.push_back(std::move(rep));
    }
    return scan;
}

// --- open path counts ------------------------------------------------------

/// Distance from p to the boundary of the centred box (-m, m]^d.
inline double dist_to_centred_boundary(std::span<const double> p, double m) {
    double max_abs = 0.0, out2 = 0.0;
    bool outside = false;
    for (double v : p) {
        double a = std::abs(v);
        max_abs = std::max(max_abs, a);
        if (a > m) { outside = true; out2 += sq(a - m); }
    }
    return outside ? std::sqrt(out2) : m - max_abs;
}

struct PathCount {
    double count = 0.0;
    bool truncated = false;
    std::int64_t visits = 0;
};

/// Count ordered germ tuples that realize an open path from the origin to
/// the boundary of (-m, m]^d: the first ball covers the origin, consecutive
/// germs are within 2r, germs are distinct, every germ but possibly the last
/// lies in the box, and the tuple is counted once when its last ball meets
/// the boundary. Germs outside the box are never extended. `cap` limits DFS
/// node visits; when it trips, the count so far is a lower bound.
inline PathCount count_open_paths(const PointPattern& pat, double r, double m, std::int64_t cap) {
    if (!(r > 0.0) || !(m > 0.0) || cap <= 0)
        throw std::invalid_argument("count_open_paths: need r > 0, m > 0, cap > 0");
    PathCount res;
    const std::size_t n = pat.size();
    if (n == 0) return res;
    const int d = pat.dim;
    CellGrid grid = build_cell_grid(pat, 2.0 * r);
    Point origin(static_cast<std::size_t>(d), 0.0);
    auto starts = neighbors_within(grid, pat, origin, r);
    std::vector<std::uint8_t> used(n, 0);
    auto in_box = [&](std::span<const double> p) {
        for (double v : p)
            if (!(v > -m && v <= m)) return false;
        return true;
    };
    std::function<void(std::int32_t)> visit = [&](std::int32_t i) {
        if (res.truncated) return;
        if (++res.visits > cap) { res.truncated = true; return; }
        auto p = pat.point(static_cast<std::size_t>(i));
        if (dist_to_centred_boundary(p, m) <= r) res.count += 1.0;
        if (!in_box(p)) return;
        for (auto j : neighbors_within(grid, pat, p, 2.0 * r, i)) {
            if (used[static_cast<std::size_t>(j)]) continue;
            used[static_cast<std::size_t>(j)] = 1;
            visit(j);
            used[static_cast<std::size_t>(j)] = 0;
            if (res.truncated) return;
        }
    };
    for (auto s : starts) {
        used[static_cast<std::size_t>(s)] = 1;
        visit(s);
        used[static_cast<std::size_t>(s)] = 0;
        if (res.truncated) break;
    }
    return res;
}

struct PathSweepRow {
    double r = 0.0;
    Estimate expected;        // mean path count with a normal CI
    double truncated_rate = 0.0;
};

struct PathSweep {
    std::vector<PathSweepRow> rows;
    double threshold = 0.0;
    int first_above = -1;  // first radius with mean count at or above threshold
};

/// Expected open-path counts over an ascending radius grid with coupled
/// germ patterns. The mean over radii is nondecreasing by construction; the
/// first radius clearing `threshold` is the reported onset surrogate.
inline PathSweep expected_paths_sweep(const GeneratorConfig& cfg, const std::vector<double>& r_grid,
                                      double m, int reps, std::int64_t cap, double threshold,
                                      const RngStream& root) {
    if (r_grid.empty() || reps <= 0) throw std::invalid_argument("expected_paths_sweep: empty grid or reps");
    for (std::size_t i = 0; i + 1 < r_grid.size(); ++i)
        if (!(r_grid[i] < r_grid[i + 1])) throw std::invalid_argument("expected_paths_sweep: grid must be ascending");
    const int d = config_dim(cfg);
    const double extent = m + 2.0 * r_grid.back();
    Window w = Window::cube(-extent, extent, d);
    std::vector<std::vector<double>> counts(r_grid.size());
    std::vector<std::int64_t> truncated(r_grid.size(), 0);
    for (int repn = 0; repn < reps; ++repn) {
        auto g = derive(root, "path-rep", static_cast<std::uint64_t>(repn));
        auto pat = sample(cfg, w, 0.0, g);
        for (std::size_t k = 0; k < r_grid.size(); ++k) {
            auto res = count_open_paths(pat, r_grid[k], m, cap);
            counts[k].push_back(res.count);
            if (res.truncated) ++truncated[k];
        }
    }
    PathSweep sweep;
    sweep.threshold = threshold;
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        PathSweepRow row;
        row.r = r_grid[k];
        row.expected = mean_ci(counts[k]);
        row.truncated_rate = static_cast<double>(truncated[k]) / static_cast<double>(reps);
        if (sweep.first_above < 0 && row.expected.value >= threshold)
            sweep.first_above = static_cast<int>(k);
        sweep.rows.push_back(row);
    }
    return sweep;
}

}  // namespace germgrain
