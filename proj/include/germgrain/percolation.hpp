#pragma once

// Continuum percolation on the Boolean model of equal balls: germs within 2r
// are adjacent, components come from union-find over a cell grid, and window
// spanning of a component is the finite-volume percolation proxy.

#include <queue>
#include <unordered_map>

#include "generators.hpp"

namespace germgrain {

struct UnionFind {
    std::vector<std::int32_t> parent, size;

    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
    }
    std::int32_t find(std::int32_t x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& p = parent[static_cast<std::size_t>(x)];
            p = parent[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a); b = find(b);
        if (a == b) return;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    }
};

struct ComponentStats {
    std::vector<std::size_t> sizes;      // descending; ties by smallest member index
    std::vector<std::int32_t> labels;    // per point: index into sizes
    double fraction_largest = 0.0;
    double fraction_second = 0.0;
    std::vector<bool> spans;             // per axis: some component touches both faces
};

namespace detail {

/// Union all point pairs at distance <= 2r. Iterates occupied cells of a grid
/// with cell side 2r; for each cell only a contiguous id range per neighbour
/// column is searched, so the pass is near linear in occupied cells.
inline void link_pairs(const PointPattern& pat, UnionFind& uf, double r) {
    const std::size_t n = pat.size();
    if (n < 2) return;
    const double cell = r > 0.0 ? 2.0 * r : 1.0;
    const double r2 = sq(2.0 * r);
    CellGrid grid = build_cell_grid(pat, cell);
    const int d = grid.dim;
    std::array<std::int64_t, 3> base{}, nb{};
    // neighbour combos over all axes but the last; the last axis is a
    // contiguous range of three packed ids
    const int combos = d == 1 ? 1 : (d == 2 ? 3 : 9);
    for (std::size_t run = 0; run < grid.cell_ids.size();) {
        std::size_t end = run;
        while (end < grid.cell_ids.size() && grid.cell_ids[end] == grid.cell_ids[run]) ++end;
        auto p0 = pat.point(static_cast<std::size_t>(grid.order[run]));
        for (int k = 0; k < d; ++k) base[static_cast<std::size_t>(k)] = grid.cell_coord(p0[static_cast<std::size_t>(k)]);
        for (int c = 0; c < combos; ++c) {
            nb = base;
            if (d >= 2) nb[0] += c % 3 - 1;
            if (d == 3) nb[1] += c / 3 - 1;
            nb[static_cast<std::size_t>(d - 1)] -= 1;
            std::uint64_t lo_id = CellGrid::pack(std::span<const std::int64_t>(nb.data(), static_cast<std::size_t>(d)));
            std::uint64_t hi_id = lo_id + 2;  // last axis occupies the low bits
            auto it = std::lower_bound(grid.cell_ids.begin(), grid.cell_ids.end(), lo_id);
            for (auto pos = static_cast<std::size_t>(it - grid.cell_ids.begin());
                 pos < grid.cell_ids.size() && grid.cell_ids[pos] <= hi_id; ++pos) {
                std::int32_t j = grid.order[pos];
                for (std::size_t a = run; a < end; ++a) {
                    std::int32_t i = grid.order[a];
                    if (j <= i) continue;
                    auto pi = pat.point(static_cast<std::size_t>(i));
                    auto pj = pat.point(static_cast<std::size_t>(j));
                    double s = 0.0;
                    for (int k = 0; k < d; ++k) s += sq(pi[static_cast<std::size_t>(k)] - pj[static_cast<std::size_t>(k)]);
                    if (s <= r2) uf.unite(i, j);
                }
            }
        }
        run = end;
    }
}

/// Ball of radius r around p meets the face slab of the window on side
/// `high` of `axis`, up to corner rounding.
inline bool touches_face(std::span<const double> p, const Window& w, double r, int axis, bool high) {
    const auto a = static_cast<std::size_t>(axis);
    double face = high ? w.upper[a] : w.lower[a];
    if (std::abs(p[a] - face) > r) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k == a) continue;
        if (p[k] < w.lower[k] - r || p[k] > w.upper[k] + r) return false;
    }
    return true;
}

}  // namespace detail

/// Connected components of the distance-2r graph over all points of the
/// pattern (collar points included). Fractions are relative to the full
/// point count; spans[k] asks for one component reaching both faces of the
/// undilated window along axis k.
inline ComponentStats components(const PointPattern& pat, double r) {
    if (r < 0.0) throw std::invalid_argument("components: negative radius");
    const std::size_t n = pat.size();
    const int d = pat.dim > 0 ? pat.dim : pat.window.dim();
    ComponentStats st;
    st.spans.assign(static_cast<std::size_t>(d), false);
    if (n == 0) return st;

    UnionFind uf(n);
    detail::link_pairs(pat, uf, r);

    std::unordered_map<std::int32_t, std::int32_t> root_slot;
    std::vector<std::size_t> size_of, first_of;
    std::vector<std::uint8_t> lo_touch, hi_touch;  // per slot x axis
    root_slot.reserve(n / 4 + 1);
    std::vector<std::int32_t> slot(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int32_t root = uf.find(static_cast<std::int32_t>(i));
        auto [it, fresh] = root_slot.try_emplace(root, static_cast<std::int32_t>(size_of.size()));
        if (fresh) {
            size_of.push_back(0);
            first_of.push_back(i);
            lo_touch.insert(lo_touch.end(), static_cast<std::size_t>(d), 0);
            hi_touch.insert(hi_touch.end(), static_cast<std::size_t>(d), 0);
        }
        std::int32_t s = it->second;
        slot[i] = s;
        ++size_of[static_cast<std::size_t>(s)];
        auto p = pat.point(i);
        for (int k = 0; k < d; ++k) {
            auto off = static_cast<std::size_t>(s) * static_cast<std::size_t>(d) + static_cast<std::size_t>(k);
            if (!lo_touch[off] && detail::touches_face(p, pat.window, r, k, false)) lo_touch[off] = 1;
            if (!hi_touch[off] && detail::touches_face(p, pat.window, r, k, true)) hi_touch[off] = 1;
        }
    }

    const std::size_t m = size_of.size();
    std::vector<std::int32_t> order(m);
    for (std::size_t s = 0; s < m; ++s) order[s] = static_cast<std::int32_t>(s);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        auto sa = size_of[static_cast<std::size_t>(a)], sb = size_of[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return first_of[static_cast<std::size_t>(a)] < first_of[static_cast<std::size_t>(b)];
    });
    std::vector<std::int32_t> rank(m);
    st.sizes.resize(m);
    for (std::size_t pos = 0; pos < m; ++pos) {
        rank[static_cast<std::size_t>(order[pos])] = static_cast<std::int32_t>(pos);
        st.sizes[pos] = size_of[static_cast<std::size_t>(order[pos])];
    }
    st.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) st.labels[i] = rank[static_cast<std::size_t>(slot[i])];
    st.fraction_largest = static_cast<double>(st.sizes[0]) / static_cast<double>(n);
    st.fraction_second = m > 1 ? static_cast<double>(st.sizes[1]) / static_cast<double>(n) : 0.0;
    for (int k = 0; k < d; ++k) {
        for (std::size_t s = 0; s < m && !st.spans[static_cast<std::size_t>(k)]; ++s) {
            auto off = s * static_cast<std::size_t>(d) + static_cast<std::size_t>(k);
            if (lo_touch[off] && hi_touch[off]) st.spans[static_cast<std::size_t>(k)] = true;
        }
    }
    return st;
}

inline bool spans_any(const ComponentStats& st) {
    for (bool b : st.spans)
        if (b) return true;
    return false;
}

// --- estimates -------------------------------------------------------------

struct Estimate {
    double value = 0.0, lo = 0.0, hi = 1.0;
};

/// Wilson score interval at 95 percent.
inline Estimate wilson(std::int64_t successes, std::int64_t trials) {
    if (trials <= 0) throw std::invalid_argument("wilson: no trials");
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    Estimate e{p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (successes == 0) e.lo = 0.0;
    if (successes == trials) e.hi = 1.0;
    return e;
}

/// Normal-approximation interval for a sample mean.
inline Estimate mean_ci(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean_ci: no samples");
    double s = 0.0, s2 = 0.0;
    for (double x : xs) { s += x; s2 += x * x; }
    const double n = static_cast<double>(xs.size());
    double m = s / n;
    double var = std::max(0.0, (s2 - n * m * m) / std::max(1.0, n - 1.0));
    double half = 1.959963984540054 * std::sqrt(var / n);
    return {m, m - half, m + half};
}

/// Monte Carlo spanning probability. axis < 0 asks for spanning along any
/// axis. Each realization keeps a 2r collar so boundary germs participate.
inline Estimate percolation_probability(const GeneratorConfig& cfg, const Window& w, double r,
                                        int reps, const RngStream& root, int axis = -1) {
    if (reps <= 0) throw std::invalid_argument("percolation_probability: reps must be positive");
    std::int64_t hits = 0;
    for (int i = 0; i < reps; ++i) {
        auto g = derive(root, "perc-rep", static_cast<std::uint64_t>(i));
        auto pat = sample(cfg, w, 2.0 * r, g);
        auto st = components(pat, r);
        bool span = axis < 0 ? spans_any(st) : st.spans[static_cast<std::size_t>(axis)];
        if (span) ++hits;
    }
    return wilson(hits, reps);
}

struct SweepRow {
    double r = 0.0;
    double mean_frac1 = 0.0, mean_frac2 = 0.0;
    Estimate p_span;
    int reps = 0;
};

/// Order-parameter sweep over an ascending radius grid. One realization per
/// rep is shared by every radius, so curves for a fixed seed are coupled and
/// monotone comparisons are not blurred by resampling noise.
inline std::vector<SweepRow> sweep_r(const GeneratorConfig& cfg, const Window& w,
                                     const std::vector<double>& r_grid, int reps,
                                     const RngStream& root, int axis = -1) {
    if (r_grid.empty() || reps <= 0) throw std::invalid_argument("sweep_r: empty grid or reps");
    for (std::size_t i = 0; i + 1 < r_grid.size(); ++i)
        if (!(r_grid[i] < r_grid[i + 1])) throw std::invalid_argument("sweep_r: grid must be ascending");
    const double margin = 2.0 * r_grid.back();
    std::vector<SweepRow> rows(r_grid.size());
    std::vector<std::int64_t> span_hits(r_grid.size(), 0);
    for (int rep = 0; rep < reps; ++rep) {
        auto g = derive(root, "sweep-rep", static_cast<std::uint64_t>(rep));
        auto pat = sample(cfg, w, margin, g);
        for (std::size_t k = 0; k < r_grid.size(); ++k) {
            auto st = components(pat, r_grid[k]);
            rows[k].mean_frac1 += st.fraction_largest;
            rows[k].mean_frac2 += st.fraction_second;
            bool span = pat.size() > 0 &&
                        (axis < 0 ? spans_any(st) : st.spans[static_cast<std::size_t>(axis)]);
            if (span) ++span_hits[k];
        }
    }
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        rows[k].r = r_grid[k];
        rows[k].mean_frac1 /= reps;
        rows[k].mean_frac2 /= reps;
        rows[k].p_span = wilson(span_hits[k], reps);
        rows[k].reps = reps;
    }
    return rows;
}

struct BracketError : std::runtime_error {
    Estimate at_lo, at_hi;
    BracketError(const std::string& msg, Estimate lo, Estimate hi)
        : std::runtime_error(msg), at_lo(lo), at_hi(hi) {}
};

/// Bisect the radius at which the spanning probability crosses one half.
/// Throws BracketError (with both endpoint estimates) when the bracket does
/// not straddle the crossing.
inline double estimate_rc(const GeneratorConfig& cfg, const Window& w, double r_lo, double r_hi,
                          int reps, double tol, const RngStream& root, int axis = -1) {
    if (!(r_lo >= 0.0 && r_hi > r_lo) || !(tol > 0.0))
        throw std::invalid_argument("estimate_rc: bad bracket or tolerance");
    std::uint64_t probe = 0;
    auto prob_at = [&](double r) {
        auto g = derive(root, "rc-probe", probe++);
        return percolation_probability(cfg, w, r, reps, g, axis);
    };
    Estimate p_lo = prob_at(r_lo), p_hi = prob_at(r_hi);
    if (!(p_lo.value < 0.5 && p_hi.value >= 0.5))
        throw BracketError("estimate_rc: bracket does not straddle the crossing", p_lo, p_hi);
    while (r_hi - r_lo > tol) {
        double mid = 0.5 * (r_lo + r_hi);
        if (prob_at(mid).value < 0.5) r_lo = mid;
        else r_hi = mid;
    }
    return 0.5 * (r_lo + r_hi);
}

// --- k-coverage percolation ------------------------------------------------

enum class KCoverageMode { lattice, fine_grid };

namespace detail {

struct SiteSet {
    double spacing = 0.0;
    int dim = 0;
    std::vector<std::uint64_t> keys;               // sorted packed site coords
    std::array<std::int64_t, 3> low_at{}, high_at{};  // face-touch index thresholds
};

/// Moore-adjacency BFS: true when some open path joins a low-face site to a
/// high-face site along one axis.
inline bool moore_spans(const SiteSet& sites) {
    if (sites.keys.empty()) return false;
    const int d = sites.dim;
    auto unpack = [&](std::uint64_t key, std::array<std::int64_t, 3>& c) {
        for (int k = d - 1; k >= 0; --k) {
            c[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(key & ((1u << 21) - 1)) - CellGrid::kCoordBias;
            key >>= 21;
        }
    };
    std::array<std::int64_t, 3> c{}, nb{};
    for (int axis = 0; axis < d; ++axis) {
        const auto ax = static_cast<std::size_t>(axis);
        std::vector<std::uint8_t> seen(sites.keys.size(), 0);
        std::queue<std::size_t> q;
        for (std::size_t i = 0; i < sites.keys.size(); ++i) {
            unpack(sites.keys[i], c);
            if (c[ax] <= sites.low_at[ax]) { seen[i] = 1; q.push(i); }
        }
        bool hit = false;
        while (!q.empty() && !hit) {
            std::size_t i = q.front(); q.pop();
            unpack(sites.keys[i], c);
            if (c[ax] >= sites.high_at[ax]) { hit = true; break; }
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
                if (self) continue;
                std::uint64_t key = CellGrid::pack(std::span<const std::int64_t>(nb.data(), static_cast<std::size_t>(d)));
                auto it = std::lower_bound(sites.keys.begin(), sites.keys.end(), key);
                if (it == sites.keys.end() || *it != key) continue;
                auto j = static_cast<std::size_t>(it - sites.keys.begin());
                if (!seen[j]) { seen[j] = 1; q.push(j); }
            }
        }
        if (hit) return true;
    }
    return false;
}

}  // namespace detail

/// Does the coverage-k region span the window? Two discretizations:
///
/// lattice: sites on a grid of spacing r/sqrt(d); a site is open when its
/// cell holds at least ceil(k/2) germs. Any Moore path of open sites is then
/// carried by a genuine k-covered continuum path, so spanning here is
/// sufficient for continuum k-coverage spanning.
///
/// fine_grid: sites on a grid of the given resolution; a site is open when
/// at least k balls of radius r cover it. A sampled necessary proxy that
/// converges as the resolution shrinks.
inline bool k_coverage_percolates(const PointPattern& pat, double r, int k, KCoverageMode mode,
                                  double resolution = 0.0) {
    if (!(r > 0.0) || k < 1) throw std::invalid_argument("k_coverage: need r > 0 and k >= 1");
    const int d = pat.window.dim();
    if (d < 1 || d > 3) throw std::invalid_argument("k_coverage: dimension must be 1..3");
    const Window& w = pat.window;
    detail::SiteSet sites;
    sites.dim = d;
    if (mode == KCoverageMode::lattice) {
        const double a = r / std::sqrt(static_cast<double>(d));
        sites.spacing = a;
        for (int t = 0; t < d; ++t) {
            auto tt = static_cast<std::size_t>(t);
            // cell of site c is (c*a - a/2, c*a + a/2]; touch when it meets the face
            sites.low_at[tt] = static_cast<std::int64_t>(std::floor(w.lower[tt] / a + 0.5 + 1e-12));
            sites.high_at[tt] = static_cast<std::int64_t>(std::ceil(w.upper[tt] / a - 0.5 - 1e-12));
        }
        const auto need = static_cast<std::int64_t>((k + 1) / 2);
        std::vector<std::uint64_t> keys(pat.size());
        std::array<std::int64_t, 3> c{};
        for (std::size_t i = 0; i < pat.size(); ++i) {
            auto p = pat.point(i);
            bool ok = true;
            for (int t = 0; t < d; ++t) {
                auto tt = static_cast<std::size_t>(t);
                c[tt] = static_cast<std::int64_t>(std::ceil(p[tt] / a - 0.5));
                double centre = static_cast<double>(c[tt]) * a;
                if (centre < w.lower[tt] - a / 2.0 || centre > w.upper[tt] + a / 2.0) ok = false;
            }
            keys[i] = ok ? CellGrid::pack(std::span<const std::int64_t>(c.data(), static_cast<std::size_t>(d)))
                         : ~0ULL;
        }
        std::sort(keys.begin(), keys.end());
        for (std::size_t i = 0; i < keys.size();) {
            std::size_t e = i;
            while (e < keys.size() && keys[e] == keys[i]) ++e;
            if (keys[i] != ~0ULL && static_cast<std::int64_t>(e - i) >= need) sites.keys.push_back(keys[i]);
            i = e;
        }
    } else {
        if (!(resolution > 0.0)) throw std::invalid_argument("k_coverage: fine_grid needs a resolution");
        sites.spacing = resolution;
        CellGrid grid = build_cell_grid(pat, std::max(r, resolution));
        std::array<std::int64_t, 3> lo{}, hi{}, cur{};
        Point q(static_cast<std::size_t>(d));
        for (int t = 0; t < d; ++t) {
            auto tt = static_cast<std::size_t>(t);
            lo[tt] = static_cast<std::int64_t>(std::ceil(w.lower[tt] / resolution));
            hi[tt] = static_cast<std::int64_t>(std::floor(w.upper[tt] / resolution));
            if (static_cast<double>(hi[tt]) * resolution >= w.upper[tt]) --hi[tt];  // half-open window
            sites.low_at[tt] = lo[tt];
            sites.high_at[tt] = hi[tt];
        }
        cur = lo;
        for (;;) {
            for (int t = 0; t < d; ++t) q[static_cast<std::size_t>(t)] = static_cast<double>(cur[static_cast<std::size_t>(t)]) * resolution;
            if (w.contains(q) &&
                neighbors_within(grid, pat, q, r).size() >= static_cast<std::size_t>(k))
                sites.keys.push_back(CellGrid::pack(std::span<const std::int64_t>(cur.data(), static_cast<std::size_t>(d))));
            int axis = 0;
            while (axis < d) {
                auto aa = static_cast<std::size_t>(axis);
                if (++cur[aa] <= hi[aa]) break;
                cur[aa] = lo[aa];
                ++axis;
            }
            if (axis == d) break;
        }
        std::sort(sites.keys.begin(), sites.keys.end());
    }
    return detail::moore_spans(sites);
}

}  // namespace germgrain
