#pragma once

// Shot-noise functionals of a germ pattern: additive and extremal fields,
// interference and SINR connectivity, and Chernoff-type bounds on joint
// level exceedances at finitely many sites.

#include <functional>

#include "percolation.hpp"

namespace germgrain {

// --- response functions ----------------------------------------------------

struct IndicatorCube { double r = 1.0; };                       // 1 when x - z in (-r, r]^d
struct PowerLaw { double beta = 4.0; };                         // (1 + t)^-beta
struct TruncatedPowerLaw { double beta = 4.0; double t_max = 1.0; };

using ResponseFunction = std::variant<IndicatorCube, PowerLaw, TruncatedPowerLaw>;

inline void response_validate(const ResponseFunction& f) {
    std::visit(overloaded{
        [](const IndicatorCube& c) { if (!(c.r > 0.0)) throw std::invalid_argument("indicator cube: r must be positive"); },
        [](const PowerLaw& p) { if (!(p.beta > 0.0)) throw std::invalid_argument("power law: beta must be positive"); },
        [](const TruncatedPowerLaw& t) {
            if (!(t.beta > 0.0) || !(t.t_max > 0.0)) throw std::invalid_argument("truncated power law: bad parameters");
        }}, f);
}

inline bool response_radial(const ResponseFunction& f) {
    return !std::holds_alternative<IndicatorCube>(f);
}

/// Radial profile l(t); decreasing in t with l(0) = 1 for the laws here.
inline double radial_response(const ResponseFunction& f, double t) {
    if (t < 0.0) throw std::invalid_argument("radial_response: negative distance");
    return std::visit(overloaded{
        [&](const IndicatorCube&) -> double { throw std::invalid_argument("radial_response: cube response is not radial"); },
        [&](const PowerLaw& p) { return std::pow(1.0 + t, -p.beta); },
        [&](const TruncatedPowerLaw& tp) { return t <= tp.t_max ? std::pow(1.0 + t, -tp.beta) : 0.0; }}, f);
}

/// Response of a source at z felt at x.
inline double response_at(const ResponseFunction& f, std::span<const double> x, std::span<const double> z) {
    if (const auto* c = std::get_if<IndicatorCube>(&f)) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            double d = x[k] - z[k];
            if (!(d > -c->r && d <= c->r)) return 0.0;
        }
        return 1.0;
    }
    return radial_response(f, distance(x, z));
}

inline double additive_sn(const ResponseFunction& f, const PointPattern& pat, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < pat.size(); ++i) s += response_at(f, y, pat.point(i));
    return s;
}

/// Extremal shot noise; 0 on the empty pattern.
inline double extremal_sn(const ResponseFunction& f, const PointPattern& pat, std::span<const double> y) {
    double m = 0.0;
    for (std::size_t i = 0; i < pat.size(); ++i) m = std::max(m, response_at(f, y, pat.point(i)));
    return m;
}

/// Per-site flags: additive field at or above level h.
inline std::vector<std::uint8_t> level_set_sites(const ResponseFunction& f, const PointPattern& pat,
                                                 const std::vector<Point>& sites, double h) {
    std::vector<std::uint8_t> out(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) out[i] = additive_sn(f, pat, sites[i]) >= h ? 1 : 0;
    return out;
}

// --- interference and SINR -------------------------------------------------

/// Total received power at y from every pattern point except the given index
/// and any point coincident with y.
inline double interference(const ResponseFunction& f, const PointPattern& pat,
                           std::span<const double> y, std::int32_t exclude = -1) {
    if (!response_radial(f)) throw std::invalid_argument("interference: need a radial response");
    double s = 0.0;
    for (std::size_t i = 0; i < pat.size(); ++i) {
        if (static_cast<std::int32_t>(i) == exclude) continue;
        double t = distance(y, pat.point(i));
        if (t == 0.0) continue;
        s += radial_response(f, t);
    }
    return s;
}

/// Half the distance at which the plain signal-to-noise ratio crosses T:
/// solves P l(2 r) = T N. Returns +infinity when every distance passes and 0
/// when none does; a truncated law caps the radius at t_max / 2.
inline double snr_radius(const ResponseFunction& f, double P, double N, double T) {
    if (!response_radial(f)) throw std::invalid_argument("snr_radius: need a radial response");
    if (!(P > 0.0) || !(T > 0.0)) throw std::invalid_argument("snr_radius: need P > 0 and T > 0");
    if (!(N > 0.0)) return std::numeric_limits<double>::infinity();
    const double u = T * N / P;
    if (u >= 1.0) return 0.0;  // l(0) = 1 is the largest value
    if (const auto* tp = std::get_if<TruncatedPowerLaw>(&f)) {
        if (u < radial_response(f, tp->t_max)) return tp->t_max / 2.0;
    }
    double lo = 0.0, hi = 1.0;
    while (radial_response(f, hi) > u) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (radial_response(f, mid) > u) lo = mid;
        else hi = mid;
    }
    return 0.5 * lo;
}

/// Distance-2r adjacency lists, ascending, no self loops.
inline std::vector<std::vector<std::int32_t>> build_gilbert(const PointPattern& pat, double r) {
    if (r < 0.0) throw std::invalid_argument("build_gilbert: negative radius");
    std::vector<std::vector<std::int32_t>> adj(pat.size());
    if (pat.size() == 0) return adj;
    CellGrid grid = build_cell_grid(pat, r > 0.0 ? 2.0 * r : 1.0);
    for (std::size_t i = 0; i < pat.size(); ++i)
        adj[i] = neighbors_within(grid, pat, pat.point(i), 2.0 * r, static_cast<std::int32_t>(i));
    return adj;
}

struct SinrParams {
    double P = 1.0;   // transmit power
    double N = 1.0;   // noise power
    double T = 1.0;   // threshold
    double gamma = 0.0;  // interference weight
};

/// Bidirectional SINR graph over `nodes`. Interference at a receiver sums
/// the response of every other node and interferer, except the two endpoints
/// of the link under test. Since SINR never exceeds SNR, only pairs within
/// twice the SNR radius are candidates; that pruning is exact.
inline std::vector<std::vector<std::int32_t>> build_sinr_graph(const PointPattern& nodes,
                                                               const PointPattern& interferers,
                                                               const ResponseFunction& f,
                                                               const SinrParams& par) {
    if (!response_radial(f)) throw std::invalid_argument("build_sinr_graph: need a radial response");
    const std::size_t n = nodes.size();
    std::vector<std::vector<std::int32_t>> adj(n);
    if (n == 0) return adj;
    const double r_snr = snr_radius(f, par.P, par.N, par.T);
    if (r_snr == 0.0) return adj;
    if (!std::isfinite(r_snr)) throw std::invalid_argument("build_sinr_graph: unbounded SNR radius (set N > 0)");

    // received-power totals at each node from all nodes and interferers
    std::vector<double> total(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto y = nodes.point(i);
        total[i] = interference(f, nodes, y, static_cast<std::int32_t>(i)) + interference(f, interferers, y);
    }
    CellGrid grid = build_cell_grid(nodes, 2.0 * r_snr);
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = nodes.point(i);
        for (auto j : neighbors_within(grid, nodes, xi, 2.0 * r_snr, static_cast<std::int32_t>(i))) {
            if (j <= static_cast<std::int32_t>(i)) continue;
            auto xj = nodes.point(static_cast<std::size_t>(j));
            double sig = radial_response(f, distance(xi, xj));
            double i_at_j = std::max(0.0, total[static_cast<std::size_t>(j)] - sig);
            double i_at_i = std::max(0.0, total[i] - sig);
            bool fwd = par.P * sig > par.T * (par.N + par.gamma * par.P * i_at_j);
            bool bwd = par.P * sig > par.T * (par.N + par.gamma * par.P * i_at_i);
            if (fwd && bwd) {
                adj[i].push_back(j);
                adj[static_cast<std::size_t>(j)].push_back(static_cast<std::int32_t>(i));
            }
        }
    }
    return adj;
}

/// Component of the graph touching both faces of the window along some axis,
/// with face slack `slack_r` (the SNR radius is the natural choice).
inline bool graph_spans(const PointPattern& nodes, const std::vector<std::vector<std::int32_t>>& adj,
                        double slack_r) {
    const std::size_t n = nodes.size();
    if (n == 0) return false;
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : adj[i])
            if (j > static_cast<std::int32_t>(i)) uf.unite(static_cast<std::int32_t>(i), j);
    const int d = nodes.window.dim();
    std::unordered_map<std::int32_t, std::size_t> slot;
    std::vector<std::uint8_t> lo_touch, hi_touch;
    for (std::size_t i = 0; i < n; ++i) {
        auto root = uf.find(static_cast<std::int32_t>(i));
        auto [it, fresh] = slot.try_emplace(root, slot.size());
        if (fresh) {
            lo_touch.insert(lo_touch.end(), static_cast<std::size_t>(d), 0);
            hi_touch.insert(hi_touch.end(), static_cast<std::size_t>(d), 0);
        }
        auto p = nodes.point(i);
        for (int k = 0; k < d; ++k) {
            auto off = it->second * static_cast<std::size_t>(d) + static_cast<std::size_t>(k);
            if (detail::touches_face(p, nodes.window, slack_r, k, false)) lo_touch[off] = 1;
            if (detail::touches_face(p, nodes.window, slack_r, k, true)) hi_touch[off] = 1;
        }
    }
    for (std::size_t s = 0; s < slot.size(); ++s)
        for (int k = 0; k < d; ++k) {
            auto off = s * static_cast<std::size_t>(d) + static_cast<std::size_t>(k);
            if (lo_touch[off] && hi_touch[off]) return true;
        }
    return false;
}

struct SinrSweepRow {
    double gamma = 0.0;
    Estimate p_span;
};

/// Spanning probability of the SINR graph over an ascending gamma grid.
/// Within one realization edges only disappear as gamma grows, so with the
/// per-rep coupling the reported curve is surely nonincreasing.
inline std::vector<SinrSweepRow> sinr_sweep(const GeneratorConfig& nodes_cfg,
                                            const GeneratorConfig& interferer_cfg,
                                            double interferer_intensity_on,
                                            const Window& w, const ResponseFunction& f,
                                            double P, double N, double T,
                                            const std::vector<double>& gamma_grid, int reps,
                                            const RngStream& root) {
    if (gamma_grid.empty() || reps <= 0) throw std::invalid_argument("sinr_sweep: empty grid or reps");
    for (std::size_t i = 0; i + 1 < gamma_grid.size(); ++i)
        if (!(gamma_grid[i] < gamma_grid[i + 1])) throw std::invalid_argument("sinr_sweep: grid must be ascending");
    const double r_snr = snr_radius(f, P, N, T);
    std::vector<std::int64_t> hits(gamma_grid.size(), 0);
    for (int rep = 0; rep < reps; ++rep) {
        auto g = derive(root, "sinr-rep", static_cast<std::uint64_t>(rep));
        auto gi = derive(g, "nodes");
        auto pat = sample(nodes_cfg, w, 2.0 * r_snr, gi);
        PointPattern inter(w, 0.0);
        if (interferer_intensity_on > 0.0) {
            auto g2 = derive(g, "interferers");
            inter = sample(interferer_cfg, w, 2.0 * r_snr, g2);
        }
        for (std::size_t k = 0; k < gamma_grid.size(); ++k) {
            SinrParams par{P, N, T, gamma_grid[k]};
            auto adj = build_sinr_graph(pat, inter, f, par);
            if (graph_spans(pat, adj, r_snr)) ++hits[k];
        }
    }
    std::vector<SinrSweepRow> rows(gamma_grid.size());
    for (std::size_t k = 0; k < gamma_grid.size(); ++k)
        rows[k] = {gamma_grid[k], wilson(hits[k], reps)};
    return rows;
}

// --- Chernoff bounds on joint level exceedances ----------------------------

enum class LevelSide { at_least, at_most };

namespace detail {

/// Exact integral of exp(sign * s * coverage(x)) - 1 for a union of equal
/// cubes: the arrangement of face cuts splits space into boxes of constant
/// coverage count.
inline double cube_arrangement_integral(double r, double s, int sign, const std::vector<Point>& sites) {
    const auto d = sites.front().size();
    std::vector<std::vector<double>> cuts(d);
    for (std::size_t k = 0; k < d; ++k) {
        for (const auto& z : sites) {
            cuts[k].push_back(z[k] - r);
            cuts[k].push_back(z[k] + r);
        }
        std::sort(cuts[k].begin(), cuts[k].end());
        cuts[k].erase(std::unique(cuts[k].begin(), cuts[k].end()), cuts[k].end());
    }
    std::array<std::size_t, 3> idx{};
    double total = 0.0;
    for (;;) {
        double vol = 1.0;
        Point centre(d);
        bool degenerate = false;
        for (std::size_t k = 0; k < d; ++k) {
            if (idx[k] + 1 >= cuts[k].size()) { degenerate = true; break; }
            vol *= cuts[k][idx[k] + 1] - cuts[k][idx[k]];
            centre[k] = 0.5 * (cuts[k][idx[k]] + cuts[k][idx[k] + 1]);
        }
        if (!degenerate && vol > 0.0) {
            int cover = 0;
            for (const auto& z : sites) {
                bool in = true;
                for (std::size_t k = 0; k < d; ++k)
                    if (std::abs(centre[k] - z[k]) >= r) { in = false; break; }
                if (in) ++cover;
            }
            if (cover > 0) total += (std::expm1(sign * s * static_cast<double>(cover))) * vol;
        }
        std::size_t axis = 0;
        for (; axis < d; ++axis) {
            if (++idx[axis] + 1 < cuts[axis].size()) break;
            idx[axis] = 0;
        }
        if (axis == d) break;
    }
    return total;
}

inline double simpson_1d(const std::function<double(double)>& f, double a, double b, double fa,
                         double fm, double fb, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_1d(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
           simpson_1d(f, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson_1d(f, a, b, fa, fm, fb, tol, 28);
}

}  // namespace detail

/// Chernoff bound on the probability that the additive field of a Poisson
/// process of the given intensity sits on the chosen side of level h at all
/// sites simultaneously. Needs s > 0; tighter s must be searched by the
/// caller. Only compactly supported responses are accepted: the cube case
/// integrates its arrangement exactly, the truncated power law integrates
/// numerically (planar sites only, tolerance 1e-8).
inline double chernoff_level_bound(double lambda, const ResponseFunction& f, double s, double h,
                                   const std::vector<Point>& sites, LevelSide side) {
    response_validate(f);
    if (!(lambda >= 0.0) || !(s > 0.0)) throw std::invalid_argument("chernoff_level_bound: need lambda >= 0, s > 0");
    if (sites.empty()) throw std::invalid_argument("chernoff_level_bound: no sites");
    if (std::holds_alternative<PowerLaw>(f))
        throw std::invalid_argument("chernoff_level_bound: response must have bounded support");
    const auto nd = sites.front().size();
    for (const auto& z : sites)
        if (z.size() != nd) throw std::invalid_argument("chernoff_level_bound: ragged sites");
    const int sign = side == LevelSide::at_least ? 1 : -1;
    const double n = static_cast<double>(sites.size());

    double integral;
    if (const auto* cube = std::get_if<IndicatorCube>(&f)) {
        if (nd > 3) throw std::invalid_argument("chernoff_level_bound: cube sites must be 1..3 dimensional");
        integral = detail::cube_arrangement_integral(cube->r, s, sign, sites);
    } else {
        const auto& tp = std::get<TruncatedPowerLaw>(f);
        if (nd != 2) throw std::invalid_argument("chernoff_level_bound: truncated power law needs planar sites");
        double xlo = sites[0][0], xhi = xlo, ylo = sites[0][1], yhi = ylo;
        for (const auto& z : sites) {
            xlo = std::min(xlo, z[0]); xhi = std::max(xhi, z[0]);
            ylo = std::min(ylo, z[1]); yhi = std::max(yhi, z[1]);
        }
        xlo -= tp.t_max; xhi += tp.t_max; ylo -= tp.t_max; yhi += tp.t_max;
        auto inner = [&](double x) {
            auto fy = [&](double y) {
                Point p{x, y};
                double acc = 0.0;
                for (const auto& z : sites) acc += response_at(f, p, z);
                return acc > 0.0 ? std::expm1(sign * s * acc) : 0.0;
            };
            return detail::adaptive_simpson(fy, ylo, yhi, 1e-8);
        };
        integral = detail::adaptive_simpson(inner, xlo, xhi, 1e-8);
    }
    return std::exp(-sign * s * n * h + lambda * integral);
}

}  // namespace germgrain
