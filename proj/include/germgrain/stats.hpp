#pragma once

// Distributional order checks on integer laws, summary statistics of point
// patterns, and Monte Carlo comparisons against the Poisson benchmark.

#include <functional>
#include <optional>

#include "percolation.hpp"

namespace germgrain {

// --- integer distributions and the convex order ----------------------------

struct IntDistribution {
    std::vector<double> pmf;     // pmf[i] is the mass at i
    double mean = 0.0;
    double truncated_mass = 0.0;
};

/// Tabulate a replication kernel on 0..cap. The mass beyond cap must stay
/// under tol.
inline IntDistribution make_distribution(const ReplicationKernel& k, std::int64_t cap, double tol = 1e-12) {
    kernel_validate(k);
    if (cap < 0) throw std::invalid_argument("make_distribution: negative cap");
    IntDistribution d;
    d.pmf.resize(static_cast<std::size_t>(cap) + 1);
    double total = 0.0;
    for (std::int64_t i = 0; i <= cap; ++i) {
        double p = kernel_pmf(k, i);
        d.pmf[static_cast<std::size_t>(i)] = p;
        total += p;
        d.mean += static_cast<double>(i) * p;
    }
    d.truncated_mass = std::max(0.0, 1.0 - total);
    if (d.truncated_mass > tol) throw std::invalid_argument("make_distribution: cap truncates too much mass");
    return d;
}

inline IntDistribution distribution_from_pmf(std::vector<double> pmf) {
    if (pmf.empty()) throw std::invalid_argument("distribution_from_pmf: empty pmf");
    double total = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (!(pmf[i] >= 0.0)) throw std::invalid_argument("distribution_from_pmf: negative mass");
        total += pmf[i];
        mean += static_cast<double>(i) * pmf[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("distribution_from_pmf: mass must sum to one");
    return {std::move(pmf), mean, 0.0};
}

/// Stop-loss transform E(X - k)+ at integer k.
inline double stop_loss(const IntDistribution& d, std::int64_t k) {
    if (k < 0) throw std::invalid_argument("stop_loss: negative threshold");
    double s = 0.0;
    for (std::size_t i = d.pmf.size(); i-- > 0;) {
        auto v = static_cast<std::int64_t>(i);
        if (v <= k) break;
        s += static_cast<double>(v - k) * d.pmf[i];
    }
    return s;
}

enum class CxVerdict { a_le_b, b_le_a, equal, incomparable };

struct CxResult {
    CxVerdict verdict = CxVerdict::equal;
    std::int64_t k_a_exceeds = -1;  // smallest k with SL_a(k) > SL_b(k) + tol
    std::int64_t k_b_exceeds = -1;
};

/// Convex-order comparison of two integer laws with a common mean. Since
/// both live on the integers, comparing stop-loss transforms at integer
/// thresholds is conclusive.
inline CxResult cx_order_check(const IntDistribution& a, const IntDistribution& b, double tol = 1e-12) {
    if (std::abs(a.mean - b.mean) > std::max(tol, 1e-9 * (1.0 + std::abs(a.mean))))
        throw std::invalid_argument("cx_order_check: means differ");
    CxResult res;
    auto top = static_cast<std::int64_t>(std::max(a.pmf.size(), b.pmf.size()));
    for (std::int64_t k = 0; k <= top; ++k) {
        double sa = stop_loss(a, k), sb = stop_loss(b, k);
        if (sa > sb + tol && res.k_a_exceeds < 0) res.k_a_exceeds = k;
        if (sb > sa + tol && res.k_b_exceeds < 0) res.k_b_exceeds = k;
    }
    if (res.k_a_exceeds >= 0 && res.k_b_exceeds >= 0) res.verdict = CxVerdict::incomparable;
    else if (res.k_a_exceeds >= 0) res.verdict = CxVerdict::b_le_a;
    else if (res.k_b_exceeds >= 0) res.verdict = CxVerdict::a_le_b;
    else res.verdict = CxVerdict::equal;
    return res;
}

// --- pattern statistics ----------------------------------------------------

/// Points of the pattern (margin collar included) inside the half-open box.
inline std::int64_t count_in_box(const PointPattern& pat, std::span<const double> lo,
                                 std::span<const double> hi) {
    std::int64_t c = 0;
    for (std::size_t i = 0; i < pat.size(); ++i) {
        auto p = pat.point(i);
        bool in = true;
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (!(p[k] > lo[k] && p[k] <= hi[k])) { in = false; break; }
        if (in) ++c;
    }
    return c;
}

inline bool boxes_overlap(const Window& a, const Window& b) {
    for (int k = 0; k < a.dim(); ++k)
        if (!(a.lower[static_cast<std::size_t>(k)] < b.upper[static_cast<std::size_t>(k)] &&
              b.lower[static_cast<std::size_t>(k)] < a.upper[static_cast<std::size_t>(k)]))
            return false;
    return true;
}

enum class EdgeCorrection { none, border };

struct RipleyRow {
    double r = 0.0;
    double value = 0.0;
    std::int64_t centers = 0;
};

/// Empirical K function on an ascending radius grid. Centers are the points
/// of the window (eroded by r under the border correction); neighbour counts
/// use the whole pattern including the collar. The raw statistic converges
/// to lambda pi r^2 for a planar Poisson process; `normalize` divides by the
/// intensity once more to target pi r^2.
inline std::vector<RipleyRow> ripley_k(const PointPattern& pat, const std::vector<double>& r_grid,
                                       std::optional<double> intensity = std::nullopt,
                                       EdgeCorrection correction = EdgeCorrection::border,
                                       bool normalize = false) {
    if (r_grid.empty()) throw std::invalid_argument("ripley_k: empty grid");
    for (std::size_t i = 0; i + 1 < r_grid.size(); ++i)
        if (!(r_grid[i] < r_grid[i + 1])) throw std::invalid_argument("ripley_k: grid must be ascending");
    if (!(r_grid.front() > 0.0)) throw std::invalid_argument("ripley_k: radii must be positive");
    double lam;
    if (intensity) {
        lam = *intensity;
        if (!(lam > 0.0)) throw std::invalid_argument("ripley_k: intensity must be positive");
    } else {
        auto n_in = pat.count_in_window();
        if (n_in == 0) throw std::invalid_argument("ripley_k: empty pattern and no intensity given");
        lam = static_cast<double>(n_in) / pat.window.volume();
    }
    CellGrid grid = build_cell_grid(pat, r_grid.back());
    std::vector<RipleyRow> rows;
    rows.reserve(r_grid.size());
    for (double r : r_grid) {
        Window region = correction == EdgeCorrection::border ? pat.window.eroded(r) : pat.window;
        std::int64_t centers = 0;
        double acc = 0.0;
        for (std::size_t i = 0; i < pat.size(); ++i) {
            auto p = pat.point(i);
            if (!region.contains(p)) continue;
            ++centers;
            acc += static_cast<double>(neighbors_within(grid, pat, p, r, static_cast<std::int32_t>(i)).size());
        }
        double value = acc / (lam * region.volume());
        if (normalize) value /= lam;
        rows.push_back({r, value, centers});
    }
    return rows;
}

/// Wilson interval for P(no point falls in the box).
inline Estimate void_probability(const GeneratorConfig& cfg, const Window& w, const Window& box,
                                 int reps, const RngStream& root) {
    if (reps <= 0) throw std::invalid_argument("void_probability: reps must be positive");
    if (box.dim() != w.dim()) throw std::invalid_argument("void_probability: dimension mismatch");
    std::int64_t hits = 0;
    for (int i = 0; i < reps; ++i) {
        auto g = derive(root, "void-rep", static_cast<std::uint64_t>(i));
        auto pat = sample(cfg, w, 0.0, g);
        if (count_in_box(pat, box.lower, box.upper) == 0) ++hits;
    }
    return wilson(hits, reps);
}

/// Normal-theory interval for E[product of counts] over pairwise disjoint
/// boxes.
inline Estimate factorial_moment(const GeneratorConfig& cfg, const Window& w,
                                 const std::vector<Window>& boxes, int reps, const RngStream& root) {
    if (reps <= 0 || boxes.empty()) throw std::invalid_argument("factorial_moment: bad reps or boxes");
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j)
            if (boxes_overlap(boxes[i], boxes[j]))
                throw std::invalid_argument("factorial_moment: boxes must be disjoint");
    std::vector<double> vals(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        auto g = derive(root, "moment-rep", static_cast<std::uint64_t>(i));
        auto pat = sample(cfg, w, 0.0, g);
        double prod = 1.0;
        for (const auto& b : boxes) prod *= static_cast<double>(count_in_box(pat, b.lower, b.upper));
        vals[static_cast<std::size_t>(i)] = prod;
    }
    return mean_ci(vals);
}

// --- weak sub and super Poisson faces --------------------------------------

enum class FaceLabel { sub, super, inconclusive };

struct FaceRow {
    std::string kind;        // "void" or "moment"
    std::size_t index = 0;
    double estimate = 0.0;
    double target = 0.0;
    double sigma = 0.0;      // standard error of the estimate
    double z = 0.0;
    FaceLabel label = FaceLabel::inconclusive;
};

struct WeakPoissonReport {
    std::vector<FaceRow> rows;
    int translates_per_axis = 1;
};

namespace detail {

/// Spatial period of the mean measure, per axis; zeros mean translation
/// invariant.
inline std::vector<double> mean_period(const GeneratorConfig& cfg) {
    const auto* spec = std::get_if<LatticeConfig>(&cfg) ? &std::get<LatticeConfig>(cfg).spec
                     : std::get_if<PerturbedLatticeConfig>(&cfg) ? &std::get<PerturbedLatticeConfig>(cfg).lattice
                     : nullptr;
    std::vector<double> period(static_cast<std::size_t>(config_dim(cfg)), 0.0);
    if (spec == nullptr) return period;
    for (auto& v : period) v = spec->spacing;
    if (spec->type == LatticeType::hexagonal) period[1] = spec->spacing * std::sqrt(3.0);
    return period;
}

inline FaceRow face_row(std::string kind, std::size_t index, const std::vector<double>& vals,
                        double target) {
    FaceRow row;
    row.kind = std::move(kind);
    row.index = index;
    double n = static_cast<double>(vals.size());
    double m = 0.0;
    for (double v : vals) m += v;
    m /= n;
    double var = 0.0;
    for (double v : vals) var += (v - m) * (v - m);
    var = vals.size() > 1 ? var / (n - 1.0) : 0.0;
    row.estimate = m;
    row.target = target;
    row.sigma = std::sqrt(var / n);
    double gap = m - target;
    if (row.sigma == 0.0) {
        row.z = gap == 0.0 ? 0.0 : (gap < 0.0 ? -std::numeric_limits<double>::infinity()
                                              : std::numeric_limits<double>::infinity());
    } else {
        row.z = gap / row.sigma;
    }
    row.label = row.z <= -3.0 ? FaceLabel::sub : row.z >= 3.0 ? FaceLabel::super : FaceLabel::inconclusive;
    return row;
}

}  // namespace detail

/// Monte Carlo test of the void and moment faces against the Poisson
/// benchmark with the same mean measure. Estimates below the benchmark by
/// three standard errors are labelled sub, above super. For periodic mean
/// measures each statistic is averaged over a grid of lattice translates so
/// that the stationary quantity is targeted.
inline WeakPoissonReport weak_poisson_report(const GeneratorConfig& cfg, const Window& w,
                                             const std::vector<Window>& void_boxes,
                                             const std::vector<std::vector<Window>>& moment_sets,
                                             int reps, const RngStream& root,
                                             int translates_per_axis = 7) {
    if (reps < 2) throw std::invalid_argument("weak_poisson_report: need at least two reps");
    if (translates_per_axis < 1) throw std::invalid_argument("weak_poisson_report: bad translate count");
    for (const auto& boxes : moment_sets)
        for (std::size_t i = 0; i < boxes.size(); ++i)
            for (std::size_t j = i + 1; j < boxes.size(); ++j)
                if (boxes_overlap(boxes[i], boxes[j]))
                    throw std::invalid_argument("weak_poisson_report: moment boxes must be disjoint");

    const auto d = static_cast<std::size_t>(config_dim(cfg));
    auto period = detail::mean_period(cfg);
    double max_period = 0.0;
    for (double v : period) max_period = std::max(max_period, v);
    const int T = max_period > 0.0 ? translates_per_axis : 1;
    std::vector<Point> shifts;
    std::vector<std::size_t> idx(d, 0);
    for (;;) {
        Point u(d, 0.0);
        for (std::size_t k = 0; k < d; ++k)
            u[k] = period[k] * static_cast<double>(idx[k]) / static_cast<double>(T);
        shifts.push_back(std::move(u));
        std::size_t axis = 0;
        for (; axis < d; ++axis) {
            if (static_cast<int>(++idx[axis]) < T) break;
            idx[axis] = 0;
        }
        if (axis == d) break;
    }

    const double lam = mean_intensity(cfg);
    std::vector<std::vector<double>> void_vals(void_boxes.size(),
                                               std::vector<double>(static_cast<std::size_t>(reps)));
    std::vector<std::vector<double>> mom_vals(moment_sets.size(),
                                              std::vector<double>(static_cast<std::size_t>(reps)));
    Point lo(d), hi(d);
    for (int rep = 0; rep < reps; ++rep) {
        auto g = derive(root, "face-rep", static_cast<std::uint64_t>(rep));
        auto pat = sample(cfg, w, max_period, g);
        for (std::size_t b = 0; b < void_boxes.size(); ++b) {
            double acc = 0.0;
            for (const auto& u : shifts) {
                for (std::size_t k = 0; k < d; ++k) {
                    lo[k] = void_boxes[b].lower[k] + u[k];
                    hi[k] = void_boxes[b].upper[k] + u[k];
                }
                if (count_in_box(pat, lo, hi) == 0) acc += 1.0;
            }
            void_vals[b][static_cast<std::size_t>(rep)] = acc / static_cast<double>(shifts.size());
        }
        for (std::size_t s = 0; s < moment_sets.size(); ++s) {
            double acc = 0.0;
            for (const auto& u : shifts) {
                double prod = 1.0;
                for (const auto& box : moment_sets[s]) {
                    for (std::size_t k = 0; k < d; ++k) {
                        lo[k] = box.lower[k] + u[k];
                        hi[k] = box.upper[k] + u[k];
                    }
                    prod *= static_cast<double>(count_in_box(pat, lo, hi));
                }
                acc += prod;
            }
            mom_vals[s][static_cast<std::size_t>(rep)] = acc / static_cast<double>(shifts.size());
        }
    }

    WeakPoissonReport rep_out;
    rep_out.translates_per_axis = T;
    for (std::size_t b = 0; b < void_boxes.size(); ++b)
        rep_out.rows.push_back(detail::face_row("void", b, void_vals[b],
                                                std::exp(-lam * void_boxes[b].volume())));
    for (std::size_t s = 0; s < moment_sets.size(); ++s) {
        double target = 1.0;
        for (const auto& box : moment_sets[s]) target *= lam * box.volume();
        rep_out.rows.push_back(detail::face_row("moment", s, mom_vals[s], target));
    }
    return rep_out;
}

// --- multivariate test battery ---------------------------------------------

struct ExpPlus { std::vector<double> s; };    // exp(<s, x>), s >= 0
struct ExpMinus { std::vector<double> s; };   // exp(-<s, x>), s >= 0
struct Ramp { std::vector<double> weights; double threshold = 0.0; };  // (<w, x> - t)+
struct ProductCounts {};                      // product of coordinates

using TestFunction = std::variant<ExpPlus, ExpMinus, Ramp, ProductCounts>;

inline void test_function_validate(const TestFunction& f) {
    std::visit(overloaded{
        [](const ExpPlus& e) {
            if (e.s.empty()) throw std::invalid_argument("test function: empty weights");
            for (double v : e.s) if (!(v >= 0.0)) throw std::invalid_argument("test function: negative weight");
        },
        [](const ExpMinus& e) {
            if (e.s.empty()) throw std::invalid_argument("test function: empty weights");
            for (double v : e.s) if (!(v >= 0.0)) throw std::invalid_argument("test function: negative weight");
        },
        [](const Ramp& r) {
            if (r.weights.empty()) throw std::invalid_argument("test function: empty weights");
            for (double v : r.weights) if (!(v >= 0.0)) throw std::invalid_argument("test function: negative weight");
        },
        [](const ProductCounts&) {}}, f);
}

inline double eval_test_function(const TestFunction& f, std::span<const double> x) {
    return std::visit(overloaded{
        [&](const ExpPlus& e) {
            double dot = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) dot += e.s[k] * x[k];
            return std::exp(dot);
        },
        [&](const ExpMinus& e) {
            double dot = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) dot += e.s[k] * x[k];
            return std::exp(-dot);
        },
        [&](const Ramp& r) {
            double dot = -r.threshold;
            for (std::size_t k = 0; k < x.size(); ++k) dot += r.weights[k] * x[k];
            return std::max(0.0, dot);
        },
        [&](const ProductCounts&) {
            double prod = 1.0;
            for (double v : x) prod *= v;
            return prod;
        }}, f);
}

inline std::string test_function_name(const TestFunction& f) {
    return std::visit(overloaded{
        [](const ExpPlus&) { return std::string("exp_plus"); },
        [](const ExpMinus&) { return std::string("exp_minus"); },
        [](const Ramp&) { return std::string("ramp"); },
        [](const ProductCounts&) { return std::string("product"); }}, f);
}

struct DcxRow {
    std::string name;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double sigma_diff = 0.0;
    double z = 0.0;
    bool consistent = true;
};

struct DcxReport {
    std::vector<DcxRow> rows;
    bool consistent = true;
};

/// One-sided sample comparison: the ordering is consistent with the data
/// when every battery member has mean under A at most the mean under B plus
/// 1.96 standard errors of the difference.
inline DcxReport dcx_counts_check(const std::vector<std::vector<double>>& samples_a,
                                  const std::vector<std::vector<double>>& samples_b,
                                  const std::vector<TestFunction>& battery) {
    if (samples_a.size() < 2 || samples_b.size() < 2 || battery.empty())
        throw std::invalid_argument("dcx_counts_check: need two samples per side and a battery");
    for (const auto& f : battery) test_function_validate(f);
    DcxReport rep;
    for (const auto& f : battery) {
        auto stats = [&](const std::vector<std::vector<double>>& xs) {
            double m = 0.0;
            for (const auto& x : xs) m += eval_test_function(f, x);
            m /= static_cast<double>(xs.size());
            double var = 0.0;
            for (const auto& x : xs) {
                double dlt = eval_test_function(f, x) - m;
                var += dlt * dlt;
            }
            var /= static_cast<double>(xs.size() - 1);
            return std::pair{m, var};
        };
        auto [ma, va] = stats(samples_a);
        auto [mb, vb] = stats(samples_b);
        DcxRow row;
        row.name = test_function_name(f);
        row.mean_a = ma;
        row.mean_b = mb;
        row.sigma_diff = std::sqrt(va / static_cast<double>(samples_a.size()) +
                                   vb / static_cast<double>(samples_b.size()));
        row.z = row.sigma_diff > 0.0 ? (ma - mb) / row.sigma_diff
                                     : (ma == mb ? 0.0 : (ma < mb ? -1.0 : 1.0) *
                                                             std::numeric_limits<double>::infinity());
        row.consistent = ma <= mb + 1.96 * row.sigma_diff;
        rep.consistent = rep.consistent && row.consistent;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline DcxReport dcx_counts_check(const std::vector<std::vector<std::int64_t>>& samples_a,
                                  const std::vector<std::vector<std::int64_t>>& samples_b,
                                  const std::vector<TestFunction>& battery) {
    auto widen = [](const std::vector<std::vector<std::int64_t>>& xs) {
        std::vector<std::vector<double>> out(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) out[i].assign(xs[i].begin(), xs[i].end());
        return out;
    };
    return dcx_counts_check(widen(samples_a), widen(samples_b), battery);
}

// --- second differences of randomized evaluations --------------------------

struct ConvexityReport {
    std::vector<double> g;        // g[i] is the value at n = i - n_max
    std::int64_t n_max = 0;
    double min_second_difference = 0.0;
    std::int64_t argmin = 0;
};

/// g(n) = E f(sgn(n) (xi_1 + ... + xi_|n|)) by exact convolution, with
/// g(0) = f(0). Convexity of f forces every second difference of g to be
/// nonnegative.
inline ConvexityReport second_difference_convexity(const std::function<double(double)>& f,
                                                   const IntDistribution& xi, std::int64_t n_max) {
    if (n_max < 1) throw std::invalid_argument("second_difference_convexity: n_max must be positive");
    if (xi.truncated_mass > 1e-9)
        throw std::invalid_argument("second_difference_convexity: step law must carry its full mass");
    ConvexityReport rep;
    rep.n_max = n_max;
    rep.g.assign(static_cast<std::size_t>(2 * n_max) + 1, 0.0);
    auto at = [&](std::int64_t n) -> double& { return rep.g[static_cast<std::size_t>(n + n_max)]; };
    at(0) = f(0.0);
    std::vector<double> conv{1.0};  // law of the n-fold sum
    for (std::int64_t n = 1; n <= n_max; ++n) {
        std::vector<double> next(conv.size() + xi.pmf.size() - 1, 0.0);
        for (std::size_t i = 0; i < conv.size(); ++i) {
            if (conv[i] == 0.0) continue;
            for (std::size_t j = 0; j < xi.pmf.size(); ++j) next[i + j] += conv[i] * xi.pmf[j];
        }
        conv = std::move(next);
        double pos = 0.0, neg = 0.0;
        for (std::size_t s = 0; s < conv.size(); ++s) {
            pos += conv[s] * f(static_cast<double>(s));
            neg += conv[s] * f(-static_cast<double>(s));
        }
        at(n) = pos;
        at(-n) = neg;
    }
    rep.min_second_difference = std::numeric_limits<double>::infinity();
    for (std::int64_t n = -n_max + 1; n <= n_max - 1; ++n) {
        double dd = at(n + 1) - 2.0 * at(n) + at(n - 1);
        if (dd < rep.min_second_difference) {
            rep.min_second_difference = dd;
            rep.argmin = n;
        }
    }
    return rep;
}

}  // namespace germgrain
