// Acceptance battery. Each criterion prints exactly one [PASS]/[FAIL] line;
// run with a criterion number 1..13 or `all` (default). Exit 0 only when
// every selected criterion passes.

#include <germgrain/cli.hpp>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace germgrain;

Window box2(double x0, double y0, double x1, double y1) {
    return Window{{x0, y0}, {x1, y1}};
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

GeneratorConfig hex_perturbed(ReplicationKernel k) {
    return PerturbedLatticeConfig{LatticeSpec{LatticeType::hexagonal, 1.0, 2}, std::move(k),
                                  UniformCell{}};
}

GeneratorConfig square_perturbed(ReplicationKernel k) {
    return PerturbedLatticeConfig{LatticeSpec{LatticeType::square, 1.0, 2}, std::move(k),
                                  UniformCell{}};
}

// ---------------------------------------------------------------------------

bool crit1(std::string& note) {
    GeneratorConfig cfg = LatticeConfig{LatticeSpec{LatticeType::hexagonal, 1.0, 2}};
    Window w = Window::cube(0.0, 20.0, 2);
    auto g1 = RngStream::from_seed(1);
    auto pat1 = sample(cfg, w, 2.0 * 0.51, g1);
    bool at_51 = spans_any(components(pat1, 0.51));
    auto g2 = RngStream::from_seed(1);
    auto pat2 = sample(cfg, w, 2.0 * 0.49, g2);
    bool at_49 = spans_any(components(pat2, 0.49));
    note = fmt("spans(0.51)=%d spans(0.49)=%d", at_51 ? 1 : 0, at_49 ? 1 : 0);
    return at_51 && !at_49;
}

bool crit2(std::string& note) {
    GeneratorConfig cfg = PoissonConfig{1.154701, 2};
    Window w = Window::cube(0.0, 50.0, 2);
    double rc = estimate_rc(cfg, w, 0.50, 0.62, 200, 0.01, RngStream::from_seed(20260822));
    note = fmt("rc_hat=%.4f in [0.50,0.62], reference 0.5576495", rc);
    return rc >= 0.50 && rc <= 0.62;
}

struct Crossing {
    double lo = -1.0, mid = -1.0, hi = -1.0;
};

Crossing crossing_of(const GeneratorConfig& cfg, const Window& w, const std::vector<double>& grid,
                     int reps, const RngStream& root) {
    const double margin = 2.0 * grid.back();
    std::vector<double> sum(grid.size(), 0.0), sum2(grid.size(), 0.0);
    for (int rep = 0; rep < reps; ++rep) {
        auto g = derive(root, "fig-rep", static_cast<std::uint64_t>(rep));
        auto pat = sample(cfg, w, margin, g);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double f = components(pat, grid[k]).fraction_largest;
            sum[k] += f;
            sum2[k] += f * f;
        }
    }
    Crossing c;
    const double n = reps;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double m = sum[k] / n;
        double var = std::max(0.0, (sum2[k] - n * m * m) / (n - 1.0));
        double h = 1.959963984540054 * std::sqrt(var / n);
        if (c.lo < 0.0 && m + h >= 0.5) c.lo = grid[k];
        if (c.mid < 0.0 && m >= 0.5) c.mid = grid[k];
        if (c.hi < 0.0 && m - h >= 0.5) c.hi = grid[k];
    }
    return c;
}

// Nondecreasing crossings along a chain; an inversion is tolerated only when
// the two crossing bands overlap, and only once.
bool chain_ok(const std::vector<Crossing>& cs, int& inversions) {
    inversions = 0;
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
        if (cs[i].mid < 0.0 || cs[i + 1].mid < 0.0) return false;
        if (cs[i + 1].mid < cs[i].mid) {
            bool overlap = cs[i + 1].hi >= cs[i].lo && cs[i].hi >= cs[i + 1].lo;
            if (!overlap) return false;
            ++inversions;
        }
    }
    return inversions <= 1;
}

bool crit3(std::string& note) {
    Window w = Window::cube(0.0, 30.0, 2);
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(0.45 + 0.01 * i);
    const double lam = 2.0 / std::numbers::sqrt3;
    std::vector<GeneratorConfig> chain_a = {
        hex_perturbed(BinomialK{1, 1.0}), hex_perturbed(BinomialK{2, 0.5}),
        hex_perturbed(BinomialK{5, 0.2}), hex_perturbed(BinomialK{20, 0.05})};
    std::vector<GeneratorConfig> chain_b = {
        PoissonConfig{lam, 2}, hex_perturbed(NegBinomialK{20, 1.0 / 21.0}),
        hex_perturbed(NegBinomialK{5, 1.0 / 6.0}), hex_perturbed(NegBinomialK{2, 1.0 / 3.0}),
        hex_perturbed(NegBinomialK{1, 0.5})};
    auto run_chain = [&](const std::vector<GeneratorConfig>& chain) {
        std::vector<Crossing> cs;
        for (const auto& cfg : chain)
            cs.push_back(crossing_of(cfg, w, grid, 50, RngStream::from_seed(2026)));
        return cs;
    };
    auto ca = run_chain(chain_a);
    auto cb = run_chain(chain_b);
    int inv_a = 0, inv_b = 0;
    bool ok_a = chain_ok(ca, inv_a);
    bool ok_b = chain_ok(cb, inv_b);
    std::string xs;
    for (const auto& c : ca) xs += fmt("%.2f ", c.mid);
    xs += "| ";
    for (const auto& c : cb) xs += fmt("%.2f ", c.mid);
    note = fmt("crossings %s(inversions %d+%d)", xs.c_str(), inv_a, inv_b);
    return ok_a && ok_b;
}

bool crit4(std::string& note) {
    const double lam = 1.154701;
    const double lo = rc_lower(lam, 2), hi = rc_upper_tilde(lam, 2);
    Window w = Window::cube(0.0, 30.0, 2);
    struct Case { const char* name; GeneratorConfig cfg; };
    std::vector<Case> cases;
    cases.push_back({"poisson", PoissonConfig{lam, 2}});
    cases.push_back({"bin2", hex_perturbed(BinomialK{2, 0.5})});
    cases.push_back({"bin5", hex_perturbed(BinomialK{5, 0.2})});
    bool ok = true;
    std::string xs;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        double rc = estimate_rc(cases[i].cfg, w, 0.40, 0.80, 100, 0.01,
                                RngStream::from_seed(400 + static_cast<std::uint64_t>(i)));
        ok = ok && rc >= lo && rc <= hi;
        xs += fmt("%s=%.3f ", cases[i].name, rc);
    }
    note = fmt("%sall in [%.6f, %.5f]", xs.c_str(), lo, hi);
    return ok;
}

bool crit5(std::string& note) {
    auto dist = [](ReplicationKernel k) { return make_distribution(k, 200); };
    std::vector<IntDistribution> sub = {
        dist(HyperGeometricK{12, 3, 8}), dist(BinomialK{3, 2.0 / 3.0}),
        dist(BinomialK{4, 0.5}),         dist(BinomialK{6, 1.0 / 3.0}),
        dist(BinomialK{12, 1.0 / 6.0}),  dist(PoissonK{2.0})};
    std::vector<IntDistribution> super = {
        dist(PoissonK{2.0}),
        dist(NegBinomialK{20, 1.0 / 11.0}),
        dist(NegBinomialK{5, 2.0 / 7.0}),
        dist(NegBinomialK{2, 0.5}),
        dist(GeometricK{1.0 / 3.0}),
        dist(GeoMixtureK{{0.5, 0.5}, {0.5, 0.25}})};
    int links = 0;
    for (const auto* chain : {&sub, &super})
        for (std::size_t i = 0; i + 1 < chain->size(); ++i) {
            auto res = cx_order_check((*chain)[i], (*chain)[i + 1], 1e-12);
            if (res.verdict != CxVerdict::a_le_b) {
                note = fmt("link %zu of the %s chain is not increasing", i,
                           chain == &sub ? "sub" : "super");
                return false;
            }
            ++links;
        }
    note = fmt("%d links ordered at tol 1e-12, cap 200", links);
    return true;
}

double sigma_of(const Estimate& e) {
    return (e.hi - e.lo) / (2.0 * 1.959963984540054);
}

bool crit6(std::string& note) {
    GeneratorConfig cfg = square_perturbed(PoissonK{1.0});
    Window w = Window::cube(0.0, 10.0, 2);
    auto root = RngStream::from_seed(606);
    std::vector<Window> voids = {box2(0.3, 0.4, 1.7, 1.2), box2(2.2, 1.5, 3.1, 3.0),
                                 box2(4.05, 0.35, 5.55, 1.15), box2(6.3, 2.2, 7.0, 4.2),
                                 box2(1.1, 5.3, 2.6, 6.1)};
    std::vector<std::vector<Window>> pairs = {
        {box2(0.5, 6.5, 1.5, 7.5), box2(2.0, 6.5, 3.0, 7.5)},
        {box2(4.3, 4.2, 5.8, 5.2), box2(6.1, 4.4, 7.1, 5.9)},
        {box2(7.2, 0.3, 8.7, 1.3), box2(7.4, 1.8, 8.9, 2.8)},
    };
    double worst = 0.0;
    for (std::size_t b = 0; b < voids.size(); ++b) {
        auto est = void_probability(cfg, w, voids[b], 500, derive(root, "void", b));
        double ref = std::exp(-voids[b].volume());
        double z = (est.value - ref) / sigma_of(est);
        worst = std::max(worst, std::abs(z));
        if (std::abs(z) > 3.0) {
            note = fmt("void box %zu: est %.3f vs %.3f (|z|=%.1f)", b, est.value, ref, std::abs(z));
            return false;
        }
    }
    for (std::size_t s = 0; s < pairs.size(); ++s) {
        auto est = factorial_moment(cfg, w, pairs[s], 500, derive(root, "moment", s));
        double ref = pairs[s][0].volume() * pairs[s][1].volume();
        double z = (est.value - ref) / sigma_of(est);
        worst = std::max(worst, std::abs(z));
        if (std::abs(z) > 3.0) {
            note = fmt("moment pair %zu: est %.3f vs %.3f (|z|=%.1f)", s, est.value, ref,
                       std::abs(z));
            return false;
        }
    }
    note = fmt("5 void + 3 moment statistics within 3 sigma (max |z|=%.2f)", worst);
    return true;
}

bool crit7(std::string& note) {
    Window w = Window::cube(0.0, 6.0, 2);
    std::vector<Window> voids = {box2(0.5, 0.5, 1.5, 1.5), box2(0.5, 2.5, 2.5, 3.5),
                                 box2(2.5, 4.5, 3.5, 5.5), box2(4.5, 1.5, 5.5, 3.5),
                                 box2(3.5, 0.5, 4.5, 1.5)};
    std::vector<std::vector<Window>> moms = {
        {box2(0.5, 0.5, 1.0, 1.5), box2(1.0, 0.5, 1.5, 1.5)},
        {box2(2.5, 1.5, 3.5, 2.0), box2(2.5, 2.0, 3.5, 2.5)},
        {box2(4.5, 3.5, 5.0, 5.5), box2(5.0, 3.5, 5.5, 5.5)},
    };
    auto check = [&](const GeneratorConfig& cfg, FaceLabel want, double sign, double& weakest,
                     std::string& fail) {
        auto rep = weak_poisson_report(cfg, w, voids, moms, 500, RngStream::from_seed(17), 1);
        weakest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            const auto& row = rep.rows[i];
            if (row.label != want) {
                fail = fmt("face %zu has z=%.2f", i, row.z);
                return false;
            }
            weakest = std::min(weakest, sign * row.z);
        }
        return true;
    };
    double zb = 0.0, zg = 0.0;
    std::string fail;
    if (!check(square_perturbed(BinomialK{2, 0.5}), FaceLabel::sub, -1.0, zb, fail)) {
        note = "binomial config not sub on every face: " + fail;
        return false;
    }
    if (!check(square_perturbed(GeometricK{0.2}), FaceLabel::super, 1.0, zg, fail)) {
        note = "geometric config not super on every face: " + fail;
        return false;
    }
    note = fmt("bin sub on 8 faces (min |z|=%.1f), geo super on 8 faces (min z=%.1f)", zb, zg);
    return true;
}

bool crit8(std::string& note) {
    EigenTable table{{{0.3, 0.2}, {0.25, 0.35}, {0.1, 0.15}}};
    const std::int64_t reps = 100000;
    auto root = RngStream::from_seed(88);
    auto ga = derive(root, "det");
    auto gb = derive(root, "poi");
    auto gc = derive(root, "perm");
    auto det = sample_count_vectors(CountModel::deterministic, table, reps, ga);
    auto poi = sample_count_vectors(CountModel::poisson, table, reps, gb);
    auto perm = sample_count_vectors(CountModel::permanental, table, reps, gc);
    std::vector<TestFunction> battery;
    for (double si : {0.2, 0.5, 1.0})
        for (double sj : {0.2, 0.5, 1.0}) battery.push_back(ExpPlus{{si, sj}});
    auto r1 = dcx_counts_check(det, poi, battery);
    auto r2 = dcx_counts_check(poi, perm, battery);
    if (!r1.consistent || !r2.consistent) {
        note = fmt("ordering violated (det<=poi %d, poi<=perm %d)", r1.consistent ? 1 : 0,
                   r2.consistent ? 1 : 0);
        return false;
    }
    auto col_stats = [&](const std::vector<std::vector<std::int64_t>>& xs, std::size_t j) {
        double m = 0.0, m2 = 0.0;
        for (const auto& v : xs) {
            double x = static_cast<double>(v[j]);
            m += x;
            m2 += x * x;
        }
        double n = static_cast<double>(xs.size());
        m /= n;
        return std::pair{m, (m2 / n - m * m) / n};
    };
    double worst = 0.0;
    for (std::size_t j = 0; j < table.sets(); ++j) {
        auto [ma, va] = col_stats(det, j);
        auto [mb, vb] = col_stats(poi, j);
        auto [mc, vc] = col_stats(perm, j);
        double z1 = std::abs(ma - mb) / std::sqrt(va + vb);
        double z2 = std::abs(mb - mc) / std::sqrt(vb + vc);
        double z3 = std::abs(ma - mc) / std::sqrt(va + vc);
        worst = std::max({worst, z1, z2, z3});
    }
    if (worst > 3.0) {
        note = fmt("column means differ across models (max |z|=%.2f)", worst);
        return false;
    }
    note = fmt("det<=poi<=perm on 9 ExpPlus members at 1e5 reps; means equal (max |z|=%.2f)",
               worst);
    return true;
}

bool crit9(std::string& note) {
    std::string search;
    try {
        counterexample_params(0.1, 0.2, 0.9, 40000);
        search = "search unexpectedly feasible";
    } catch (const InfeasibleError& e) {
        search = fmt("search infeasible as documented (best fraction %.2e at R=%.3f)",
                     e.best_value, e.best_R);
    }
    AnnularConfig cox = annular_desk_params(0.2);
    Window w = Window::cube(0.0, 10.0 * cox.R, 2);
    auto p_cox = percolation_probability(GeneratorConfig{cox}, w, 0.2, 100,
                                         RngStream::from_seed(909));
    auto p_poi = percolation_probability(GeneratorConfig{PoissonConfig{0.1, 2}}, w, 0.2, 100,
                                         RngStream::from_seed(910));
    double gap = p_cox.value - p_poi.value;
    note = fmt("%s; p_span cox %.2f vs poisson %.2f (gap %.2f, window %.0f)", search.c_str(),
               p_cox.value, p_poi.value, gap, 10.0 * cox.R);
    return gap >= 0.5;
}

bool crit10(std::string& note) {
    ResponseFunction f = PowerLaw{4.0};
    const double P = 1.0, T = 1.0, N = std::pow(2.4, -4.0);
    const double r_l = snr_radius(f, P, N, T);
    if (std::abs(r_l - 0.7) > 1e-9) {
        note = fmt("snr radius %.12f != 0.7", r_l);
        return false;
    }
    GeneratorConfig nodes = PoissonConfig{1.2, 2};
    GeneratorConfig inter = PoissonConfig{0.3, 2};
    Window w = Window::cube(0.0, 15.0, 2);
    std::vector<double> gammas = {0.0, 0.002, 0.008, 0.02, 0.05, 0.12};
    auto rows = sinr_sweep(nodes, inter, 0.3, w, f, P, N, T, gammas, 60,
                           RngStream::from_seed(1010));
    if (rows.front().p_span.value < 0.8) {
        note = fmt("gamma=0 configuration not supercritical (p=%.2f)", rows.front().p_span.value);
        return false;
    }
    for (std::size_t k = 0; k + 1 < rows.size(); ++k)
        if (rows[k + 1].p_span.value > rows[k].p_span.value + 1e-12) {
            note = fmt("p_span increased between gamma %.3f and %.3f", gammas[k], gammas[k + 1]);
            return false;
        }
    if (rows.back().p_span.value > rows.front().p_span.value - 0.5) {
        note = fmt("no phase decline across the gamma grid (%.2f -> %.2f)",
                   rows.front().p_span.value, rows.back().p_span.value);
        return false;
    }
    auto g = RngStream::from_seed(1011);
    auto gn = derive(g, "nodes");
    auto pat = sample(nodes, w, 2.0 * r_l, gn);
    auto gi = derive(g, "interferers");
    auto ipat = sample(inter, w, 2.0 * r_l, gi);
    auto adj_sinr = build_sinr_graph(pat, ipat, f, SinrParams{P, N, T, 0.0});
    auto adj_gilbert = build_gilbert(pat, r_l);
    if (adj_sinr != adj_gilbert) {
        note = "gamma=0 adjacency differs from the Gilbert graph";
        return false;
    }
    note = fmt("p_span %.2f -> %.2f nonincreasing over 6 gammas; gamma=0 graph equals Gilbert "
               "(%zu nodes)",
               rows.front().p_span.value, rows.back().p_span.value, pat.size());
    return true;
}

bool crit11(std::string& note) {
    std::vector<std::pair<const char*, std::function<double(double)>>> fs = {
        {"abs", [](double x) { return std::abs(x); }},
        {"square", [](double x) { return x * x; }},
        {"relu1", [](double x) { return std::max(0.0, x - 1.0); }},
        {"exp+", [](double x) { return std::exp(0.1 * x); }},
        {"exp-", [](double x) { return std::exp(-0.2 * x); }},
    };
    std::vector<std::pair<const char*, IntDistribution>> xis;
    xis.emplace_back("bernoulli", distribution_from_pmf({0.5, 0.5}));
    xis.emplace_back("dirac1", distribution_from_pmf({0.0, 1.0}));
    xis.emplace_back("uniform012", distribution_from_pmf({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}));
    xis.emplace_back("bin3", make_distribution(BinomialK{3, 1.0 / 3.0}, 10));
    xis.emplace_back("geometric", make_distribution(GeometricK{0.5}, 80));
    xis.emplace_back("poisson", make_distribution(PoissonK{1.5}, 80));
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& [fname, f] : fs)
        for (const auto& [xname, xi] : xis) {
            auto rep = second_difference_convexity(f, xi, 20);
            worst = std::min(worst, rep.min_second_difference);
            if (rep.min_second_difference < -1e-12) {
                note = fmt("%s x %s: min second difference %.3e", fname, xname,
                           rep.min_second_difference);
                return false;
            }
        }
    note = fmt("30 pairs convex at n_max=20 (min second difference %.2e)", worst);
    return true;
}

bool crit12(std::string& note) {
    std::vector<double> grid = {0.30, 0.35, 0.40, 0.45, 0.50};
    GeneratorConfig bin = square_perturbed(BinomialK{2, 0.5});
    GeneratorConfig poi = PoissonConfig{1.0, 2};
    auto sa = expected_paths_sweep(bin, grid, 3.0, 500, 1000000, 0.1, RngStream::from_seed(1212));
    auto sb = expected_paths_sweep(poi, grid, 3.0, 500, 1000000, 0.1, RngStream::from_seed(1213));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& a = sa.rows[k].expected;
        const auto& b = sb.rows[k].expected;
        bool ok = a.value <= b.value || a.lo <= b.hi;
        if (!ok) {
            note = fmt("r=%.2f: perturbed %.3g exceeds poisson %.3g beyond CI", grid[k], a.value,
                       b.value);
            return false;
        }
    }
    note = fmt("E[N_3] ordered on all 5 radii (at r=0.50: %.3g <= %.3g)",
               sa.rows.back().expected.value, sb.rows.back().expected.value);
    return true;
}

std::string cli_config(const char* name, const std::string& text) {
    std::string path = std::string("/tmp/germgrain_accept_") + name + ".ini";
    std::ofstream(path) << text;
    return path;
}

bool crit13(std::string& note) {
    const std::string gen2 =
        "[generator]\nfamily = perturbed\nlattice = hexagonal\nkernel = binomial\nn = 2\np = 0.5\n";
    struct CliCase {
        const char* name;
        std::vector<std::string> args;
    };
    std::vector<CliCase> cases;
    auto add = [&](const char* name, std::vector<std::string> args) {
        cases.push_back({name, std::move(args)});
    };
    add("generate",
        {"generate", "--config",
         cli_config("gen", "[generator]\nfamily = poisson\nintensity = 0.7\n"
                           "[run]\nwindow = 8\nseed = 21\n")});
    add("sweep-r",
        {"sweep-r", "--config",
         cli_config("sweep", gen2 + "[grid]\nr_list = 0.45 0.55\n[run]\nwindow = 6\nreps = 4\n"),
         "--seed", "22"});
    add("percolate",
        {"percolate", "--config",
         cli_config("perc", gen2 + "[percolate]\nr = 0.5\n[run]\nwindow = 6\n"), "--seed", "23"});
    add("estimate-rc",
        {"estimate-rc", "--config",
         cli_config("rc", "[generator]\nfamily = poisson\nintensity = 1.154701\n"
                          "[rc]\nr_lo = 0.3\nr_hi = 0.9\ntol = 0.1\n[run]\nwindow = 8\nreps = 12\n"),
         "--seed", "24"});
    add("kperc",
        {"kperc", "--config",
         cli_config("kperc", "[generator]\nfamily = poisson\nintensity = 4\n"
                             "[grid]\nr_list = 0.5\n[kperc]\nk = 1\n[run]\nwindow = 5\nreps = 6\n"),
         "--seed", "25"});
    add("rbar",
        {"rbar", "--config",
         cli_config("rbar", "[generator]\nfamily = poisson\nintensity = 1.2\n"
                            "[grid]\nr_list = 0.3\n[rbar]\nscale = 1\nmax_len = 8\n"
                            "[run]\nreps = 20\n"),
         "--seed", "26"});
    add("rpaths",
        {"rpaths", "--config",
         cli_config("paths", "[generator]\nfamily = poisson\nintensity = 1.2\n"
                             "[grid]\nr_list = 0.35\n[rpaths]\nm = 2\ncap = 50000\n"
                             "[run]\nreps = 8\n"),
         "--seed", "27"});
    add("sinr-sweep",
        {"sinr-sweep", "--config",
         cli_config("sinr", "[nodes]\nfamily = poisson\nintensity = 1.2\n"
                            "[sinr]\nN = 0.03014081790123457\n[grid]\ngamma_list = 0 0.05\n"
                            "[run]\nwindow = 5\nreps = 6\n"),
         "--seed", "28"});
    add("cx-check",
        {"cx-check", "--config",
         cli_config("cx", "[dist_a]\nkernel = binomial\nn = 4\np = 0.5\n"
                          "[dist_b]\nkernel = poisson\nmean = 2\n")});
    add("counts-dcx",
        {"counts-dcx", "--config",
         cli_config("dcx", "[table]\nrow1 = 0.4 0.3\n[dcx]\nmodel_a = det\nmodel_b = poi\n"
                           "s_list = 0.5\n[run]\nreps = 400\n"),
         "--seed", "29"});
    add("stats",
        {"stats", "--config",
         cli_config("stats", gen2 + "[stats]\nmode = void\nbox = 1 1 2 2\n"
                                    "[run]\nwindow = 5\nreps = 40\n"),
         "--seed", "30"});
    add("bounds",
        {"bounds", "--config", cli_config("bounds", "[bounds]\nlambda = 1.154701\nd = 2\nk = 2\n")});
    auto p_fig = cli_config("fig", "[grid]\nr_list = 0.5 0.6\n[run]\nwindow = 5\nreps = 2\n");
    add("figure2", {"figure2", "--config", p_fig, "--seed", "31"});
    add("figure4", {"figure4", "--config", p_fig, "--seed", "32"});

    for (const auto& c : cases) {
        auto once = [&](std::string& out, std::string& err) {
            std::ostringstream o, e;
            int code = cli::run(c.args, o, e);
            out = o.str();
            err = e.str();
            return code;
        };
        std::string out1, err1, out2, err2;
        int code1 = once(out1, err1);
        int code2 = once(out2, err2);
        if (code1 != 0 || code2 != 0 || !err1.empty() || !err2.empty()) {
            note = fmt("%s exited %d/%d (%s)", c.name, code1, code2,
                       err1.empty() ? err2.c_str() : err1.c_str());
            return false;
        }
        if (out1.empty() || out1 != out2) {
            note = fmt("%s output differs between identical runs", c.name);
            return false;
        }
    }
    note = fmt("%zu subcommands byte-identical across reruns", cases.size());
    return true;
}

struct Criterion {
    int id;
    const char* title;
    bool (*fn)(std::string&);
};

const Criterion criteria[] = {
    {1, "deterministic lattice threshold", crit1},
    {2, "poisson critical radius", crit2},
    {3, "figure ordering at desk scale", crit3},
    {4, "analytic bracket", crit4},
    {5, "exact cx chains", crit5},
    {6, "poisson equivalence of poi-replicated lattice", crit6},
    {7, "weak-order faces", crit7},
    {8, "count-vector ordering", crit8},
    {9, "annular cox comparative", crit9},
    {10, "sinr phase behavior", crit10},
    {11, "second-difference convexity", crit11},
    {12, "path-count moment inequality", crit12},
    {13, "subcommand determinism", crit13},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1 && std::strcmp(argv[1], "all") != 0) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 13) {
            std::fprintf(stderr, "usage: acceptance [1..13|all]\n");
            return 2;
        }
    }
    bool all_ok = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        std::string note;
        bool ok = false;
        try {
            ok = c.fn(note);
        } catch (const std::exception& e) {
            note = fmt("exception: %s", e.what());
        }
        std::printf("[%s] criterion %d: %s | %s\n", ok ? "PASS" : "FAIL", c.id, c.title,
                    note.c_str());
        std::fflush(stdout);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
