#pragma once

// Command line front end. run() is in-process: it takes argv-style strings
// plus output streams and returns an exit code, so tests can drive every
// subcommand without spawning. tools/main.cpp is a two-line wrapper.
//
// Conventions shared by all subcommands:
//   - flags: --config FILE --seed N --reps N --window W --out FILE --threads N
//     (--lambda X and --d N are bounds-only shortcuts); --flag=value works too
//   - flags override the config keys run.seed, run.reps, run.window, run.out,
//     run.threads, bounds.lambda, bounds.d before anything is hashed
//   - every CSV row carries seed and config_hash; the hash covers the
//     subcommand and all keys except run.out and run.threads
//   - doubles are printed with 17 significant digits; rows are ordered by
//     grid value, so reruns are byte-identical
//   - unknown config keys, and known ones a subcommand does not use, are
//     rejected with their full name

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "config.hpp"
#include "discrete.hpp"
#include "io.hpp"
#include "shotnoise.hpp"
#include "stats.hpp"

namespace germgrain::cli {

namespace detail {

using germgrain::detail::trim;

inline ReplicationKernel parse_kernel(const Config& cfg, const std::string& sec) {
    const std::string kind = cfg.get_str(sec + ".kernel");
    if (kind == "dirac") return Dirac{cfg.get_int(sec + ".n", 1)};
    if (kind == "binomial") return BinomialK{cfg.get_int(sec + ".n"), cfg.get_num(sec + ".p")};
    if (kind == "poisson") return PoissonK{cfg.get_num(sec + ".mean")};
    if (kind == "nbinomial") return NegBinomialK{cfg.get_num(sec + ".r"), cfg.get_num(sec + ".p")};
    if (kind == "geometric") return GeometricK{cfg.get_num(sec + ".p")};
    if (kind == "hypergeometric")
        return HyperGeometricK{cfg.get_int(sec + ".n"), cfg.get_int(sec + ".m"), cfg.get_int(sec + ".k")};
    if (kind == "geomixture")
        return GeoMixtureK{cfg.get_list(sec + ".weights"), cfg.get_list(sec + ".ps")};
    throw ConfigError("config key '" + sec + ".kernel': unknown kernel '" + kind + "'");
}

inline LatticeSpec parse_lattice(const Config& cfg, const std::string& sec) {
    const std::string kind = cfg.get_str(sec + ".lattice", "hexagonal");
    LatticeSpec spec;
    if (kind == "square") spec.type = LatticeType::square;
    else if (kind == "hexagonal") spec.type = LatticeType::hexagonal;
    else throw ConfigError("config key '" + sec + ".lattice': unknown lattice '" + kind + "'");
    spec.spacing = cfg.get_num(sec + ".spacing", 1.0);
    spec.dim = static_cast<int>(cfg.get_int(sec + ".dim", 2));
    return spec;
}

inline TranslationKernel parse_offset(const Config& cfg, const std::string& sec,
                                      const LatticeSpec& lattice) {
    const std::string kind = cfg.get_str(sec + ".offset", "cell");
    if (kind == "cell") return UniformCell{lattice};
    if (kind == "ball") return UniformBall{cfg.get_num(sec + ".offset_radius"), lattice.dim};
    if (kind == "annulus")
        return UniformAnnulus{cfg.get_num(sec + ".offset_inner", 0.0),
                              cfg.get_num(sec + ".offset_outer"), lattice.dim};
    throw ConfigError("config key '" + sec + ".offset': unknown offset '" + kind + "'");
}

inline GeneratorConfig parse_generator(const Config& cfg, const std::string& sec) {
    const std::string family = cfg.get_str(sec + ".family");
    if (family == "poisson")
        return PoissonConfig{cfg.get_num(sec + ".intensity"),
                             static_cast<int>(cfg.get_int(sec + ".dim", 2))};
    if (family == "lattice") return LatticeConfig{parse_lattice(cfg, sec)};
    if (family == "perturbed") {
        LatticeSpec spec = parse_lattice(cfg, sec);
        return PerturbedLatticeConfig{spec, parse_kernel(cfg, sec), parse_offset(cfg, sec, spec)};
    }
    if (family == "annular")
        return AnnularConfig{cfg.get_num(sec + ".alpha"), cfg.get_num(sec + ".mu"),
                             cfg.get_num(sec + ".R"), cfg.get_num(sec + ".delta")};
    throw ConfigError("config key '" + sec + ".family': unknown family '" + family + "'");
}

inline Window parse_window(const Config& cfg, int dim) {
    const double w = cfg.get_num("run.window");
    if (!(w > 0.0)) throw ConfigError("config key 'run.window': must be positive");
    return Window::cube(0.0, w, dim);
}

/// Ascending grid from either <sec>.<name>_list or _min/_max/_step keys.
inline std::vector<double> parse_grid(const Config& cfg, const std::string& sec,
                                      const std::string& name) {
    const std::string base = sec + "." + name;
    if (cfg.has(base + "_list")) return cfg.get_list(base + "_list");
    const double lo = cfg.get_num(base + "_min");
    const double hi = cfg.get_num(base + "_max");
    const double step = cfg.get_num(base + "_step");
    if (!(step > 0.0) || !(hi >= lo))
        throw ConfigError("config key '" + base + "_step': need a positive step and max >= min");
    std::vector<double> grid;
    for (std::int64_t i = 0;; ++i) {
        double v = lo + static_cast<double>(i) * step;
        if (v > hi + 0.5 * step) break;
        grid.push_back(v);
    }
    return grid;
}

inline std::string kernel_brief(const ReplicationKernel& k) {
    auto num = [](double v) { return format_double(v); };
    return std::visit(overloaded{
        [&](const Dirac& d) { return "dirac;n=" + std::to_string(d.n); },
        [&](const BinomialK& b) { return "binomial;n=" + std::to_string(b.n) + ";p=" + num(b.p); },
        [&](const PoissonK& p) { return "poisson;mean=" + num(p.mean); },
        [&](const NegBinomialK& nb) { return "nbinomial;r=" + num(nb.r) + ";p=" + num(nb.p); },
        [&](const GeometricK& g) { return "geometric;p=" + num(g.p); },
        [&](const HyperGeometricK& h) {
            return "hypergeometric;n=" + std::to_string(h.n) + ";m=" + std::to_string(h.m) +
                   ";k=" + std::to_string(h.k);
        },
        [&](const GeoMixtureK& g) {
            std::string s = "geomixture;weights=";
            for (std::size_t i = 0; i < g.weights.size(); ++i) s += (i ? " " : "") + num(g.weights[i]);
            s += ";ps=";
            for (std::size_t i = 0; i < g.probs.size(); ++i) s += (i ? " " : "") + num(g.probs[i]);
            return s;
        }}, k);
}

inline std::string generator_brief(const GeneratorConfig& c) {
    auto num = [](double v) { return format_double(v); };
    return std::visit(overloaded{
        [&](const PoissonConfig& p) {
            return "poisson;intensity=" + num(p.intensity) + ";dim=" + std::to_string(p.dim);
        },
        [&](const LatticeConfig& l) {
            return std::string("lattice;") +
                   (l.spec.type == LatticeType::hexagonal ? "hexagonal" : "square") +
                   ";spacing=" + num(l.spec.spacing);
        },
        [&](const PerturbedLatticeConfig& pl) {
            return std::string("perturbed;") +
                   (pl.lattice.type == LatticeType::hexagonal ? "hexagonal" : "square") +
                   ";spacing=" + num(pl.lattice.spacing) + ";" + kernel_brief(pl.replication);
        },
        [&](const AnnularConfig& a) {
            return "annular;alpha=" + num(a.alpha) + ";mu=" + num(a.mu) + ";R=" + num(a.R) +
                   ";delta=" + num(a.delta);
        }}, c);
}

struct Row {
    std::vector<std::string> cells;
    Row& d(double v) { cells.push_back(format_double(v)); return *this; }
    Row& i(std::int64_t v) { cells.push_back(std::to_string(v)); return *this; }
    Row& s(std::string v) { cells.push_back(std::move(v)); return *this; }
};

inline void emit(std::ostream& os, const Row& row) {
    for (std::size_t i = 0; i < row.cells.size(); ++i) os << (i ? "," : "") << row.cells[i];
    os << '\n';
}

struct Ctx {
    const Config& cfg;
    std::uint64_t seed;
    std::string hash;
    std::ostream& sink;  // CSV artifact (file under --out, else the stdout stream)
    std::ostream& out;   // always the stdout stream
};

inline Row stamp(Ctx& c, Row row) {
    row.cells.push_back(std::to_string(c.seed));
    row.cells.push_back(c.hash);
    return row;
}

// --- subcommands -----------------------------------------------------------

inline void cmd_generate(Ctx& c) {
    GeneratorConfig gen = parse_generator(c.cfg, "generator");
    Window w = parse_window(c.cfg, config_dim(gen));
    const double margin = c.cfg.get_num("generate.margin", 0.0);
    auto root = RngStream::from_seed(c.seed);
    auto g = derive(root, "generate");
    PointPattern pat = sample(gen, w, margin, g);
    c.sink << "# seed " << c.seed << '\n';
    c.sink << "# config_hash " << c.hash << '\n';
    write_pattern_csv(c.sink, pat);
}

inline void cmd_percolate(Ctx& c) {
    GeneratorConfig gen = parse_generator(c.cfg, "generator");
    Window w = parse_window(c.cfg, config_dim(gen));
    const double r = c.cfg.get_num("percolate.r");
    const double margin = c.cfg.get_num("percolate.margin", 2.0 * r);
    auto root = RngStream::from_seed(c.seed);
    auto g = derive(root, "percolate");
    PointPattern pat = sample(gen, w, margin, g);
    ComponentStats st = components(pat, r);
    emit(c.sink, Row{}.s("r").s("n_points").s("n_components").s("frac_largest")
                      .s("frac_second").s("spans").s("seed").s("config_hash"));
    emit(c.sink, stamp(c, Row{}.d(r).i(static_cast<std::int64_t>(pat.size()))
                               .i(static_cast<std::int64_t>(st.sizes.size()))
                               .d(st.fraction_largest).d(st.fraction_second)
                               .i(spans_any(st) ? 1 : 0)));
}

inline void sweep_header(Ctx& c, bool family_cols) {
    Row h;
    if (family_cols) h.s("family").s("n");
    h.s("r").s("mean_frac1").s("mean_frac2").s("p_span").s("ci_lo").s("ci_hi")
     .s("reps").s("seed").s("config_hash");
    emit(c.sink, h);
}

inline void sweep_rows(Ctx& c, const std::vector<SweepRow>& rows,
                       const std::string& family, const std::string& n) {
    for (const auto& row : rows) {
        Row r;
        if (!family.empty()) r.s(family).s(n);
        r.d(row.r).d(row.mean_frac1).d(row.mean_frac2)
         .d(row.p_span.value).d(row.p_span.lo).d(row.p_span.hi).i(row.reps);
        emit(c.sink, stamp(c, std::move(r)));
    }
}

inline void cmd_sweep_r(Ctx& c) {
    GeneratorConfig gen = parse_generator(c.cfg, "generator");
    Window w = parse_window(c.cfg, config_dim(gen));
    auto grid = parse_grid(c.cfg, "grid", "r");
    const int reps = static_cast<int>(c.cfg.get_int("run.reps", 100));
    auto rows = sweep_r(gen, w, grid, reps, RngStream::from_seed(c.seed));
    sweep_header(c, false);
    sweep_rows(c, rows, "", "");
}

inline void cmd_estimate_rc(Ctx& c) {
    GeneratorConfig gen = parse_generator(c.cfg, "generator");
    Window w = parse_window(c.cfg, config_dim(gen));
    const double r_lo = c.cfg.get_num("rc.r_lo");
    const double r_hi = c.cfg.get_num("rc.r_hi");
    const double tol = c.cfg.get_num("rc.tol", 0.01);
    const int reps = static_cast<int>(c.cfg.get_int("run.reps", 200));
    double rc = estimate_rc(gen, w, r_lo, r_hi, reps, tol, RngStream::from_seed(c.seed));
    emit(c.sink, Row{}.s("rc_hat").s("r_lo").s("r_hi").s("tol").s("reps").s("seed").s("config_hash"));
    emit(c.sink, stamp(c, Row{}.d(rc).d(r_lo).d(r_hi).d(tol).i(reps)));
}

inline void discrete_header(Ctx& c) {
    emit(c.sink, Row{}.s("r").s("value").s("ci_lo").s("ci_hi").s("truncated_rate")
                      .s("n").s("max_len").s("m").s("reps").s("seed").s("config_hash"));
}

inline void cmd_kperc(Ctx& c) {
    GeneratorConfig gen = parse_generator(c.cfg, "generator");
    Window w = parse_window(c.cfg, config_dim(gen));
    auto grid = parse_grid(c.cfg, "grid", "r");
    const int k = static_cast<int>(c.cfg.get_int("kperc.k", 1));
    const std::string mode_s = c.cfg.get_str("kperc.mode", "lattice");
    KCoverageMode mode;
    if (mode_s == "lattice") mode = KCoverageMode::lattice;
    else if (mode_s == "fine") mode = KCoverageMode::fine_grid;
    else throw ConfigError("config key 'kperc.mode': expected lattice or fine, got '" + mode_s + "'");
    const double resolution = c.cfg.get_num("kperc.resolution", 0.0);
    const int reps = static_cast<int>(c.cfg.get_int("run.reps", 100));
    if (reps <= 0 || grid.empty()) throw ConfigError("kperc: need reps > 0 and a nonempty grid");
    auto root = RngStream::from_seed(c.seed);
    std::vector<std::int64_t> hits(grid.size(), 0);
    for (int rep = 0; rep < reps; ++rep) {
        auto g = derive(root, "kperc-rep", static_cast<std::uint64_t>(rep));
        PointPattern pat = sample(gen, w, grid.back(), g);
        for (std::size_t j = 0; j < grid.size(); ++j)
            if (k_coverage_percolates(pat, grid[j], k, mode, resolution)) ++hits[j];
    }
    discrete_header(c);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        Estimate e = wilson(hits[j], reps);
        emit(c.sink, stamp(c, Row{}.d(grid[j]).d(e.value).d(e.lo).d(e.hi)
                                   .d(0.0).i(0).i(0).i(k).i(reps)));
    }
}

inline void cmd_rbar(Ctx& c) {
    GeneratorConfig gen = parse_generator(c.cfg, "generator");
    auto grid = parse_grid(c.cfg, "grid", "r");
    const double scale = c.cfg.get_num("rbar.scale");
    const int max_len = static_cast<int>(c.cfg.get_int("rbar.max_len", 12));
    const int reps = static_cast<int>(c.cfg.get_int("run.reps", 200));
    auto scan = rbar_upper_scan(gen, grid, scale, max_len, reps, RngStream::from_seed(c.seed));
    discrete_header(c);
    for (const auto& rep : scan.rows) {
        std::int64_t contours = 0;
        for (const auto& row : rep.by_length) contours += row.count;
        emit(c.sink, stamp(c, Row{}.d(rep.r).d(rep.truncated_sum).d(rep.truncated_sum)
                                   .d(rep.truncated_sum).d(rep.tail_bound).i(contours)
                                   .i(rep.max_len).i(rep.summable ? 1 : 0).i(rep.reps)));
    }
}

inline void cmd_rpaths(Ctx& c) {
    GeneratorConfig gen = parse_generator(c.cfg, "generator");
    auto grid = parse_grid(c.cfg, "grid", "r");
    const double m = c.cfg.get_num("rpaths.m", 3.0);
    const std::int64_t cap = c.cfg.get_int("rpaths.cap", 1000000);
    const double threshold = c.cfg.get_num("rpaths.threshold", 0.1);
    const int reps = static_cast<int>(c.cfg.get_int("run.reps", 200));
    auto sweep = expected_paths_sweep(gen, grid, m, reps, cap, threshold, RngStream::from_seed(c.seed));
    discrete_header(c);
    for (const auto& row : sweep.rows)
        emit(c.sink, stamp(c, Row{}.d(row.r).d(row.expected.value).d(row.expected.lo)
                                   .d(row.expected.hi).d(row.truncated_rate)
                                   .i(0).i(0).d(m).i(reps)));
}

inline ResponseFunction parse_response(const Config& cfg) {
    const std::string kind = cfg.get_str("response.kind", "powerlaw");
    if (kind == "cube") return IndicatorCube{cfg.get_num("response.r")};
    if (kind == "powerlaw") return PowerLaw{cfg.get_num("response.beta", 4.0)};
    if (kind == "tpl")
        return TruncatedPowerLaw{cfg.get_num("response.beta", 4.0), cfg.get_num("response.t_max")};
    throw ConfigError("config key 'response.kind': unknown response '" + kind + "'");
}

inline void cmd_sinr_sweep(Ctx& c) {
    GeneratorConfig nodes = parse_generator(c.cfg, "nodes");
    GeneratorConfig inter = nodes;
    double inter_on = 0.0;
    if (c.cfg.has_section("interferers")) {
        inter = parse_generator(c.cfg, "interferers");
        inter_on = mean_intensity(inter);
    }
    Window w = parse_window(c.cfg, config_dim(nodes));
    ResponseFunction f = parse_response(c.cfg);
    const double P = c.cfg.get_num("sinr.P", 1.0);
    const double N = c.cfg.get_num("sinr.N");
    const double T = c.cfg.get_num("sinr.T", 1.0);
    auto grid = parse_grid(c.cfg, "grid", "gamma");
    const int reps = static_cast<int>(c.cfg.get_int("run.reps", 100));
    auto rows = sinr_sweep(nodes, inter, inter_on, w, f, P, N, T, grid, reps,
                           RngStream::from_seed(c.seed));
    emit(c.sink, Row{}.s("gamma").s("p_span").s("ci_lo").s("ci_hi").s("reps").s("seed").s("config_hash"));
    for (const auto& row : rows)
        emit(c.sink, stamp(c, Row{}.d(row.gamma).d(row.p_span.value).d(row.p_span.lo)
                                   .d(row.p_span.hi).i(reps)));
}

inline void cmd_bounds(Ctx& c) {
    const double lambda = c.cfg.get_num("bounds.lambda");
    const int d = static_cast<int>(c.cfg.get_int("bounds.d", 2));
    const int k = static_cast<int>(c.cfg.get_int("bounds.k", 1));
    const double lower = rc_lower(lambda, d);
    const double upper = rc_upper_tilde(lambda, d);
    const double cl = c_lambda(lambda, d);
    const double clk = c_lambda_k(lambda, k, d);
    char line[128];
    std::snprintf(line, sizeof line, "bounds for lambda=%.6g, d=%d\n", lambda, d);
    c.out << line;
    auto text = [&](const char* name, double v) {
        std::snprintf(line, sizeof line, "  %-16s %.6g\n", name, v);
        c.out << line;
    };
    text("rc_lower", lower);
    text("rc_upper_tilde", upper);
    text("c_lambda", cl);
    std::string kn = "c_lambda_k(k=" + std::to_string(k) + ")";
    text(kn.c_str(), clk);
    emit(c.sink, Row{}.s("quantity").s("value").s("lambda").s("d").s("k").s("seed").s("config_hash"));
    auto row = [&](const std::string& q, double v) {
        emit(c.sink, stamp(c, Row{}.s(q).d(v).d(lambda).i(d).i(k)));
    };
    row("rc_lower", lower);
    row("rc_upper_tilde", upper);
    row("c_lambda", cl);
    row("c_lambda_k", clk);
}

inline void stats_header(Ctx& c) {
    emit(c.sink, Row{}.s("statistic").s("config_a").s("config_b").s("value_a").s("value_b")
                      .s("ci").s("flag").s("seed").s("config_hash"));
}

inline void cmd_cx_check(Ctx& c) {
    ReplicationKernel ka = parse_kernel(c.cfg, "dist_a");
    ReplicationKernel kb = parse_kernel(c.cfg, "dist_b");
    const std::int64_t cap = c.cfg.get_int("cx.cap", 200);
    const double tol = c.cfg.get_num("cx.tol", 1e-12);
    IntDistribution da = make_distribution(ka, cap);
    IntDistribution db = make_distribution(kb, cap);
    CxResult res = cx_order_check(da, db, tol);
    std::string verdict;
    switch (res.verdict) {
        case CxVerdict::equal: verdict = "equal"; break;
        case CxVerdict::a_le_b: verdict = "a_le_b"; break;
        case CxVerdict::b_le_a: verdict = "b_le_a"; break;
        case CxVerdict::incomparable: verdict = "incomparable"; break;
    }
    stats_header(c);
    emit(c.sink, stamp(c, Row{}.s("cx_order").s(kernel_brief(ka)).s(kernel_brief(kb))
                               .d(da.mean).d(db.mean).d(tol).s(verdict)));
}

inline void cmd_counts_dcx(Ctx& c) {
    EigenTable table;
    for (int j = 1; c.cfg.has("table.row" + std::to_string(j)); ++j)
        table.rates.push_back(c.cfg.get_list("table.row" + std::to_string(j)));
    if (table.rates.empty()) throw ConfigError("counts-dcx: need table.row1, table.row2, ...");
    const std::string model_a = c.cfg.get_str("dcx.model_a");
    const std::string model_b = c.cfg.get_str("dcx.model_b");
    const std::int64_t reps = c.cfg.get_int("run.reps", 10000);
    const std::string battery_kind = c.cfg.get_str("dcx.battery", "exp_plus");
    std::vector<double> s_list{0.2, 0.5, 1.0};
    if (c.cfg.has("dcx.s_list")) s_list = c.cfg.get_list("dcx.s_list");

    const std::size_t S = table.sets();
    std::vector<TestFunction> battery;
    std::vector<std::string> labels;
    if (battery_kind == "product") {
        battery.push_back(ProductCounts{});
        labels.push_back("product");
    } else if (battery_kind == "exp_plus" || battery_kind == "exp_minus") {
        if (S > 4) throw ConfigError("counts-dcx: exp batteries support at most 4 columns");
        std::vector<std::size_t> idx(S, 0);
        for (;;) {
            std::vector<double> s(S);
            std::string label = battery_kind + "(";
            for (std::size_t i = 0; i < S; ++i) {
                s[i] = s_list[idx[i]];
                label += (i ? "," : "") + format_double(s[i]);
            }
            label += ")";
            if (battery_kind == "exp_plus") battery.push_back(ExpPlus{s});
            else battery.push_back(ExpMinus{s});
            labels.push_back(label);
            std::size_t pos = 0;
            while (pos < S && ++idx[pos] == s_list.size()) idx[pos++] = 0;
            if (pos == S) break;
        }
    } else {
        throw ConfigError("config key 'dcx.battery': expected exp_plus, exp_minus or product");
    }

    auto model_of = [](const std::string& key, const std::string& s) {
        try {
            return parse_count_model(s);
        } catch (const std::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    };
    auto root = RngStream::from_seed(c.seed);
    auto ga = derive(root, "counts-a");
    auto gb = derive(root, "counts-b");
    auto sa = sample_count_vectors(model_of("dcx.model_a", model_a), table, reps, ga);
    auto sb = sample_count_vectors(model_of("dcx.model_b", model_b), table, reps, gb);
    DcxReport rep = dcx_counts_check(sa, sb, battery);
    stats_header(c);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& row = rep.rows[i];
        emit(c.sink, stamp(c, Row{}.s(labels[i]).s(model_a).s(model_b)
                                   .d(row.mean_a).d(row.mean_b)
                                   .d(1.959963984540054 * row.sigma_diff)
                                   .s(row.consistent ? "consistent" : "inconsistent")));
    }
    emit(c.sink, stamp(c, Row{}.s("overall").s(model_a).s(model_b).d(0.0).d(0.0).d(0.0)
                               .s(rep.consistent ? "consistent" : "inconsistent")));
}

inline void cmd_stats(Ctx& c) {
    const std::string mode = c.cfg.get_str("stats.mode");
    GeneratorConfig gen = parse_generator(c.cfg, "generator");
    Window w = parse_window(c.cfg, config_dim(gen));
    auto root = RngStream::from_seed(c.seed);
    const std::string brief = generator_brief(gen);
    stats_header(c);
    if (mode == "ripley") {
        auto grid = parse_grid(c.cfg, "grid", "r");
        const int reps = static_cast<int>(c.cfg.get_int("run.reps", 50));
        if (reps < 2) throw ConfigError("stats: ripley needs run.reps >= 2");
        const bool normalize = c.cfg.get_int("stats.normalize", 0) != 0;
        const std::string corr_s = c.cfg.get_str("stats.correction", "border");
        EdgeCorrection corr;
        if (corr_s == "border") corr = EdgeCorrection::border;
        else if (corr_s == "none") corr = EdgeCorrection::none;
        else throw ConfigError("config key 'stats.correction': expected border or none");
        std::optional<double> intensity;
        if (c.cfg.has("stats.intensity")) intensity = c.cfg.get_num("stats.intensity");
        const double lam = intensity ? *intensity : mean_intensity(gen);
        std::vector<double> sum(grid.size(), 0.0), sum2(grid.size(), 0.0);
        for (int rep = 0; rep < reps; ++rep) {
            auto g = derive(root, "stats-rep", static_cast<std::uint64_t>(rep));
            PointPattern pat = sample(gen, w, grid.back(), g);
            auto rows = ripley_k(pat, grid, intensity, corr, normalize);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                sum[j] += rows[j].value;
                sum2[j] += sq(rows[j].value);
            }
        }
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double mean = sum[j] / reps;
            const double var = std::max(0.0, sum2[j] / reps - sq(mean));
            const double half = 1.959963984540054 * std::sqrt(var / reps);
            double ref = std::numbers::pi * sq(grid[j]);
            if (!normalize) ref *= lam;
            std::string flag = mean - half > ref ? "above" : (mean + half < ref ? "below" : "within_ci");
            emit(c.sink, stamp(c, Row{}.s("ripley_k@" + format_double(grid[j])).s(brief)
                                       .s("poisson_ref").d(mean).d(ref).d(half).s(flag)));
        }
    } else if (mode == "void") {
        auto box_v = c.cfg.get_list("stats.box");
        const int d = config_dim(gen);
        if (box_v.size() != static_cast<std::size_t>(2 * d))
            throw ConfigError("config key 'stats.box': expected lo and hi per axis");
        Window box(Point(box_v.begin(), box_v.begin() + d), Point(box_v.begin() + d, box_v.end()));
        const int reps = static_cast<int>(c.cfg.get_int("run.reps", 500));
        Estimate est = void_probability(gen, w, box, reps, root);
        const double ref = std::exp(-mean_intensity(gen) * box.volume());
        std::string flag = est.lo > ref ? "above" : (est.hi < ref ? "below" : "within_ci");
        emit(c.sink, stamp(c, Row{}.s("void_prob").s(brief).s("poisson_ref")
                                   .d(est.value).d(ref).d(0.5 * (est.hi - est.lo)).s(flag)));
    } else if (mode == "moments") {
        const int d = config_dim(gen);
        std::vector<Window> boxes;
        double ref = 1.0;
        for (int j = 1; c.cfg.has("stats.box" + std::to_string(j)); ++j) {
            auto v = c.cfg.get_list("stats.box" + std::to_string(j));
            if (v.size() != static_cast<std::size_t>(2 * d))
                throw ConfigError("config key 'stats.box" + std::to_string(j) +
                                  "': expected lo and hi per axis");
            boxes.emplace_back(Point(v.begin(), v.begin() + d), Point(v.begin() + d, v.end()));
            ref *= mean_intensity(gen) * boxes.back().volume();
        }
        if (boxes.empty()) throw ConfigError("stats: moments needs stats.box1, stats.box2, ...");
        const int reps = static_cast<int>(c.cfg.get_int("run.reps", 500));
        Estimate est = factorial_moment(gen, w, boxes, reps, root);
        std::string flag = est.lo > ref ? "above" : (est.hi < ref ? "below" : "within_ci");
        emit(c.sink, stamp(c, Row{}.s("factorial_moment").s(brief).s("poisson_ref")
                                   .d(est.value).d(ref).d(0.5 * (est.hi - est.lo)).s(flag)));
    } else {
        throw ConfigError("config key 'stats.mode': expected ripley, void or moments");
    }
}

inline void figure_preset(Ctx& c, bool fig4) {
    const double wside = c.cfg.get_num("run.window", 50.0);
    if (!(wside > 0.0)) throw ConfigError("config key 'run.window': must be positive");
    Window w = Window::cube(0.0, wside, 2);
    const int reps = static_cast<int>(c.cfg.get_int("run.reps", 300));
    std::vector<double> grid;
    if (c.cfg.has("grid.r_list") || c.cfg.has("grid.r_min")) grid = parse_grid(c.cfg, "grid", "r");
    else for (int i = 0; i <= 40; ++i) grid.push_back(0.5 + 0.005 * i);
    const LatticeSpec hex{LatticeType::hexagonal, 1.0, 2};
    struct Member { std::string family, n; ReplicationKernel kernel; };
    std::vector<Member> members;
    if (!fig4) {
        for (std::int64_t n : {1, 2, 3, 5, 10, 20})
            members.push_back({"binomial", std::to_string(n),
                               BinomialK{n, 1.0 / static_cast<double>(n)}});
    } else {
        for (std::int64_t n : {1, 2, 3, 5, 10}) {
            double nd = static_cast<double>(n);
            members.push_back({"nbinomial", std::to_string(n), NegBinomialK{nd, 1.0 / (1.0 + nd)}});
        }
    }
    members.push_back({"poisson", "inf", PoissonK{1.0}});
    auto root = RngStream::from_seed(c.seed);
    sweep_header(c, true);
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
        GeneratorConfig gen = PerturbedLatticeConfig{hex, members[mi].kernel, UniformCell{hex}};
        auto mroot = derive(root, "figure", static_cast<std::uint64_t>(mi));
        auto rows = sweep_r(gen, w, grid, reps, mroot);
        sweep_rows(c, rows, members[mi].family, members[mi].n);
    }
}

inline void cmd_figure2(Ctx& c) { figure_preset(c, false); }
inline void cmd_figure4(Ctx& c) { figure_preset(c, true); }

inline const char* usage_text() {
    return
        "usage: germgrain <subcommand> [--config FILE] [--seed N] [--reps N]\n"
        "                 [--window W] [--out FILE] [--threads N]\n"
        "subcommands:\n"
        "  generate      draw one pattern and write it as CSV\n"
        "  percolate     one-shot component statistics at a fixed radius\n"
        "  sweep-r       spanning probability and cluster fractions over an r grid\n"
        "  estimate-rc   bisect the radius where spanning probability crosses 1/2\n"
        "  kperc         k-coverage percolation frequency over an r grid\n"
        "  rbar          certified void-contour upper-bound scan\n"
        "  rpaths        expected open-path counts over an r grid\n"
        "  sinr-sweep    SINR graph spanning probability over a gamma grid\n"
        "  bounds        analytic radius bounds (also: --lambda X --d N)\n"
        "  cx-check      exact convex-order verdict for two integer kernels\n"
        "  counts-dcx    sampled lower-orthant comparison of count-vector models\n"
        "  stats         ripley | void | moments summaries vs the Poisson reference\n"
        "  figure2       binomial-family radius sweep preset (hex lattice)\n"
        "  figure4       negative-binomial-family radius sweep preset\n"
        "config format: INI-style sections of key = value lines; every CSV row\n"
        "embeds the run seed and a hash of the effective config.\n";
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Returns the process exit
/// code; artifacts go to --out (or `out` when no path is set), diagnostics
/// to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using namespace detail;
    std::string sub;
    std::map<std::string, std::string> flags;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string a = args[i];
        if (a == "--help" || a == "-h" || a == "help") {
            out << usage_text();
            return 0;
        }
        if (a.rfind("--", 0) == 0) {
            std::string key = a.substr(2), value;
            auto eq = key.find('=');
            if (eq != std::string::npos) {
                value = key.substr(eq + 1);
                key = key.substr(0, eq);
            } else {
                if (i + 1 >= args.size()) {
                    err << "error: flag --" << key << " needs a value\n";
                    return 2;
                }
                value = args[++i];
            }
            static const std::set<std::string> known{"config", "seed", "reps", "window",
                                                     "out", "threads", "lambda", "d"};
            if (!known.count(key)) {
                err << "error: unknown flag --" << key << "\n";
                return 2;
            }
            if (flags.count(key)) {
                err << "error: flag --" << key << " given twice\n";
                return 2;
            }
            flags[key] = value;
        } else if (sub.empty()) {
            sub = a;
        } else {
            err << "error: unexpected argument '" << a << "'\n";
            return 2;
        }
    }
    if (sub.empty()) {
        err << usage_text();
        return 2;
    }

    using Handler = void (*)(Ctx&);
    static const std::map<std::string, Handler> handlers{
        {"generate", cmd_generate},   {"percolate", cmd_percolate},
        {"sweep-r", cmd_sweep_r},     {"estimate-rc", cmd_estimate_rc},
        {"kperc", cmd_kperc},         {"rbar", cmd_rbar},
        {"rpaths", cmd_rpaths},       {"sinr-sweep", cmd_sinr_sweep},
        {"bounds", cmd_bounds},       {"cx-check", cmd_cx_check},
        {"counts-dcx", cmd_counts_dcx}, {"stats", cmd_stats},
        {"figure2", cmd_figure2},     {"figure4", cmd_figure4}};
    auto it = handlers.find(sub);
    if (it == handlers.end()) {
        err << "error: unknown subcommand '" << sub << "'\n" << usage_text();
        return 2;
    }
    if ((flags.count("lambda") || flags.count("d")) && sub != "bounds") {
        err << "error: --lambda and --d only apply to 'bounds'\n";
        return 2;
    }

    try {
        Config cfg;
        if (flags.count("config")) cfg = Config::load(flags["config"]);
        if (flags.count("seed")) cfg.set("run.seed", flags["seed"]);
        if (flags.count("reps")) cfg.set("run.reps", flags["reps"]);
        if (flags.count("window")) cfg.set("run.window", flags["window"]);
        if (flags.count("out")) cfg.set("run.out", flags["out"]);
        if (flags.count("threads")) cfg.set("run.threads", flags["threads"]);
        if (flags.count("lambda")) cfg.set("bounds.lambda", flags["lambda"]);
        if (flags.count("d")) cfg.set("bounds.d", flags["d"]);

        const std::uint64_t seed = cfg.get_u64("run.seed", 1);
        const std::int64_t threads = cfg.get_int("run.threads", 1);
        if (threads < 1) throw ConfigError("config key 'run.threads': must be at least 1");
        const std::string out_path = cfg.get_str("run.out", "");
        std::ofstream file;
        std::ostream* sink = &out;
        if (!out_path.empty()) {
            file.open(out_path);
            if (!file) throw std::runtime_error("cannot open output file: " + out_path);
            sink = &file;
        }
        Ctx ctx{cfg, seed, hash_hex(cfg.hash(sub)), *sink, out};
        it->second(ctx);
        cfg.finish("subcommand '" + sub + "'");
        return 0;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace germgrain::cli
