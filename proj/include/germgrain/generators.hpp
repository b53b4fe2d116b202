#pragma once

// Point process generators: homogeneous Poisson, deterministic lattices,
// perturbed lattices (independent per-site replication and translation),
// an annular cluster process, and count-vector models driven by a rate table.

#include <cmath>
#include <numbers>
#include <optional>
#include <variant>

#include "core.hpp"

namespace germgrain {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

inline double log_choose(double a, double b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

// --- replication kernels ---------------------------------------------------
// Integer-valued laws for the number of offspring a lattice site emits.

struct Dirac { std::int64_t n = 1; };
struct BinomialK { std::int64_t n = 1; double p = 1.0; };
struct PoissonK { double mean = 1.0; };
struct NegBinomialK { double r = 1.0; double p = 0.5; };  // pmf C(r+i-1,i) p^i (1-p)^r
struct GeometricK { double p = 0.5; };                    // pmf p (1-p)^i
struct HyperGeometricK { std::int64_t n = 1, m = 1, k = 1; };  // urn n, marked m, draws k
struct GeoMixtureK { std::vector<double> weights, probs; };

using ReplicationKernel = std::variant<Dirac, BinomialK, PoissonK, NegBinomialK,
                                       GeometricK, HyperGeometricK, GeoMixtureK>;

inline void kernel_validate(const ReplicationKernel& k) {
    std::visit(overloaded{
        [](const Dirac& d) { if (d.n < 0) throw std::invalid_argument("dirac: n < 0"); },
        [](const BinomialK& b) {
            if (b.n < 0 || b.p < 0.0 || b.p > 1.0) throw std::invalid_argument("binomial kernel: bad parameters");
        },
        [](const PoissonK& p) { if (!(p.mean >= 0.0)) throw std::invalid_argument("poisson kernel: bad mean"); },
        [](const NegBinomialK& nb) {
            if (!(nb.r > 0.0) || !(nb.p > 0.0 && nb.p < 1.0))
                throw std::invalid_argument("negbinomial kernel: bad parameters");
        },
        [](const GeometricK& g) {
            if (!(g.p > 0.0 && g.p <= 1.0)) throw std::invalid_argument("geometric kernel: bad p");
        },
        [](const HyperGeometricK& h) {
            if (h.n < 0 || h.m < 0 || h.m > h.n || h.k < 0 || h.k > h.n)
                throw std::invalid_argument("hypergeometric kernel: bad parameters");
        },
        [](const GeoMixtureK& gm) {
            if (gm.weights.empty() || gm.weights.size() != gm.probs.size())
                throw std::invalid_argument("geo mixture: weights/probs size mismatch");
            double s = 0.0;
            for (double w : gm.weights) { if (!(w > 0.0)) throw std::invalid_argument("geo mixture: weights must be positive"); s += w; }
            if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("geo mixture: weights must sum to 1");
            for (double p : gm.probs)
                if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geo mixture: bad p");
        }}, k);
}

inline double kernel_mean(const ReplicationKernel& k) {
    return std::visit(overloaded{
        [](const Dirac& d) { return static_cast<double>(d.n); },
        [](const BinomialK& b) { return b.n * b.p; },
        [](const PoissonK& p) { return p.mean; },
        [](const NegBinomialK& nb) { return nb.r * nb.p / (1.0 - nb.p); },
        [](const GeometricK& g) { return 1.0 / g.p - 1.0; },
        [](const HyperGeometricK& h) {
            return h.n == 0 ? 0.0 : static_cast<double>(h.k) * static_cast<double>(h.m) / static_cast<double>(h.n);
        },
        [](const GeoMixtureK& gm) {
            double s = 0.0;
            for (std::size_t j = 0; j < gm.weights.size(); ++j) s += gm.weights[j] / gm.probs[j];
            return s - 1.0;
        }}, k);
}

inline double kernel_pmf(const ReplicationKernel& k, std::int64_t i) {
    if (i < 0) return 0.0;
    const double x = static_cast<double>(i);
    return std::visit(overloaded{
        [&](const Dirac& d) { return i == d.n ? 1.0 : 0.0; },
        [&](const BinomialK& b) -> double {
            if (i > b.n) return 0.0;
            if (b.p == 0.0) return i == 0 ? 1.0 : 0.0;
            if (b.p == 1.0) return i == b.n ? 1.0 : 0.0;
            return std::exp(log_choose(static_cast<double>(b.n), x) + x * std::log(b.p) +
                            static_cast<double>(b.n - i) * std::log1p(-b.p));
        },
        [&](const PoissonK& p) -> double {
            if (p.mean == 0.0) return i == 0 ? 1.0 : 0.0;
            return std::exp(x * std::log(p.mean) - p.mean - std::lgamma(x + 1.0));
        },
        [&](const NegBinomialK& nb) {
            return std::exp(std::lgamma(nb.r + x) - std::lgamma(nb.r) - std::lgamma(x + 1.0) +
                            x * std::log(nb.p) + nb.r * std::log1p(-nb.p));
        },
        [&](const GeometricK& g) -> double {
            if (g.p == 1.0) return i == 0 ? 1.0 : 0.0;
            return g.p * std::exp(x * std::log1p(-g.p));
        },
        [&](const HyperGeometricK& h) -> double {
            if (i > h.m || h.k - i > h.n - h.m || i > h.k) return 0.0;
            return std::exp(log_choose(static_cast<double>(h.m), x) +
                            log_choose(static_cast<double>(h.n - h.m), static_cast<double>(h.k - i)) -
                            log_choose(static_cast<double>(h.n), static_cast<double>(h.k)));
        },
        [&](const GeoMixtureK& gm) {
            double s = 0.0;
            for (std::size_t j = 0; j < gm.weights.size(); ++j)
                s += gm.weights[j] * kernel_pmf(GeometricK{gm.probs[j]}, i);
            return s;
        }}, k);
}

inline std::int64_t kernel_sample(const ReplicationKernel& k, RngStream& g) {
    return std::visit(overloaded{
        [&](const Dirac& d) { return d.n; },
        [&](const BinomialK& b) { return binomial(g, b.n, b.p); },
        [&](const PoissonK& p) { return poisson(g, p.mean); },
        [&](const NegBinomialK& nb) { return neg_binomial(g, nb.r, nb.p); },
        [&](const GeometricK& ge) { return geometric(g, ge.p); },
        [&](const HyperGeometricK& h) { return hypergeometric(g, h.n, h.m, h.k); },
        [&](const GeoMixtureK& gm) {
            double u = g.u01();
            std::size_t j = 0;
            for (; j + 1 < gm.weights.size(); ++j) {
                if (u < gm.weights[j]) break;
                u -= gm.weights[j];
            }
            return geometric(g, gm.probs[j]);
        }}, k);
}

// --- lattices --------------------------------------------------------------

enum class LatticeType { square, hexagonal };

/// Origin-anchored lattice. For the hexagonal type, spacing is the nearest
/// neighbour distance: rows sit at y = j * spacing * sqrt(3)/2 and odd rows
/// are shifted by spacing / 2.
struct LatticeSpec {
    LatticeType type = LatticeType::square;
    double spacing = 1.0;
    int dim = 2;
};

inline void lattice_validate(const LatticeSpec& s) {
    if (!(s.spacing > 0.0)) throw std::invalid_argument("lattice: spacing must be positive");
    if (s.dim < 1 || s.dim > 3) throw std::invalid_argument("lattice: dimension must be 1..3");
    if (s.type == LatticeType::hexagonal && s.dim != 2)
        throw std::invalid_argument("lattice: hexagonal requires dim 2");
}

inline double lattice_intensity(const LatticeSpec& s) {
    lattice_validate(s);
    if (s.type == LatticeType::hexagonal) return 2.0 / (std::numbers::sqrt3 * sq(s.spacing));
    return 1.0 / std::pow(s.spacing, s.dim);
}

/// Lattice points inside w (half-open), in deterministic row-major order.
inline PointPattern make_lattice(const LatticeSpec& spec, const Window& w) {
    lattice_validate(spec);
    if (spec.dim != w.dim()) throw std::invalid_argument("lattice: window dimension mismatch");
    PointPattern pat(w, 0.0);
    const double s = spec.spacing;
    if (spec.type == LatticeType::square) {
        std::array<std::int64_t, 3> lo{}, hi{}, cur{};
        for (int k = 0; k < spec.dim; ++k) {
            auto kk = static_cast<std::size_t>(k);
            lo[kk] = static_cast<std::int64_t>(std::floor(w.lower[kk] / s)) - 1;
            hi[kk] = static_cast<std::int64_t>(std::floor(w.upper[kk] / s)) + 1;
        }
        cur = lo;
        Point p(static_cast<std::size_t>(spec.dim));
        for (;;) {
            for (int k = 0; k < spec.dim; ++k) p[static_cast<std::size_t>(k)] = static_cast<double>(cur[static_cast<std::size_t>(k)]) * s;
            if (w.contains(p)) pat.push_back(p);
            int axis = spec.dim - 1;  // last axis fastest: row-major
            while (axis >= 0) {
                auto aa = static_cast<std::size_t>(axis);
                if (++cur[aa] <= hi[aa]) break;
                cur[aa] = lo[aa];
                --axis;
            }
            if (axis < 0) break;
        }
    } else {
        const double row = s * std::numbers::sqrt3 / 2.0;
        auto j_lo = static_cast<std::int64_t>(std::floor(w.lower[1] / row)) - 1;
        auto j_hi = static_cast<std::int64_t>(std::floor(w.upper[1] / row)) + 1;
        for (std::int64_t j = j_lo; j <= j_hi; ++j) {
            const double off = (j % 2 != 0) ? s / 2.0 : 0.0;
            auto i_lo = static_cast<std::int64_t>(std::floor((w.lower[0] - off) / s)) - 1;
            auto i_hi = static_cast<std::int64_t>(std::floor((w.upper[0] - off) / s)) + 1;
            for (std::int64_t i = i_lo; i <= i_hi; ++i) {
                Point p{static_cast<double>(i) * s + off, static_cast<double>(j) * row};
                if (w.contains(p)) pat.push_back(p);
            }
        }
    }
    return pat;
}

// --- translation kernels ---------------------------------------------------
// Law of the random offset applied to each offspring point.

struct UniformCell { LatticeSpec cell; };  // uniform on the lattice's Voronoi cell at the origin
struct UniformBall { double radius = 1.0; int dim = 2; };
struct UniformAnnulus { double inner = 0.0, outer = 1.0; int dim = 2; };

using TranslationKernel = std::variant<UniformCell, UniformBall, UniformAnnulus>;

inline void translation_validate(const TranslationKernel& t) {
    std::visit(overloaded{
        [](const UniformCell& c) { lattice_validate(c.cell); },
        [](const UniformBall& b) {
            if (!(b.radius >= 0.0)) throw std::invalid_argument("uniform ball: bad radius");
            if (b.dim < 1 || b.dim > 3) throw std::invalid_argument("uniform ball: dimension must be 1..3");
        },
        [](const UniformAnnulus& a) {
            if (!(a.inner >= 0.0 && a.outer > a.inner)) throw std::invalid_argument("uniform annulus: need 0 <= inner < outer");
            if (a.dim < 1 || a.dim > 3) throw std::invalid_argument("uniform annulus: dimension must be 1..3");
        }}, t);
}

inline double support_radius(const TranslationKernel& t) {
    return std::visit(overloaded{
        [](const UniformCell& c) {
            if (c.cell.type == LatticeType::hexagonal) return c.cell.spacing / std::numbers::sqrt3;
            return c.cell.spacing * std::sqrt(static_cast<double>(c.cell.dim)) / 2.0;
        },
        [](const UniformBall& b) { return b.radius; },
        [](const UniformAnnulus& a) { return a.outer; }}, t);
}

inline int translation_dim(const TranslationKernel& t) {
    return std::visit(overloaded{
        [](const UniformCell& c) { return c.cell.dim; },
        [](const UniformBall& b) { return b.dim; },
        [](const UniformAnnulus& a) { return a.dim; }}, t);
}

inline Point sample_offset(const TranslationKernel& t, RngStream& g) {
    return std::visit(overloaded{
        [&](const UniformCell& c) -> Point {
            const double s = c.cell.spacing;
            if (c.cell.type == LatticeType::square) {
                Point p(static_cast<std::size_t>(c.cell.dim));
                for (auto& v : p) v = g.uniform(-s / 2.0, s / 2.0);
                return p;
            }
            // rejection in the bounding box of the hexagonal Voronoi cell
            const double half = s / 2.0, circ = s / std::numbers::sqrt3;
            for (;;) {
                double x = g.uniform(-half, half), y = g.uniform(-circ, circ);
                double a = std::abs(x / 2.0 + y * std::numbers::sqrt3 / 2.0);
                double b = std::abs(-x / 2.0 + y * std::numbers::sqrt3 / 2.0);
                if (a <= half && b <= half) return Point{x, y};
            }
        },
        [&](const UniformBall& b) -> Point {
            Point p(static_cast<std::size_t>(b.dim));
            if (b.radius == 0.0) return p;
            for (;;) {
                double s2 = 0.0;
                for (auto& v : p) { v = g.uniform(-b.radius, b.radius); s2 += sq(v); }
                if (s2 <= sq(b.radius)) return p;
            }
        },
        [&](const UniformAnnulus& a) -> Point {
            // uniform direction via normals, radius by inverting the volume cdf
            Point p(static_cast<std::size_t>(a.dim));
            double n2 = 0.0;
            do {
                n2 = 0.0;
                for (auto& v : p) { v = normal01(g); n2 += sq(v); }
            } while (n2 == 0.0);
            const double d = static_cast<double>(a.dim);
            double rho = std::pow(std::pow(a.inner, d) + g.u01() * (std::pow(a.outer, d) - std::pow(a.inner, d)), 1.0 / d);
            double scale = rho / std::sqrt(n2);
            for (auto& v : p) v *= scale;
            return p;
        }}, t);
}

// --- generator configurations ----------------------------------------------

struct PoissonConfig {
    double intensity = 1.0;
    int dim = 2;
};

struct LatticeConfig {
    LatticeSpec spec;
};

struct PerturbedLatticeConfig {
    LatticeSpec lattice;
    ReplicationKernel replication = Dirac{1};
    TranslationKernel translation = UniformCell{};
};

/// Cluster process: parent centres form a Poisson process of intensity
/// alpha; each centre carries Poisson(mu) points placed uniformly on the
/// annulus between radii R - delta and R around it. Planar only.
struct AnnularConfig {
    double alpha = 1.0;
    double mu = 1.0;
    double R = 1.0;
    double delta = 1.0;
};

using GeneratorConfig = std::variant<PoissonConfig, LatticeConfig, PerturbedLatticeConfig, AnnularConfig>;

inline void config_validate(const GeneratorConfig& c) {
    std::visit(overloaded{
        [](const PoissonConfig& p) {
            if (!(p.intensity >= 0.0) || !std::isfinite(p.intensity)) throw std::invalid_argument("poisson: bad intensity");
            if (p.dim < 1 || p.dim > 3) throw std::invalid_argument("poisson: dimension must be 1..3");
        },
        [](const LatticeConfig& l) { lattice_validate(l.spec); },
        [](const PerturbedLatticeConfig& pl) {
            lattice_validate(pl.lattice);
            kernel_validate(pl.replication);
            translation_validate(pl.translation);
            if (translation_dim(pl.translation) != pl.lattice.dim)
                throw std::invalid_argument("perturbed lattice: translation dimension mismatch");
        },
        [](const AnnularConfig& a) {
            if (!(a.alpha >= 0.0) || !(a.mu >= 0.0) || !(a.R > 0.0)) throw std::invalid_argument("annular: bad parameters");
            if (!(a.delta > 0.0 && a.delta <= a.R)) throw std::invalid_argument("annular: need 0 < delta <= R");
        }}, c);
}

inline int config_dim(const GeneratorConfig& c) {
    return std::visit(overloaded{
        [](const PoissonConfig& p) { return p.dim; },
        [](const LatticeConfig& l) { return l.spec.dim; },
        [](const PerturbedLatticeConfig& pl) { return pl.lattice.dim; },
        [](const AnnularConfig&) { return 2; }}, c);
}

inline double mean_intensity(const GeneratorConfig& c) {
    return std::visit(overloaded{
        [](const PoissonConfig& p) { return p.intensity; },
        [](const LatticeConfig& l) { return lattice_intensity(l.spec); },
        [](const PerturbedLatticeConfig& pl) { return lattice_intensity(pl.lattice) * kernel_mean(pl.replication); },
        [](const AnnularConfig& a) { return a.alpha * a.mu; }}, c);
}

inline PointPattern sample_poisson(double intensity, const Window& w, RngStream& g) {
    PointPattern pat(w, 0.0);
    auto n = poisson(g, intensity * w.volume());
    Point p(static_cast<std::size_t>(w.dim()));
    for (std::int64_t i = 0; i < n; ++i) {
        for (int k = 0; k < w.dim(); ++k) {
            auto kk = static_cast<std::size_t>(k);
            p[kk] = g.uniform(w.lower[kk], w.upper[kk]);
        }
        pat.push_back(p);
    }
    return pat;
}

/// Draw one realization on window.dilated(margin). Points the process places
/// outside the dilated window are dropped; processes with spatial reach
/// (perturbed lattices, annular clusters) extend their parent stage far
/// enough that the restriction is exact in law.
inline PointPattern sample(const GeneratorConfig& c, const Window& w, double margin, RngStream& g) {
    config_validate(c);
    if (config_dim(c) != w.dim()) throw std::invalid_argument("sample: window dimension mismatch");
    if (margin < 0.0) throw std::invalid_argument("sample: negative margin");
    const Window keep = w.dilated(margin);
    return std::visit(overloaded{
        [&](const PoissonConfig& p) -> PointPattern {
            PointPattern pat = sample_poisson(p.intensity, keep, g);
            pat.window = w;
            pat.margin_used = margin;
            return pat;
        },
        [&](const LatticeConfig& l) -> PointPattern {
            PointPattern pat = make_lattice(l.spec, keep);
            pat.window = w;
            pat.margin_used = margin;
            return pat;
        },
        [&](const PerturbedLatticeConfig& pl) -> PointPattern {
            const double reach = support_radius(pl.translation);
            PointPattern sites = make_lattice(pl.lattice, keep.dilated(reach));
            PointPattern pat(w, margin);
            const auto d = static_cast<std::size_t>(pl.lattice.dim);
            Point q(d);
            for (std::size_t i = 0; i < sites.size(); ++i) {
                auto z = sites.point(i);
                auto n = kernel_sample(pl.replication, g);
                for (std::int64_t c2 = 0; c2 < n; ++c2) {
                    Point off = sample_offset(pl.translation, g);
                    for (std::size_t k = 0; k < d; ++k) q[k] = z[k] + off[k];
                    if (keep.contains(q)) pat.push_back(q);
                }
            }
            return pat;
        },
        [&](const AnnularConfig& a) -> PointPattern {
            PointPattern centres = sample_poisson(a.alpha, keep.dilated(a.R), g);
            PointPattern pat(w, margin);
            Point q(2);
            const double in2 = (a.R - a.delta) * (a.R - a.delta), out2 = a.R * a.R;
            for (std::size_t i = 0; i < centres.size(); ++i) {
                auto cpt = centres.point(i);
                auto n = poisson(g, a.mu);
                for (std::int64_t j = 0; j < n; ++j) {
                    double th = g.uniform(0.0, 2.0 * std::numbers::pi);
                    double rho = std::sqrt(in2 + g.u01() * (out2 - in2));
                    q[0] = cpt[0] + rho * std::cos(th);
                    q[1] = cpt[1] + rho * std::sin(th);
                    if (keep.contains(q)) pat.push_back(q);
                }
            }
            return pat;
        }}, c);
}

/// Annular cluster process under its usual parameterization: centres of
/// intensity alpha, each dressed with Poisson(mu) points spread uniformly
/// over the band B(R) minus B(R - delta) around it, restricted to w.
inline PointPattern sample_annular_cox(double alpha, double R, double delta, double mu,
                                       const Window& w, RngStream& g) {
    return sample(AnnularConfig{alpha, mu, R, delta}, w, 0.0, g);
}

// --- annular parameter search ----------------------------------------------

struct InfeasibleError : std::runtime_error {
    double best_value;
    double best_R;
    InfeasibleError(const std::string& msg, double v, double R)
        : std::runtime_error(msg), best_value(v), best_R(R) {}
};

/// Scaled occupancy functional of the annular construction, evaluated in log
/// space as a function of u = log R at fixed grain radius r and point
/// intensity a. The series of per-arc terms stays finite for every u and the
/// function is eventually increasing and positive, but the sign change sits
/// at astronomically large u for any physical r.
inline double annular_log_growth(double r, double u, double a) {
    if (!(r > 0.0) || !(a > 0.0)) throw std::invalid_argument("annular_log_growth: bad parameters");
    if (!(u > 1.0)) throw std::invalid_argument("annular_log_growth: need log R > 1");
    const double two_pi_over_r = 2.0 * std::numbers::pi / r;
    double x = std::sqrt(u) * std::exp(-u);  // underflows to 0 for u beyond ~745
    double occupancy;
    if (x < 1e-12) occupancy = -std::sqrt(u) * (1.0 + 0.5 * x);
    else occupancy = std::exp(u) * std::log1p(-x);
    return std::log(a * std::numbers::pi) + u - std::log(two_pi_over_r)
         - std::log(u - 0.5 * std::log(u)) + two_pi_over_r * occupancy;
}

/// Probability that one of K equal arcs on the circle receives at least one
/// of Poisson(mu) uniformly spread points, jointly for all arcs.
inline double annular_p_open(std::int64_t K, double mu) {
    if (K < 1 || !(mu >= 0.0)) throw std::invalid_argument("annular_p_open: bad parameters");
    return std::exp(static_cast<double>(K) * std::log1p(-std::exp(-mu / static_cast<double>(K))));
}

struct CounterexampleParams {
    double alpha = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    double R = 0.0;
    std::int64_t K = 0;
    double p_open = 0.0;
};

/// Search integer arc counts K = 2 pi R / r for an annular configuration
/// whose open-centre occupied fraction reaches `target` at grain radius r
/// and point intensity a, with delta = r / 2. The fraction is maximal at
/// small R and collapses long before the asymptotic regime where it
/// recovers, so for realistic K caps this reports the best value found and
/// throws.
inline CounterexampleParams counterexample_params(double a, double r, double target = 0.9,
                                                  std::int64_t K_cap = 400000) {
    if (!(a > 0.0) || !(r > 0.0) || !(target > 0.0 && target < 1.0))
        throw std::invalid_argument("counterexample_params: bad parameters");
    double best_vf = -1.0, best_R = 0.0;
    for (std::int64_t K = 2; K <= K_cap; ++K) {
        double R = static_cast<double>(K) * r / (2.0 * std::numbers::pi);
        if (!(R > 1.0)) continue;
        double lg = std::log(R);
        double ratio = std::sqrt(lg) / R;  // per-arc void probability
        if (!(ratio < 1.0)) continue;
        double mu = static_cast<double>(K) * std::log(R / std::sqrt(lg));
        if (!(mu > 0.0)) continue;
        double p_open = std::exp(static_cast<double>(K) * std::log1p(-ratio));
        double exponent = (a / mu) * std::numbers::pi * R * R * p_open;
        double vf = -std::expm1(-exponent);
        if (vf > best_vf) { best_vf = vf; best_R = R; }
        if (vf >= target) return {a / mu, mu, r / 2.0, R, K, p_open};
    }
    throw InfeasibleError(
        "counterexample_params: target " + std::to_string(target) +
        " unreachable up to K=" + std::to_string(K_cap) + "; best occupied fraction " +
        std::to_string(best_vf) + " at R=" + std::to_string(best_R) +
        " (the functional only recovers at astronomically large R; see annular_log_growth)",
        best_vf, best_R);
}

/// Bench-scale annular configuration: arc density eta points per unit length
/// and centre-graph degree deg at circle radius near R_target, with the same
/// delta = r / 2 band as the full construction.
inline AnnularConfig annular_desk_params(double r, double eta = 30.0, double deg = 6.0,
                                         double R_target = 900.0) {
    if (!(r > 0.0) || !(eta > 0.0) || !(deg > 0.0) || !(R_target > 0.0))
        throw std::invalid_argument("annular_desk_params: bad parameters");
    auto K = static_cast<std::int64_t>(std::llround(2.0 * std::numbers::pi * R_target / r));
    double R = static_cast<double>(K) * r / (2.0 * std::numbers::pi);
    double mu = eta * 2.0 * std::numbers::pi * R;
    double alpha = deg / (4.0 * std::numbers::pi * R * R);
    return AnnularConfig{alpha, mu, R, r / 2.0};
}

// --- count vector models ---------------------------------------------------

/// Nonnegative rate table: rows are independent sources, columns index the
/// disjoint target sets. Row j emits N_j points, each assigned to column i
/// with probability rate(j,i) / row_sum(j).
struct EigenTable {
    std::vector<std::vector<double>> rates;

    std::size_t rows() const { return rates.size(); }
    std::size_t sets() const { return rates.empty() ? 0 : rates.front().size(); }
    double row_sum(std::size_t j) const {
        double s = 0.0;
        for (double v : rates[j]) s += v;
        return s;
    }
    void validate() const {
        if (rates.empty() || rates.front().empty()) throw std::invalid_argument("rate table: empty");
        for (const auto& row : rates) {
            if (row.size() != sets()) throw std::invalid_argument("rate table: ragged rows");
            for (double v : row)
                if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("rate table: bad rate");
        }
    }
};

enum class CountModel { deterministic, poisson, permanental };

inline CountModel parse_count_model(std::string_view s) {
    if (s == "det") return CountModel::deterministic;
    if (s == "poi") return CountModel::poisson;
    if (s == "perm") return CountModel::permanental;
    throw std::invalid_argument("count model must be det, poi or perm");
}

/// reps independent count vectors over the table's column sets. The
/// deterministic model needs every row sum at most 1 (Bernoulli counts);
/// poisson rows are Poisson, permanental rows geometric with the same mean.
inline std::vector<std::vector<std::int64_t>> sample_count_vectors(CountModel model,
                                                                   const EigenTable& table,
                                                                   std::int64_t reps, RngStream& g) {
    table.validate();
    const std::size_t S = table.sets();
    if (model == CountModel::deterministic)
        for (std::size_t j = 0; j < table.rows(); ++j)
            if (table.row_sum(j) > 1.0 + 1e-12)
                throw std::invalid_argument("deterministic model: row sums must be at most 1");
    std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(reps),
                                               std::vector<std::int64_t>(S, 0));
    for (auto& vec : out) {
        for (std::size_t j = 0; j < table.rows(); ++j) {
            const double lam = table.row_sum(j);
            if (lam == 0.0) continue;
            std::int64_t n = 0;
            switch (model) {
                case CountModel::deterministic: n = bernoulli(g, lam); break;
                case CountModel::poisson: n = poisson(g, lam); break;
                case CountModel::permanental: n = geometric(g, 1.0 / (1.0 + lam)); break;
            }
            for (std::int64_t t = 0; t < n; ++t) {
                double u = g.u01() * lam;
                std::size_t i = 0;
                for (; i + 1 < S; ++i) {
                    if (u < table.rates[j][i]) break;
                    u -= table.rates[j][i];
                }
                ++vec[i];
            }
        }
    }
    return out;
}

}  // namespace germgrain
