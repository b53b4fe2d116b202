#pragma once

// Analytic critical-radius constants and the sandwich consistency report.

#include "percolation.hpp"

namespace germgrain {

struct BoundReport {
    double lower = 0.0;
    double upper = 0.0;
    std::string method;
    std::vector<std::pair<std::string, double>> parameters;
    bool violation = false;
};

namespace detail {

/// Golden-section extremum of a smooth unimodal function on [a, b].
template <class F>
inline double golden_section(F&& f, double a, double b, double tol, bool maximize) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        bool pick_left = maximize ? fc > fd : fc < fd;
        if (pick_left) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// sqrt(d) (log(3^d - 2) / lambda)^(1/d). Degenerates to 0 at d = 1.
inline double rc_upper_tilde(double lambda, int d) {
    if (!(lambda > 0.0) || d < 1) throw std::invalid_argument("rc_upper_tilde: need lambda > 0, d >= 1");
    double dd = static_cast<double>(d);
    return std::sqrt(dd) * std::pow(std::log(std::pow(3.0, dd) - 2.0) / lambda, 1.0 / dd);
}

/// (1/2) (lambda (3^d - 1))^(-1/d).
inline double rc_lower(double lambda, int d) {
    if (!(lambda > 0.0) || d < 1) throw std::invalid_argument("rc_lower: need lambda > 0, d >= 1");
    double dd = static_cast<double>(d);
    return 0.5 * std::pow(lambda * (std::pow(3.0, dd) - 1.0), -1.0 / dd);
}

/// Largest r for which some s > 0 achieves
/// s + (1 - e^s) lambda (2r)^d > log(3^d - 1).
/// The inner maximum over s runs golden section on log s, the outer crossing
/// is bisected to tolerance 1e-10.
inline double c_lambda(double lambda, int d) {
    if (!(lambda > 0.0) || d < 1) throw std::invalid_argument("c_lambda: need lambda > 0, d >= 1");
    const double dd = static_cast<double>(d);
    const double threshold = std::log(std::pow(3.0, dd) - 1.0);
    auto best = [&](double r) {
        auto obj = [&](double ls) {
            double s = std::exp(ls);
            return s + (1.0 - std::exp(s)) * lambda * std::pow(2.0 * r, dd);
        };
        double ls = detail::golden_section(obj, -20.0, 20.0, 1e-12, true);
        return obj(ls);
    };
    double lo = 1e-12;
    if (!(best(lo) > threshold)) throw std::runtime_error("c_lambda: failed to bracket the crossing");
    double hi = lo;
    while (best(hi) > threshold) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("c_lambda: failed to bracket the crossing");
    }
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (best(mid) > threshold) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Infimum over s > 0 of the smallest r satisfying
/// (1 - e^{-s}) lambda (r / sqrt(d))^d - s (ceil(k/2) - 1) > log(3^d - 2),
/// using the closed-form inverse per s and golden section on log s.
inline double c_lambda_k(double lambda, int k, int d) {
    if (!(lambda > 0.0) || k < 1 || d < 1) throw std::invalid_argument("c_lambda_k: need lambda > 0, k >= 1, d >= 1");
    const double dd = static_cast<double>(d);
    const double base = std::log(std::pow(3.0, dd) - 2.0);
    const double extra = static_cast<double>((k + 1) / 2 - 1);
    auto r_of = [&](double ls) {
        double s = std::exp(ls);
        return std::sqrt(dd) * std::pow((base + s * extra) / ((1.0 - std::exp(-s)) * lambda), 1.0 / dd);
    };
    double ls = detail::golden_section(r_of, -20.0, 20.0, 1e-10, false);
    return r_of(ls);
}

/// lambda_ref (rc_ref / r)^d.
inline double critical_intensity(double r, double lambda_ref, double rc_ref, int d = 2) {
    if (!(r > 0.0)) throw std::invalid_argument("critical_intensity: need r > 0");
    return lambda_ref * std::pow(rc_ref / r, static_cast<double>(d));
}

/// Consistency check of the sandwich chain lower <= rc_hat <= upper using
/// the confidence intervals: any pair ordered the wrong way by a full CI
/// separation flags a violation.
inline BoundReport sandwich_report(const Estimate& lower, const Estimate& upper,
                                   const Estimate& rc_hat) {
    BoundReport rep;
    rep.method = "sandwich";
    rep.lower = lower.value;
    rep.upper = upper.value;
    rep.parameters = {{"rc_hat", rc_hat.value}, {"rc_hat_lo", rc_hat.lo}, {"rc_hat_hi", rc_hat.hi},
                      {"lower_lo", lower.lo}, {"lower_hi", lower.hi},
                      {"upper_lo", upper.lo}, {"upper_hi", upper.hi}};
    rep.violation = rc_hat.hi < lower.lo || rc_hat.lo > upper.hi || lower.lo > upper.hi;
    return rep;
}

}  // namespace germgrain
