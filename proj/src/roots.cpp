#include "twocars/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twocars/errors.hpp"
#include "twocars/kinematics.hpp"

namespace twocars {

namespace {

constexpr double kDomainSlack = 1e-12;

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

// Largest point of [lo, hi] below which `r` is negative somewhere, found
// by a grid scan and refined by bisection so that r >= 0 there.
double feasible_start(const ScalarFn& r, double lo, double hi, int grid = 400) {
    int last_neg = -1;
    const double h = (hi - lo) / grid;
    for (int i = 0; i <= grid; ++i)
        if (r(lo + i * h) < 0.0) last_neg = i;
    if (last_neg < 0) return lo;
    if (last_neg == grid) throw DomainError("radicand negative on the whole search interval");
    double a = lo + last_neg * h, b = a + h;
    for (int i = 0; i < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, b); ++i) {
        const double mid = 0.5 * (a + b);
        (r(mid) < 0.0 ? a : b) = mid;
    }
    return b;
}

double derivative(const ScalarFn& f, const std::optional<ScalarFn>& df, double lo, double hi, double x) {
    if (df) return (*df)(x);
    const double h = 1e-7 * std::max(1.0, std::abs(x));
    const double xl = std::max(lo, x - h), xr = std::min(hi, x + h);
    return (f(xr) - f(xl)) / (xr - xl);
}

// A few extra Newton steps once within tolerance, kept while |f| shrinks,
// so that junction-sensitive callers see roots at full precision.
RootResult polish(const ScalarFn& f, const std::optional<ScalarFn>& df, double lo, double hi, double x, double fx,
                  int it) {
    for (int k = 0; k < 3 && fx != 0.0; ++k) {
        const double xn = x - fx / derivative(f, df, lo, hi, x);
        if (!(xn >= lo && xn <= hi)) break;
        const double fn = f(xn);
        if (!(std::abs(fn) < std::abs(fx))) break;
        x = xn;
        fx = fn;
        ++it;
    }
    return {x, fx, it};
}

void check_ell(double ell) {
    if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("capture radius must be positive");
}

double n_radicand(double ell, double n) { return (ell + n) * (ell + n - 4.0 * std::sin(n)); }

double p_radicand(double ell, double vt, double p) {
    const XiEta xe = xi_eta(ell, p);
    const double d = xe.xi - 4.0 * std::cos(0.5 * vt);
    return d * d + xe.eta * xe.eta - 4.0;
}

}  // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Small: return "small";
        case Regime::Medium: return "medium";
        case Regime::Large: return "large";
    }
    return "?";
}

XiEta xi_eta(double ell, double alpha) {
    const double s = std::sin(0.5 * alpha), c = std::cos(0.5 * alpha);
    return {(ell + alpha) * s + 2.0 * c, (ell + alpha) * c - 2.0 * s};
}

double clamp_radicand(double r) {
    if (r >= 0.0) return r;
    if (r >= -1e-12) return 0.0;
    throw DomainError("negative radicand " + std::to_string(r));
}

RootResult solve_bracketed(const ScalarFn& f, const std::optional<ScalarFn>& df, double lo, double hi,
                           double guess, double tol) {
    if (!(lo < hi)) throw NoSignChange("empty interval");
    double fa = f(lo), fb = f(hi);
    if (std::abs(fa) <= tol) return {lo, fa, 0};
    if (std::abs(fb) <= tol) return {hi, fb, 0};
    if (!std::isfinite(fa) || !std::isfinite(fb) || sgn(fa) == sgn(fb))
        throw NoSignChange("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");

    const double lo0 = lo, hi0 = hi;
    double a = lo, b = hi;
    double x = (guess > a && guess < b) ? guess : 0.5 * (a + b);
    double prev_abs = std::numeric_limits<double>::infinity();
    bool force_bisect = false;
    double best_x = std::abs(fa) < std::abs(fb) ? a : b;
    double best_f = std::min(std::abs(fa), std::abs(fb)) * (std::abs(fa) < std::abs(fb) ? sgn(fa) : sgn(fb));

    for (int it = 1; it <= kMaxIterations; ++it) {
        const double fx = f(x);
        if (std::abs(fx) < std::abs(best_f)) {
            best_x = x;
            best_f = fx;
        }
        if (std::abs(fx) <= tol) return polish(f, df, lo0, hi0, x, fx, it);
        if (sgn(fx) == sgn(fa)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // Bracket collapsed to adjacent doubles: the noise floor is reached.
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            return {best_x, best_f, it};

        force_bisect = force_bisect || std::abs(fx) > 0.5 * prev_abs;
        prev_abs = std::abs(fx);
        double next = std::numeric_limits<double>::quiet_NaN();
        if (!force_bisect) {
            next = x - fx / derivative(f, df, lo0, hi0, x);
        }
        force_bisect = false;
        if (!(next > a && next < b)) {
            next = 0.5 * (a + b);
            prev_abs = std::numeric_limits<double>::infinity();
        }
        x = next;
    }
    throw MaxIterations("root solver did not converge in " + std::to_string(kMaxIterations) + " steps");
}

double junction_equation(double vt) {
    const double h = 0.5 * vt;
    return vt - 4.0 * (1.0 + std::cos(h)) * std::cos(h) / std::sin(h);
}

double junction_equation_derivative(double vt) {
    const double c = std::cos(0.5 * vt), s = std::sin(0.5 * vt);
    return (1.0 + c) * (1.0 + c) * (3.0 - 2.0 * c) / (s * s);
}

double w_equation(double ell, double w) { return xi_eta(ell, w).eta + ell; }

double m_equation(double ell, double m) {
    const double s = std::sin(0.5 * m), c = std::cos(0.5 * m);
    const double a = 2.0 * s - ell, b = 2.0 + 2.0 * c;
    return (ell + m) * (ell + m) - a * a - b * b;
}

double n_equation(double ell, double n) {
    const double root = std::sqrt(clamp_radicand(n_radicand(ell, n)));
    return xi_eta(ell, root - ell).eta + xi_eta(ell, n).eta;
}

double p_equation(double ell, double vt, double p) {
    const double root = std::sqrt(clamp_radicand(p_radicand(ell, vt, p)));
    return xi_eta(ell, p).eta + xi_eta(ell, root - ell).eta;
}

double q_equation(double ell, double vt, double q) {
    const double h = 0.5 * (q - vt);
    const double a = 2.0 + 2.0 * std::cos(h), b = ell + q + 2.0 * std::sin(h);
    return (ell + vt) * (ell + vt) - a * a - b * b;
}

JunctionConstants compute_junction_constants() {
    const RootResult r = solve_bracketed(junction_equation, ScalarFn(junction_equation_derivative), 1e-3,
                                         kTwoPi - 1e-3, 2.3, kDefaultTol);
    const double t = r.value;
    return {t, -2.0 * (std::cos(0.5 * t) + std::cos(t)) / std::sin(0.5 * t)};
}

JunctionConstants junction_constants() {
    static const JunctionConstants jc = compute_junction_constants();
    return jc;
}

Regime regime_of(double ell) {
    check_ell(ell);
    const double lj = junction_constants().ell_J;
    if (std::abs(ell - lj) < kJunctionGuard) return Regime::Medium;
    return ell < lj ? Regime::Small : Regime::Large;
}

RootResult solve_w(double ell, double tol) {
    check_ell(ell);
    const JunctionConstants jc = junction_constants();
    if (!(ell < jc.ell_J)) throw DomainError("w is defined only for ell < ell_J");
    auto f = [ell](double w) { return w_equation(ell, w); };
    auto df = [ell](double w) { return -0.5 * (ell + w) * std::sin(0.5 * w); };
    return solve_bracketed(f, ScalarFn(df), 0.0, kTwoPi, jc.theta_J, tol);
}

RootResult solve_m(double ell, double tol) {
    check_ell(ell);
    const JunctionConstants jc = junction_constants();
    if (!(ell > jc.ell_J)) throw DomainError("m is defined only for ell > ell_J");
    auto f = [ell](double m) { return m_equation(ell, m); };
    auto df = [ell](double m) {
        const double s = std::sin(0.5 * m), c = std::cos(0.5 * m);
        return 2.0 * (ell + m) - 2.0 * (2.0 * s - ell) * c + 2.0 * (2.0 + 2.0 * c) * s;
    };
    return solve_bracketed(f, ScalarFn(df), 0.0, kTwoPi, kPi, tol);
}

RootResult solve_n(double ell, double tol) {
    check_ell(ell);
    const JunctionConstants jc = junction_constants();
    if (!(ell > jc.ell_J)) throw DomainError("n is defined only for ell > ell_J");
    // ell + n - 4 sin n is smallest at n = acos(1/4); if negative there, the
    // radicand has a negative band and the root lies above its upper edge.
    double lo = 0.0;
    const double nmin = std::acos(0.25);
    auto band = [ell](double n) { return ell + n - 4.0 * std::sin(n); };
    if (band(nmin) < 0.0) {
        double a = nmin, b = kPi;
        for (int i = 0; i < 200 && b - a > 1e-16; ++i) {
            const double mid = 0.5 * (a + b);
            (band(mid) < 0.0 ? a : b) = mid;
        }
        lo = b;
    }
    auto f = [ell](double n) { return n_equation(ell, n); };
    return solve_bracketed(f, std::nullopt, lo, kTwoPi, kPi, tol);
}

CriticalAngles critical_angles(double ell, double tol) {
    const Regime reg = regime_of(ell);
    const JunctionConstants jc = junction_constants();
    CriticalAngles ca{reg, jc.theta_J, jc.theta_J};
    switch (reg) {
        case Regime::Medium:
            ca.w = ca.m = ca.n = jc.theta_J;
            break;
        case Regime::Small: {
            const double w = solve_w(ell, tol).value;
            ca.w = w;
            ca.theta1 = w;
            const double arg = (std::sqrt((ell + w) * (ell + w) - ell * ell + 4.0) - 2.0) / 4.0;
            ca.theta2 = 2.0 * std::acos(std::clamp(arg, -1.0, 1.0));
            break;
        }
        case Regime::Large:
            ca.m = solve_m(ell, tol).value;
            ca.n = solve_n(ell, tol).value;
            ca.theta1 = ca.m;
            ca.theta2 = ca.n;
            break;
    }
    return ca;
}

namespace detail {

RootResult p_root(double ell, double vt, double tol) {
    auto r = [ell, vt](double p) { return p_radicand(ell, vt, p); };
    const double lo = feasible_start(r, 0.0, vt);
    auto f = [ell, vt](double p) { return p_equation(ell, vt, p); };
    return solve_bracketed(f, std::nullopt, lo, vt, vt, tol);
}

RootResult q_root(double ell, double vt, double tol) {
    auto f = [ell, vt](double q) { return q_equation(ell, vt, q); };
    return solve_bracketed(f, std::nullopt, 0.0, kTwoPi - vt, vt, tol);
}

}  // namespace detail

RootResult solve_p(double ell, double vt, double tol) {
    const CriticalAngles ca = critical_angles(ell, tol);
    if (vt < ca.theta2 - kDomainSlack || vt > kTwoPi - ca.theta2 + kDomainSlack)
        throw DomainError("p requires vartheta in (theta2, 2pi - theta2)");
    return detail::p_root(ell, vt, tol);
}

RootResult solve_q(double ell, double vt, double tol) {
    const CriticalAngles ca = critical_angles(ell, tol);
    if (ca.regime != Regime::Large) throw DomainError("q is defined only for ell > ell_J");
    if (vt < ca.theta1 - kDomainSlack || vt > ca.theta2 + kDomainSlack)
        throw DomainError("q requires vartheta in (theta1, theta2)");
    return detail::q_root(ell, vt, tol);
}

}  // namespace twocars
