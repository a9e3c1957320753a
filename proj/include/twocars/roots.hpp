#pragma once

#include <functional>
#include <optional>

namespace twocars {

inline constexpr double kDefaultTol = 1e-12;
inline constexpr int kMaxIterations = 200;
// Half-width of the band around ell_J treated as the medium regime.
inline constexpr double kJunctionGuard = 1e-9;

struct RootResult {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

struct XiEta {
    double xi;
    double eta;
};

struct JunctionConstants {
    double theta_J;
    double ell_J;
};

enum class Regime { Small, Medium, Large };

const char* regime_name(Regime r);

// Critical angles plus the regime root they came from (w for small,
// m and n for large, all equal to theta_J for medium).
struct CriticalAngles {
    Regime regime;
    double theta1;
    double theta2;
    double w = 0.0;
    double m = 0.0;
    double n = 0.0;
};

using ScalarFn = std::function<double(double)>;

XiEta xi_eta(double ell, double alpha);

// Newton iteration from `guess`, safeguarded by bisection on [lo, hi].
// An endpoint with |f| <= tol is accepted as the root.
RootResult solve_bracketed(const ScalarFn& f, const std::optional<ScalarFn>& df, double lo, double hi,
                           double guess, double tol = kDefaultTol);

// Clamp radicands in [-1e-12, 0) to zero; throw DomainError below that.
double clamp_radicand(double r);

// Left-hand sides of the defining equations.
double junction_equation(double vt);
double junction_equation_derivative(double vt);
double w_equation(double ell, double w);
double m_equation(double ell, double m);
double n_equation(double ell, double n);
double p_equation(double ell, double vt, double p);
double q_equation(double ell, double vt, double q);

// Cached after the first call.
JunctionConstants junction_constants();
// Solves from scratch every time.
JunctionConstants compute_junction_constants();

RootResult solve_w(double ell, double tol = kDefaultTol);
RootResult solve_m(double ell, double tol = kDefaultTol);
RootResult solve_n(double ell, double tol = kDefaultTol);
RootResult solve_p(double ell, double vt, double tol = kDefaultTol);
RootResult solve_q(double ell, double vt, double tol = kDefaultTol);

Regime regime_of(double ell);
CriticalAngles critical_angles(double ell, double tol = kDefaultTol);

namespace detail {
// Root solves without the critical-angle domain check; callers validate.
RootResult p_root(double ell, double vt, double tol);
RootResult q_root(double ell, double vt, double tol);
}  // namespace detail

}  // namespace twocars
