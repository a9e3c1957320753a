#include <doctest.h>

#include <chrono>
#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "twocars/errors.hpp"
#include "twocars/kinematics.hpp"
#include "twocars/roots.hpp"

using namespace twocars;
using doctest::Approx;
namespace fz = oracle::frozen;
using namespace oracle::eq;

namespace {

// Sign changes of f on a uniform grid over [a, b], skipping points where
// `ok` is false (e.g. a negative radicand).
int sign_changes(const std::function<double(double)>& f, double a, double b, int n = 10000,
                 const std::function<bool(double)>& ok = {}) {
    int changes = 0, prev = 0;
    for (int i = 0; i <= n; ++i) {
        const double x = a + (b - a) * i / n;
        if (ok && !ok(x)) continue;
        const double v = f(x);
        const int s = (v > 0) - (v < 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

const double kEllJ = junction_constants().ell_J;

}  // namespace

TEST_CASE("xi and eta") {
    auto xe = xi_eta(1, 0);
    CHECK(xe.xi == 2);
    CHECK(xe.eta == 1);
    xe = xi_eta(1, kPi);
    CHECK(xe.xi == Approx(1 + kPi));
    CHECK(xe.eta == Approx(-2));
    for (double l : {0.2, 1.0, 3.0})
        for (double a : {-1.0, 0.5, 2.0, 6.0}) {
            xe = xi_eta(l, a);
            CHECK(xe.xi * xe.xi + xe.eta * xe.eta == Approx((l + a) * (l + a) + 4).epsilon(1e-13));
        }
}

TEST_CASE("solve_bracketed") {
    auto r = solve_bracketed([](double x) { return x * x - 2; }, std::nullopt, 1, 2, 1.5);
    CHECK(r.value == Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(r.residual) <= 1e-12);
    CHECK_THROWS_AS(solve_bracketed([](double x) { return x + 5; }, std::nullopt, 0, 1, 0.5), NoSignChange);
    // Root exactly on an endpoint is accepted.
    r = solve_bracketed([](double x) { return x - 1; }, std::nullopt, 1, 2, 1.5);
    CHECK(r.value == 1.0);
    // A flat-then-steep function still converges through the bisection guard.
    r = solve_bracketed([](double x) { return std::atan(50 * (x - 0.3)); }, std::nullopt, -10, 10, 9);
    CHECK(r.value == Approx(0.3).epsilon(1e-12));
    r = solve_bracketed(junction_equation, std::nullopt, 0.01, kTwoPi - 0.01, kPi);
    CHECK(std::abs(r.value - 2.343) < 1e-3);
}

TEST_CASE("clamp_radicand") {
    CHECK(clamp_radicand(0.5) == 0.5);
    CHECK(clamp_radicand(-5e-13) == 0.0);
    CHECK_THROWS_AS(clamp_radicand(-1e-9), DomainError);
}

TEST_CASE("junction constants") {
    const auto jc = junction_constants();
    CHECK(std::abs(jc.theta_J - 2.343) < 1e-3);
    CHECK(std::abs(jc.ell_J - 0.671) < 1e-3);
    CHECK(jc.theta_J == Approx(fz::theta_J).epsilon(1e-12));
    CHECK(jc.ell_J == Approx(fz::ell_J).epsilon(1e-12));
    const double t = jc.theta_J;
    CHECK(std::abs(t - 4 * (1 + std::cos(t / 2)) / std::tan(t / 2)) < 1e-12);
    CHECK(jc.ell_J == Approx(-2 * (std::cos(t / 2) + std::cos(t)) / std::sin(t / 2)));
}

TEST_CASE("junction equation is monotone") {
    for (int i = 1; i < 10000; ++i) {
        const double t = kTwoPi * i / 10000;
        CHECK(junction_equation_derivative(t) > 0);
    }
    // The analytic derivative matches a difference quotient.
    for (double t : {0.5, 2.0, 4.0, 6.0}) {
        const double h = 1e-6;
        const double fd = (junction_equation(t + h) - junction_equation(t - h)) / (2 * h);
        CHECK(junction_equation_derivative(t) == Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("w") {
    const auto r = solve_w(0.5);
    CHECK(r.value == Approx(fz::w_0_5).epsilon(1e-12));
    CHECK(std::abs(r.value - 2.151) < 1e-3);
    CHECK(std::abs(f_w(0.5, r.value)) < 1e-12);
    const double ob = oracle::bisect([](double w) { return f_w(0.5, w); }, 0, kPi);
    CHECK(r.value == Approx(ob).epsilon(1e-12));
    CHECK(solve_w(0.1).value == Approx(fz::w_0_1).epsilon(1e-12));
    CHECK(solve_w(0.3).value == Approx(fz::w_0_3).epsilon(1e-12));
    CHECK(solve_w(0.6).value == Approx(fz::w_0_6).epsilon(1e-12));
    CHECK(std::abs(solve_w(kEllJ - 1e-8).value - fz::theta_J) < 1e-5);
    CHECK_THROWS_AS(solve_w(0.8), DomainError);
    CHECK_THROWS_AS(solve_w(-1), DomainError);
}

TEST_CASE("m") {
    const auto r = solve_m(1);
    CHECK(std::abs(r.value - 2.10) < 1e-2);
    CHECK(r.value == Approx(fz::m_1).epsilon(1e-12));
    const double ob = oracle::bisect([](double m) { return f_m(1, m); }, 2, 2.5);
    CHECK(r.value == Approx(ob).epsilon(1e-12));
    CHECK(std::abs(f_m(1, r.value)) < 1e-12);
    CHECK(solve_m(0.7).value == Approx(fz::m_0_7).epsilon(1e-12));
    CHECK(solve_m(2).value == Approx(fz::m_2).epsilon(1e-12));
    CHECK(solve_m(5).value == Approx(fz::m_5).epsilon(1e-12));
    CHECK(std::abs(solve_m(kEllJ + 1e-8).value - fz::theta_J) < 1e-5);
    CHECK_THROWS_AS(solve_m(0.5), DomainError);
    CHECK_THROWS_AS(solve_m(kEllJ), DomainError);
}

TEST_CASE("n") {
    const auto r = solve_n(1);
    CHECK(std::abs(r.value - 2.50) < 1e-2);
    CHECK(r.value == Approx(fz::n_1).epsilon(1e-11));
    const double ob = oracle::bisect([](double n) { return f_n(1, n); }, 2.3, 2.6);
    CHECK(r.value == Approx(ob).epsilon(1e-11));
    CHECK(std::abs(f_n(1, r.value)) < 1e-10);
    CHECK(solve_n(2).value == Approx(fz::n_2).epsilon(1e-11));
    CHECK(std::abs(solve_n(kEllJ + 1e-8).value - fz::theta_J) < 1e-5);
    CHECK_THROWS_AS(solve_n(0.3), DomainError);
}

TEST_CASE("p") {
    const auto r = solve_p(0.5, kPi);
    CHECK(std::abs(f_p(0.5, kPi, r.value)) < 1e-10);
    CHECK(r.value > 0);
    CHECK(r.value < kPi);
    const double ob = oracle::bisect([](double p) { return f_p(0.5, kPi, p); }, 0, kPi);
    CHECK(r.value == Approx(ob).epsilon(1e-10));

    // Continuity into w at the lower end of the domain.
    const double t2 = fz::theta2_0_5 + 1e-6;
    const double pv = solve_p(0.5, t2).value;
    const double lo = 2.1;  // the radicand is negative below about 2.08 here
    const double ob2 = oracle::bisect([&](double p) { return f_p(0.5, t2, p); }, lo, t2);
    CHECK(pv == Approx(ob2).epsilon(1e-10));
    CHECK(std::abs(pv - fz::w_0_5) < 1e-3);

    CHECK_THROWS_AS(solve_p(0.5, 1.0), DomainError);
    CHECK_THROWS_AS(solve_p(0.5, 5.0), DomainError);
}

TEST_CASE("q") {
    const auto r = solve_q(1, 2.3);
    CHECK(std::abs(f_q(1, 2.3, r.value)) < 1e-10);
    CHECK(r.value < 2.3);
    CHECK(r.value > 0);
    const double ob = oracle::bisect([](double q) { return f_q(1, 2.3, q); }, 0, kTwoPi - 2.3);
    CHECK(r.value == Approx(ob).epsilon(1e-10));
    // q vanishes at theta1 = m
    CHECK(std::abs(solve_q(1, fz::m_1).value) < 1e-9);
    CHECK_THROWS_AS(solve_q(0.5, 2.3), DomainError);
    CHECK_THROWS_AS(solve_q(1, 1.0), DomainError);
}

TEST_CASE("critical angles by regime") {
    auto ca = critical_angles(0.5);
    CHECK(ca.regime == Regime::Small);
    CHECK(ca.theta1 == Approx(fz::w_0_5).epsilon(1e-12));
    CHECK(ca.theta2 == Approx(fz::theta2_0_5).epsilon(1e-12));
    ca = critical_angles(kEllJ);
    CHECK(ca.regime == Regime::Medium);
    CHECK(ca.theta1 == ca.theta2);
    ca = critical_angles(1);
    CHECK(ca.regime == Regime::Large);
    CHECK(ca.theta1 == Approx(fz::m_1).epsilon(1e-12));
    CHECK(ca.theta2 == Approx(fz::n_1).epsilon(1e-11));
    for (double d : {-1e-8, 1e-8}) {
        ca = critical_angles(kEllJ + d);
        CHECK(std::abs(ca.theta1 - fz::theta_J) < 1e-5);
        CHECK(std::abs(ca.theta2 - fz::theta_J) < 1e-5);
    }
}

TEST_CASE("every root satisfies its equation across radii") {
    const auto t0 = std::chrono::steady_clock::now();
    for (double l : {0.1, 0.3, 0.5, kEllJ - 1e-6, kEllJ, kEllJ + 1e-6, 1.0, 2.0, 5.0}) {
        CAPTURE(l);
        const CriticalAngles ca = critical_angles(l);
        if (ca.regime == Regime::Small) CHECK(std::abs(f_w(l, solve_w(l).value)) < 1e-10);
        if (ca.regime == Regime::Large) {
            CHECK(std::abs(f_m(l, solve_m(l).value)) < 1e-10);
            CHECK(std::abs(f_n(l, solve_n(l).value)) < 1e-10);
        }
        for (int i = 0; i < 100; ++i) {
            const double a = ca.theta2 + 1e-9, b = kTwoPi - ca.theta2 - 1e-9;
            const double vt = a + (b - a) * (i + 0.5) / 100;
            CHECK(std::abs(f_p(l, vt, solve_p(l, vt).value)) < 1e-10);
        }
        if (ca.regime == Regime::Large)
            for (int i = 0; i < 100; ++i) {
                const double vt = ca.theta1 + (ca.theta2 - ca.theta1) * (i + 0.5) / 100;
                const double q = solve_q(l, vt).value;
                CHECK(std::abs(f_q(l, vt, q)) < 1e-10);
                CHECK(q < vt);
            }
    }
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
}

TEST_CASE("defining functions change sign exactly once") {
    for (double l : {0.1, 0.3, 0.5, 0.6}) CHECK(sign_changes([l](double w) { return f_w(l, w); }, 0, kTwoPi) == 1);
    CHECK(sign_changes(junction_equation, 1e-4, kTwoPi - 1e-4) == 1);
    for (double l : {0.7, 1.0, 2.0, 5.0}) {
        CAPTURE(l);
        CHECK(sign_changes([l](double m) { return f_m(l, m); }, 0, kTwoPi) == 1);
        // n: only where the radicand is nonnegative, above its negative band
        const double lo = solve_n(l).value - 0.2;
        CHECK(sign_changes([l](double n) { return f_n(l, n); }, lo, kTwoPi, 10000,
                           [l](double n) { return rad_n(l, n) >= 0; }) == 1);
        const CriticalAngles ca = critical_angles(l);
        for (double fr : {0.1, 0.5, 0.9}) {
            const double vt = ca.theta1 + (ca.theta2 - ca.theta1) * fr;
            CHECK(sign_changes([&](double q) { return f_q(l, vt, q); }, 0, kTwoPi - vt) == 1);
        }
    }
    for (double l : {0.3, 1.0, 2.0})
        for (double fr : {0.05, 0.5, 0.95}) {
            const CriticalAngles ca = critical_angles(l);
            const double vt = ca.theta2 + (kTwoPi - 2 * ca.theta2) * fr;
            const double start = oracle::bisect([&](double p) { return rad_p(l, vt, p); }, 0, vt);
            const double lo = rad_p(l, vt, 0) >= 0 ? 0 : start;
            CAPTURE(l);
            CAPTURE(vt);
            CHECK(sign_changes([&](double p) { return f_p(l, vt, p); }, lo, vt, 10000,
                               [&](double p) { return rad_p(l, vt, p) >= 0; }) == 1);
        }
}
