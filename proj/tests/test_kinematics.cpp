#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "twocars/errors.hpp"
#include "twocars/kinematics.hpp"

using namespace twocars;
using doctest::Approx;

namespace {
void check_state(const State& z, double x, double y, double th, double eps = 1e-12) {
    CHECK(std::abs(z.x() - x) < eps);
    CHECK(std::abs(z.y() - y) < eps);
    CHECK(std::abs(angle_diff(z.theta(), th)) < eps);
}
}  // namespace

TEST_CASE("angles are stored canonically") {
    CHECK(State(0, 0, -0.5).theta() == Approx(kTwoPi - 0.5));
    CHECK(State(0, 0, 7.0).theta() == Approx(7.0 - kTwoPi));
    CHECK(State(0, 0, kTwoPi).theta() == 0.0);
    CHECK(State(0, 0, std::nextafter(kTwoPi, 0.0)).theta() == 0.0);
    CHECK(canonical_angle(kTwoPi - 1e-13) > 6.28);
}

TEST_CASE("dynamics_rhs") {
    auto v = dynamics_rhs(State(0, 1, 0), ControlPair(0, 0));
    CHECK(v.dx == 0.0);
    CHECK(v.dy == 0.0);
    CHECK(v.dtheta == 0.0);
    v = dynamics_rhs(State(1, 0, kPi / 2), ControlPair(1, -1));
    CHECK(v.dx == Approx(1));
    CHECK(std::abs(v.dy) < 1e-15);
    CHECK(v.dtheta == -2);
    v = dynamics_rhs(State(0, 0.6, kPi), ControlPair(0, 0));
    CHECK(std::abs(v.dx) < 1e-15);
    CHECK(v.dy == Approx(-2));
}

TEST_CASE("control types validate their ranges") {
    CHECK_THROWS_AS(ControlPair(1.5, 0), DomainError);
    CHECK_THROWS_AS(ControlPair(0, -1.01), DomainError);
    CHECK(ControlSet::bangs().to_string() == "{-1,+1}");
    CHECK(ControlSet::any().to_string() == "{-1,0,+1}");
    CHECK(ControlSet::single(-1).negated() == ControlSet::single(1));
    CHECK(ControlSet::single(0).negated() == ControlSet::single(0));
    CHECK(ControlSet::bangs().negated() == ControlSet::bangs());
    CHECK_FALSE(ControlSet::bangs().contains(0));
}

TEST_CASE("flow_state examples") {
    const State z(0.3, -1.2, 2.0);
    check_state(flow_state(0.0, z, ControlPair(1, -1)), 0.3, -1.2, 2.0);
    check_state(flow_state(1.0, State(0, 1, kPi), ControlPair(0, 0)), 0, 3, kPi);
    const State r = flow_state(kPi / 2, State(0, 1, 0), ControlPair(1, 1));
    CHECK(radial_distance(r) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("flow_costate examples") {
    const State z(0.5, 0.5, 1.0);
    const Costate n{0.2, -0.7, 0.4};
    Costate c = flow_costate(0.0, z, n, ControlPair(-1, 1));
    CHECK(c.nu_x == n.nu_x);
    CHECK(c.nu_y == n.nu_y);
    CHECK(c.nu_theta == n.nu_theta);

    // Universal line normal at tau = pi/2
    c = flow_costate(kPi / 2, State(0, 0.5, 0), Costate{0, 1, 0}, ControlPair(0, 1));
    CHECK(std::abs(c.nu_x) < 1e-15);
    CHECK(c.nu_y == Approx(1));
    CHECK(c.nu_theta == Approx(1));

    c = flow_costate(3.7, z, n, ControlPair(0, -1));
    CHECK(c.nu_x == n.nu_x);
    CHECK(c.nu_y == n.nu_y);
}

TEST_CASE("switch values and candidate controls") {
    auto s = switch_values(State(0, 1, 0), Costate{0, 0, 1});
    CHECK(s.s_p == 1.0);
    CHECK(s.s_e == 1.0);
    s = switch_values(State(1, 2, kPi / 3), Costate{-0.5, 0.2, 0.3});
    CHECK(s.s_p == Approx(-0.9));
    CHECK(s.s_e == Approx(0.3));

    auto cc = candidate_controls(State(0, 1, 0), Costate{0, 0, 1});
    CHECK(cc.u_set == ControlSet::single(1));
    CHECK(cc.v_set == ControlSet::single(1));
    cc = candidate_controls(State(1, 2, kPi / 3), Costate{-0.5, 0.2, 0.3});
    CHECK(cc.u_set == ControlSet::single(-1));
    CHECK(cc.v_set == ControlSet::single(1));

    const double ell = 0.5;
    const State ul(1 - std::cos(kPi / 2), ell + kPi / 2 - 1, 3 * kPi / 2);
    cc = candidate_controls(ul, Costate{0, 1, 1});
    CHECK(cc.u_set == ControlSet::any());
    CHECK(cc.v_set == ControlSet::single(1));

    // Second and third branches of each player.
    cc = candidate_controls(State(0, 0, 0), Costate{-1, 0, 0});
    CHECK(cc.u_set == ControlSet::single(-1));
    CHECK(cc.v_set == ControlSet::single(-1));
    cc = candidate_controls(State(0, 0, kPi), Costate{0, -1, 0});
    CHECK(cc.u_set == ControlSet::single(0));
    CHECK(cc.v_set == ControlSet::any());
    cc = candidate_controls(State(0, 0, 0), Costate{0, -1, 0});
    CHECK(cc.v_set == ControlSet::single(0));
    cc = candidate_controls(State(0, 0, kPi / 2), Costate{0, 1, 0});
    CHECK(cc.u_set == ControlSet::any());
    CHECK(cc.v_set == ControlSet::single(-1));
    CHECK_THROWS_AS(candidate_controls(State(0, 0, 0), Costate{}), DomainError);
}

TEST_CASE("radial distance and reflection") {
    CHECK(radial_distance(State(3, 4, 1)) == 5.0);
    CHECK(radial_distance(State(0, 0.7, 0)) == 0.7);
    const State r = reflect(State(1, 2, kPi / 3));
    CHECK(r.x() == -1);
    CHECK(r.y() == 2);
    CHECK(r.theta() == Approx(5 * kPi / 3));
    CHECK(reflect(State(0, 3, kPi)) == State(0, 3, kPi));
    const State z(0.4, -1.1, 4.0);
    CHECK(state_distance(reflect(reflect(z)), z) < 1e-15);
    for (double ell : {0.3, 1.0, 2.5})
        for (double tau : {0.1, 1.0, 4.0})
            CHECK(radial_distance(flow_state(tau, State(0, ell, 0), ControlPair(1, 1))) ==
                  Approx(ell).epsilon(1e-13));
}

TEST_CASE("closed-form flows match numerical integration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-2, 2), ang(0, kTwoPi), tau(0.01, kTwoPi);
    std::uniform_int_distribution<int> ctl(-1, 1);
    double es = 0, en = 0;
    for (int i = 0; i < 100; ++i) {
        const State z(pos(rng), pos(rng), ang(rng));
        const Costate n{pos(rng), pos(rng), pos(rng)};
        const int u = ctl(rng), v = ctl(rng);
        const double t = tau(rng);
        const auto ref = oracle::backward({z.x(), z.y(), z.theta(), n.nu_x, n.nu_y, n.nu_theta}, u, v, t);
        const State s = flow_state(t, z, ControlPair(u, v));
        const Costate c = flow_costate(t, z, n, ControlPair(u, v));
        es = std::max({es, std::abs(s.x() - ref[0]), std::abs(s.y() - ref[1]),
                       std::abs(angle_diff(s.theta(), ref[2]))});
        en = std::max({en, std::abs(c.nu_x - ref[3]), std::abs(c.nu_y - ref[4]), std::abs(c.nu_theta - ref[5])});
    }
    CHECK(es < 1e-6);
    CHECK(en < 1e-6);
}

TEST_CASE("switch function derivative equals -nu_x in forward time") {
    const State zt(0.4, 1.3, 0.7);
    const Costate nt{0.6, -0.3, 0.2};
    for (int u : {-1, 0, 1})
        for (int v : {-1, 0, 1}) {
            const ControlPair c(u, v);
            for (double tau : {0.3, 1.1, 2.6}) {
                const double h = 1e-5;
                auto sp = [&](double t) { return switch_values(flow_state(t, zt, c), flow_costate(t, zt, nt, c)).s_p; };
                // tau runs backward, so d/dt = -d/dtau.
                const double dsdt = -(sp(tau + h) - sp(tau - h)) / (2 * h);
                CHECK(std::abs(dsdt + flow_costate(tau, zt, nt, c).nu_x) < 1e-6);
            }
        }
}

TEST_CASE("flow is continuous through u = 0 and v = 0") {
    const State z(0.3, 0.9, 1.4);
    for (double eps : {1e-3, 1e-6, 1e-9}) {
        CHECK(state_distance(flow_state(2.0, z, ControlPair(eps, 1)), flow_state(2.0, z, ControlPair(0, 1))) < 10 * eps);
        CHECK(state_distance(flow_state(2.0, z, ControlPair(1, eps)), flow_state(2.0, z, ControlPair(1, 0))) < 10 * eps);
    }
    CHECK(sinc(0.0) == 1.0);
    CHECK(sinc(5e-5) == Approx(std::sin(5e-5) / 5e-5).epsilon(1e-15));
}

TEST_CASE("flow is equivariant under the reflection") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-2, 2), a(0, kTwoPi);
    for (int i = 0; i < 50; ++i) {
        const State z(d(rng), d(rng), a(rng));
        const double u = d(rng) / 2, v = d(rng) / 2, t = a(rng);
        const State lhs = flow_state(t, reflect(z), ControlPair(-u, -v));
        const State rhs = reflect(flow_state(t, z, ControlPair(u, v)));
        CHECK(state_distance(lhs, rhs) < 1e-12);
    }
}
