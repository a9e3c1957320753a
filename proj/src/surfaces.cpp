#include "twocars/surfaces.hpp"

#include <cmath>

namespace twocars::surfaces {

State bup0(double ell, double phi) { return {ell * std::sin(phi), ell * std::cos(phi), 0.0}; }

Costate bup0_normal(double phi) { return {std::sin(phi), std::cos(phi), 0.0}; }

State bup(double ell, int side, double theta_f) {
    return {-side * ell * std::sin(0.5 * theta_f), -side * ell * std::cos(0.5 * theta_f), theta_f};
}

Costate bup_normal(int side, double theta_f) {
    return {-side * std::sin(0.5 * theta_f), -side * std::cos(0.5 * theta_f), 0.0};
}

State p(double ell, int side, double tau, double vt) {
    const double x = -side * (ell * std::sin(0.5 * vt) + std::cos(vt) - std::cos(tau + vt) + 1.0 - std::cos(tau));
    const double y = -ell * std::cos(0.5 * vt) + std::sin(vt) - std::sin(tau + vt) + std::sin(tau);
    return {x, y, (1 - side) * kPi + side * vt};
}

State pl(double ell, int side, double vt) {
    const double h = 0.5 * vt;
    const double x = -side * (ell * std::sin(h) + 2.0 * std::cos(h) + 1.0 + std::cos(vt));
    const double y = -ell * std::cos(h) + 2.0 * std::sin(h) + std::sin(vt);
    return {x, y, (1 - side) * kPi + side * vt};
}

State ul(double ell, int side, double vt) {
    return {side * (1.0 - std::cos(vt)), ell + vt - std::sin(vt), (1 + side) * kPi - side * vt};
}

State ts(double ell, int side, double tau, double vt) {
    const double r = ell + vt, d = tau - vt;
    return {side * (r * std::sin(d) + 1.0 - std::cos(vt)), r * std::cos(d) - std::sin(vt),
            (1 + side) * kPi - side * vt};
}

State td(double ell, int side, double tau, double vt) {
    const double a = ell + 2.0 * tau - vt, d = tau - vt;
    return {side * (a * std::sin(d) + 2.0 * std::cos(d) - 1.0 - std::cos(vt)),
            a * std::cos(d) - 2.0 * std::sin(d) - std::sin(vt), (1 + side) * kPi - side * vt};
}

namespace {
Point flow_both(double tau, const State& z, const Costate& nu, const ControlPair& c) {
    return {flow_state(tau, z, c), flow_costate(tau, z, nu, c)};
}
}  // namespace

Point p_flow(double ell, int side, double tau, double vt) {
    const double theta_f = (1 - side) * kPi + side * vt + 2.0 * side * tau;
    return flow_both(tau, bup(ell, side, theta_f), bup_normal(side, theta_f), ControlPair(-side, side));
}

Point pl_flow(double ell, int side, double vt) {
    return flow_both(kPi - 0.5 * vt, bup0(ell, 0.0), bup0_normal(0.0), ControlPair(-side, side));
}

Point ul_flow(double ell, int side, double vt) {
    return flow_both(vt, bup0(ell, 0.0), bup0_normal(0.0), ControlPair(0, side));
}

Point ts_flow(double ell, int side, double tau, double vt) {
    const Point u = ul_flow(ell, side, vt);
    return flow_both(tau - vt, u.z, u.nu, ControlPair(side, side));
}

Point td_flow(double ell, int side, double tau, double vt) {
    const Point u = ul_flow(ell, side, 2.0 * tau - vt);
    return flow_both(vt - tau, u.z, u.nu, ControlPair(-side, side));
}

}  // namespace twocars::surfaces
