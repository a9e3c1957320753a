#include "twocars/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "twocars/errors.hpp"

namespace twocars {

double canonical_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi - 1e-15) r = 0.0;
    return r;
}

double angle_diff(double a, double b) {
    double d = std::remainder(a - b, kTwoPi);
    return d == -kPi ? kPi : d;
}

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
    }
    return std::sin(x) / x;
}

double state_distance(const State& a, const State& b) {
    return std::max({std::abs(a.x() - b.x()), std::abs(a.y() - b.y()),
                     std::abs(angle_diff(a.theta(), b.theta()))});
}

double Costate::norm() const { return std::sqrt(nu_x * nu_x + nu_y * nu_y + nu_theta * nu_theta); }

ControlPair::ControlPair(double u, double v) : u_(u), v_(v) {
    if (!(u >= -1.0 && u <= 1.0) || !(v >= -1.0 && v <= 1.0))
        throw DomainError("control pair outside [-1, 1]");
}

namespace {
unsigned bit_of(int value) {
    if (value < -1 || value > 1) throw DomainError("control value must be -1, 0 or +1");
    return 1u << (value + 1);
}
int sign_with_eps(double s) { return s > kSwitchEps ? 1 : (s < -kSwitchEps ? -1 : 0); }
}  // namespace

ControlSet ControlSet::single(int value) { return ControlSet(bit_of(value)); }
ControlSet ControlSet::bangs() { return ControlSet(0b101u); }
ControlSet ControlSet::any() { return ControlSet(0b111u); }

bool ControlSet::contains(int value) const {
    return value >= -1 && value <= 1 && (mask_ & bit_of(value)) != 0;
}

bool ControlSet::is_single() const { return mask_ == 1u || mask_ == 2u || mask_ == 4u; }

int ControlSet::value() const { return mask_ == 1u ? -1 : (mask_ == 2u ? 0 : 1); }

ControlSet ControlSet::negated() const {
    unsigned m = mask_ & 2u;
    if (mask_ & 1u) m |= 4u;
    if (mask_ & 4u) m |= 1u;
    return ControlSet(m);
}

std::string ControlSet::to_string() const {
    std::string s = "{";
    const char* names[] = {"-1", "0", "+1"};
    for (int i = 0; i < 3; ++i) {
        if (mask_ & (1u << i)) {
            if (s.size() > 1) s += ',';
            s += names[i];
        }
    }
    return s + "}";
}

Velocity dynamics_rhs(const State& z, const ControlPair& c) {
    const double u = c.u(), v = c.v();
    return {-u * z.y() + std::sin(z.theta()), -1.0 + u * z.x() + std::cos(z.theta()), v - u};
}

Costate adjoint_rhs(const State& z, const Costate& nu, const ControlPair& c) {
    const double u = c.u();
    return {-u * nu.nu_y, u * nu.nu_x, -nu.nu_x * std::cos(z.theta()) + nu.nu_y * std::sin(z.theta())};
}

State flow_state(double tau, const State& zt, const ControlPair& c) {
    const double u = c.u(), v = c.v();
    const double cu = std::cos(u * tau), su = std::sin(u * tau);
    const double a = zt.theta() + (u - 0.5 * v) * tau;
    const double sv = tau * sinc(0.5 * v * tau);
    const double h = sinc(0.5 * u * tau);
    const double x = zt.x() * cu + zt.y() * su + 0.5 * u * tau * tau * h * h - sv * std::sin(a);
    const double y = zt.y() * cu - zt.x() * su + tau * sinc(u * tau) - sv * std::cos(a);
    return {x, y, zt.theta() + (u - v) * tau};
}

Costate flow_costate(double tau, const State& zt, const Costate& n, const ControlPair& c) {
    const double u = c.u(), v = c.v();
    const double cu = std::cos(u * tau), su = std::sin(u * tau);
    const double b = zt.theta() - 0.5 * v * tau;
    return {n.nu_x * cu + n.nu_y * su, n.nu_y * cu - n.nu_x * su,
            n.nu_theta + tau * sinc(0.5 * v * tau) * (n.nu_x * std::cos(b) - n.nu_y * std::sin(b))};
}

SwitchValues switch_values(const State& z, const Costate& nu) {
    return {z.y() * nu.nu_x - z.x() * nu.nu_y + nu.nu_theta, nu.nu_theta};
}

CandidateControls candidate_controls(const State& z, const Costate& nu) {
    if (nu.is_zero()) throw DomainError("costate must be nonzero");
    const SwitchValues s = switch_values(z, nu);
    const double st = std::sin(z.theta()), ct = std::cos(z.theta());

    ControlSet u = ControlSet::any();
    if (int k = sign_with_eps(s.s_p)) {
        u = ControlSet::single(k);
    } else if (int kx = sign_with_eps(nu.nu_x)) {
        u = ControlSet::single(kx);
    } else if (nu.nu_y < -kSwitchEps) {
        u = ControlSet::single(0);
    }

    ControlSet v = ControlSet::any();
    if (int k = sign_with_eps(s.s_e)) {
        v = ControlSet::single(k);
    } else if (int kc = sign_with_eps(nu.nu_x * ct - nu.nu_y * st)) {
        v = ControlSet::single(kc);
    } else if (nu.nu_x * st < -nu.nu_y * ct - kSwitchEps) {
        v = ControlSet::single(0);
    }
    return {u, v};
}

double radial_distance(const State& z) { return std::hypot(z.x(), z.y()); }

State reflect(const State& z) { return {-z.x(), z.y(), kTwoPi - z.theta()}; }

}  // namespace twocars
