#pragma once

#include <array>
#include <numbers>
#include <string>

namespace twocars {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Zero band for the switch-function sign tests.
inline constexpr double kSwitchEps = 1e-9;

// Reduce an angle to [0, 2pi); values within 1e-15 of 2pi fold to 0.
double canonical_angle(double a);

// Signed difference a - b reduced to (-pi, pi].
double angle_diff(double a, double b);

// sin(x)/x, with a Taylor series near zero.
double sinc(double x);

// Reduced configuration of the pursuer-evader pair, in the pursuer frame.
class State {
public:
    State() = default;
    State(double x, double y, double theta) : x_(x), y_(y), theta_(canonical_angle(theta)) {}

    double x() const { return x_; }
    double y() const { return y_; }
    double theta() const { return theta_; }

    bool operator==(const State&) const = default;

private:
    double x_ = 0.0;
    double y_ = 0.0;
    double theta_ = 0.0;
};

// Largest componentwise difference, with the angle compared on the circle.
double state_distance(const State& a, const State& b);

struct Costate {
    double nu_x = 0.0;
    double nu_y = 0.0;
    double nu_theta = 0.0;

    bool is_zero() const { return nu_x == 0.0 && nu_y == 0.0 && nu_theta == 0.0; }
    double norm() const;
};

// Turn rates of pursuer (u) and evader (v), each in [-1, 1].
class ControlPair {
public:
    ControlPair(double u, double v);
    double u() const { return u_; }
    double v() const { return v_; }

private:
    double u_;
    double v_;
};

// Admissible control values for one player: a subset of {-1, 0, +1}.
class ControlSet {
public:
    static ControlSet single(int value);
    static ControlSet bangs();  // {-1, +1}
    static ControlSet any();    // {-1, 0, +1}

    bool contains(int value) const;
    bool is_single() const;
    // Only meaningful when is_single().
    int value() const;
    ControlSet negated() const;
    std::string to_string() const;  // e.g. "{-1,+1}"

    bool operator==(const ControlSet&) const = default;

private:
    explicit ControlSet(unsigned mask) : mask_(mask) {}
    unsigned mask_;  // bit 0: -1, bit 1: 0, bit 2: +1
};

struct Velocity {
    double dx, dy, dtheta;
};

struct SwitchValues {
    double s_p;
    double s_e;
};

struct CandidateControls {
    ControlSet u_set;
    ControlSet v_set;
};

Velocity dynamics_rhs(const State& z, const ControlPair& c);

// Adjoint right-hand side; depends only on theta of the state.
Costate adjoint_rhs(const State& z, const Costate& nu, const ControlPair& c);

// State at retrograde time tau before z_tilde under constant controls.
State flow_state(double tau, const State& z_tilde, const ControlPair& c);

// Costate at retrograde time tau, given terminal state and costate.
Costate flow_costate(double tau, const State& z_tilde, const Costate& nu_tilde, const ControlPair& c);

SwitchValues switch_values(const State& z, const Costate& nu);

CandidateControls candidate_controls(const State& z, const Costate& nu);

double radial_distance(const State& z);

State reflect(const State& z);

}  // namespace twocars
