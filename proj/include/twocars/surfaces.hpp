#pragma once

// Closed-form parametrizations of the emanating (not yet trimmed) barrier
// pieces, and their normals built by composing retrograde costate flows.
// No domain checks: these are valid for any parameter values.

#include "twocars/kinematics.hpp"

namespace twocars::surfaces {

struct Point {
    State z;
    Costate nu;
};

State bup0(double ell, double phi);
Costate bup0_normal(double phi);
State bup(double ell, int side, double theta_f);
Costate bup_normal(int side, double theta_f);

// Third components are (1 - side) pi + side vt for P and PL,
// (1 + side) pi - side vt for UL, TS and TD.
State p(double ell, int side, double tau, double vt);
State pl(double ell, int side, double vt);
State ul(double ell, int side, double vt);
State ts(double ell, int side, double tau, double vt);
State td(double ell, int side, double tau, double vt);

// The same pieces reached by flowing from the capture circle; each returns
// the state together with its transported normal.
Point p_flow(double ell, int side, double tau, double vt);
Point pl_flow(double ell, int side, double vt);
Point ul_flow(double ell, int side, double vt);
Point ts_flow(double ell, int side, double tau, double vt);
Point td_flow(double ell, int side, double tau, double vt);

}  // namespace twocars::surfaces
