#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twocars/kinematics.hpp"
#include "twocars/roots.hpp"

namespace twocars {

enum class Family { BUP0, BUPside, P, PL, UL, TS, TD, DL };

const char* family_name(Family f);
std::optional<Family> parse_family(const std::string& name);
bool is_sided(Family f);

struct PieceId {
    Family family;
    int side;  // -1 or +1; 0 for BUP0 and DL

    PieceId(Family f, int s = 0);
    std::string to_string() const;  // e.g. "TS+1", "DL"
    PieceId mirrored() const;
    bool operator==(const PieceId&) const = default;
};

// tau is the retrograde time for surfaces; single-parameter pieces use
// only vartheta (PL, UL: vartheta; BUPside: theta_f; BUP0: phi; DL: theta).
struct SurfaceParams {
    double tau = 0.0;
    double vartheta = 0.0;
};

struct BarrierModel {
    double ell;
    Regime regime;
    double theta_J;
    double ell_J;
    double theta1;
    double theta2;
    double theta12;
    double theta21;
    // w for small; m and n for large; all theta_J for medium.
    double w;
    double m;
    double n;
    double tol;
};

BarrierModel build_model(double ell, double tol = kDefaultTol);

State eval_piece(const BarrierModel& model, const PieceId& piece, const SurfaceParams& params);
Costate eval_piece_normal(const BarrierModel& model, const PieceId& piece, const SurfaceParams& params);

// Upper retrograde-time bound of the valid part, for family P, TS or TD.
double tau_max(const BarrierModel& model, Family family, double vt);
// Lower retrograde-time bound: 0 for P, vartheta for TS, vartheta/2 for TD.
double tau_min(Family family, double vt);

State dispersal_point(const BarrierModel& model, double theta);

// Which surface the slice variable belongs to, given a side and slice angle.
// P, PL: theta for side +1, 2pi - theta for side -1; UL, TS, TD: reversed.
double slice_vartheta(Family family, int side, double theta);

enum class Intersection { PxTS, TDxTD, PxTD, TSxTD };

const char* intersection_name(Intersection k);

struct IntersectionParams {
    double tau;
    double tau_prime;
};

// For side s the crossing surfaces are:
//   PxTS : P^s(tau, vt)     and TS^-s(tau', vt)
//   TDxTD: TD^-s(tau, vt)   and TD^s(tau', 2pi - vt)
//   PxTD : P^s(tau, vt)     and TD^-s(tau', vt)
//   TSxTD: TS^-s(tau, vt)   and TD^s(tau', 2pi - vt)
// The parameters do not depend on s.
IntersectionParams intersection_params(const BarrierModel& model, Intersection kind, double vt);

struct IntersectionPieces {
    PieceId first;
    SurfaceParams first_params;
    PieceId second;
    SurfaceParams second_params;
};
IntersectionPieces intersection_pieces(const BarrierModel& model, Intersection kind, int side, double vt);

struct SlicePoint {
    State z;
    PieceId piece;
    SurfaceParams params;
    std::optional<Costate> normal;
};

// Interior inset used when sampling open parameter intervals.
inline constexpr double kSampleInset = 1e-9;

std::vector<SlicePoint> sample_slice(const BarrierModel& model, double theta, int n);

}  // namespace twocars
