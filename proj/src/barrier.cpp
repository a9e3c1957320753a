#include "twocars/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "twocars/errors.hpp"
#include "twocars/surfaces.hpp"

namespace twocars {

namespace {

constexpr double kSlack = 1e-12;
constexpr double kJunctionTol = 1e-8;

double acos_c(double a) { return std::acos(std::clamp(a, -1.0, 1.0)); }
double asin_c(double a) { return std::asin(std::clamp(a, -1.0, 1.0)); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw OutOfDomain(what);
}

void require_range(double v, double lo, double hi, const char* name) {
    require(v >= lo - kSlack, std::string(name) + " = " + fmt(v) + " below lower bound " + fmt(lo));
    require(v <= hi + kSlack, std::string(name) + " = " + fmt(v) + " above upper bound " + fmt(hi));
}

// tau_max branch expressions; each is valid on its own interval only.
// acos(-1 + d) without the sqrt-type loss near d = 0.
double acos_near_minus_one(double d) {
    if (d <= 0.0) return kPi;
    if (d >= 1.0) return acos_c(d - 1.0);
    return kPi - 2.0 * std::asin(std::sqrt(0.5 * d));
}

// Both P branches below meet their neighbour where the acos argument is
// exactly -1, so the argument is formed as -1 + d with d cancellation-free.
double p_branch1(const BarrierModel& m, double vt) {
    const double l = m.ell;
    const double b = 2.0 + 2.0 * std::cos(0.5 * vt);
    const double g = m_equation(l, vt);
    const double root = std::sqrt(clamp_radicand(b * b + g));
    double d = -g / (2.0 * (b + root));
    if (std::abs(g) <= 64.0 * 2.2e-16 * (l + vt) * (l + vt)) d = 0.0;
    return -0.5 * vt + acos_near_minus_one(d);
}

// The closed form of theta2 makes the argument 2(cos(vt/2) - cos(theta2/2)) - 1.
double p_branch2(const BarrierModel& m, double vt) {
    const double d = -4.0 * std::sin(0.25 * (vt + m.theta2)) * std::sin(0.25 * (vt - m.theta2));
    return acos_near_minus_one(d) - 0.5 * vt;
}

double p_branch3(double vt) { return kPi - 0.5 * vt; }

double ts_branch1(const BarrierModel& m, double vt) {
    return 0.5 * vt + acos_c((2.0 * std::sin(0.5 * vt) - m.ell) / (m.ell + vt));
}

double ts_branch2(const BarrierModel& m, double vt) {
    const double q = detail::q_root(m.ell, vt, m.tol).value;
    const double a = m.ell + vt, b = m.ell + q;
    return kPi - asin_c((a * a - b * b) / (4.0 * a));
}

double td_branch3(const BarrierModel& m, double vt) {
    return 0.5 * (detail::p_root(m.ell, vt, m.tol).value + vt);
}

double td_branch4(const BarrierModel& m, double vt) {
    return 0.5 * (detail::q_root(m.ell, kTwoPi - vt, m.tol).value + vt);
}

void check_junction(const char* what, double a, double b) {
    if (std::abs(a - b) > kJunctionTol)
        throw DomainError(std::string("tau_max junction mismatch for ") + what + ": " + fmt(a) + " vs " + fmt(b));
}

struct Range {
    double lo, hi;
};

Range vt_range(const BarrierModel& m, Family f) {
    switch (f) {
        case Family::P: return {0.0, kTwoPi};
        case Family::TS: return {0.0, m.theta12};
        case Family::TD: return {0.0, kTwoPi - m.theta21};
        case Family::PL: return {m.theta21, kTwoPi};
        case Family::UL: return {0.0, m.theta12};
        case Family::BUPside: return {0.0, kTwoPi};
        default: return {-1e300, 1e300};
    }
}

void validate(const BarrierModel& m, const PieceId& piece, const SurfaceParams& sp) {
    const Family f = piece.family;
    if (f == Family::BUP0) return;
    if (f == Family::DL) {
        require(sp.vartheta > 0.0 && sp.vartheta < kTwoPi, "dispersal angle must lie in (0, 2pi)");
        return;
    }
    const Range r = vt_range(m, f);
    require_range(sp.vartheta, r.lo, r.hi, "vartheta");
    if (f == Family::P || f == Family::TS || f == Family::TD)
        require_range(sp.tau, tau_min(f, sp.vartheta), tau_max(m, f, sp.vartheta), "tau");
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::BUP0: return "BUP0";
        case Family::BUPside: return "BUP";
        case Family::P: return "P";
        case Family::PL: return "PL";
        case Family::UL: return "UL";
        case Family::TS: return "TS";
        case Family::TD: return "TD";
        case Family::DL: return "DL";
    }
    return "?";
}

std::optional<Family> parse_family(const std::string& name) {
    for (Family f : {Family::BUP0, Family::BUPside, Family::P, Family::PL, Family::UL, Family::TS, Family::TD,
                     Family::DL})
        if (name == family_name(f)) return f;
    return std::nullopt;
}

bool is_sided(Family f) { return f != Family::BUP0 && f != Family::DL; }

PieceId::PieceId(Family f, int s) : family(f), side(is_sided(f) ? s : 0) {
    if (is_sided(f) && s != 1 && s != -1) throw DomainError("side must be -1 or +1");
}

std::string PieceId::to_string() const {
    std::string s = family_name(family);
    if (side != 0) s += side > 0 ? "+1" : "-1";
    return s;
}

PieceId PieceId::mirrored() const { return PieceId(family, -side); }

BarrierModel build_model(double ell, double tol) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const CriticalAngles ca = critical_angles(ell, tol);
    const JunctionConstants jc = junction_constants();
    BarrierModel m{};
    m.ell = ell;
    m.regime = ca.regime;
    m.theta_J = jc.theta_J;
    m.ell_J = jc.ell_J;
    m.theta1 = ca.theta1;
    m.theta2 = ca.theta2;
    const bool large = ca.regime == Regime::Large;
    m.theta12 = large ? ca.theta2 : ca.theta1;
    m.theta21 = large ? ca.theta1 : ca.theta2;
    m.w = ca.w;
    m.m = ca.m;
    m.n = ca.n;
    m.tol = tol;

    const double t1 = m.theta1, t2 = m.theta2;
    if (large) {
        check_junction("P at theta1", p_branch1(m, t1), p_branch3(t1));
        check_junction("TS at theta1", ts_branch1(m, t1), ts_branch2(m, t1));
        check_junction("TD at theta2", t2, td_branch3(m, t2));
        check_junction("TD at 2pi-theta2", td_branch3(m, kTwoPi - t2), td_branch4(m, kTwoPi - t2));
    } else {
        check_junction("P at theta1", p_branch1(m, t1), p_branch2(m, t1));
        check_junction("P at theta2", p_branch2(m, t2), p_branch3(t2));
        check_junction("TD at theta2", 0.5 * (m.w + t2), td_branch3(m, t2));
    }
    return m;
}

double tau_min(Family family, double vt) {
    switch (family) {
        case Family::P: return 0.0;
        case Family::TS: return vt;
        case Family::TD: return 0.5 * vt;
        default: throw Unsupported("tau range is defined only for P, TS and TD");
    }
}

double tau_max(const BarrierModel& m, Family family, double vt) {
    switch (family) {
        case Family::P:
            require_range(vt, 0.0, kTwoPi, "vartheta");
            if (vt <= m.theta1) return p_branch1(m, vt);
            if (vt <= m.theta21) return p_branch2(m, vt);
            return p_branch3(vt);
        case Family::TS:
            require_range(vt, 0.0, m.theta12, "vartheta");
            if (vt <= m.theta1) return ts_branch1(m, vt);
            return ts_branch2(m, vt);
        case Family::TD:
            require_range(vt, 0.0, kTwoPi - m.theta21, "vartheta");
            if (vt <= m.theta12) return vt;
            if (m.regime != Regime::Large && vt <= m.theta2) return 0.5 * (m.w + vt);
            if (vt <= kTwoPi - m.theta2) return td_branch3(m, vt);
            return td_branch4(m, vt);
        default:
            throw Unsupported(std::string("tau_max is not defined for family ") + family_name(family));
    }
}

State dispersal_point(const BarrierModel& m, double theta) {
    require(theta > 0.0 && theta < kTwoPi, "dispersal angle must lie in (0, 2pi)");
    const double vt = kPi - std::abs(kPi - theta);
    const int gamma = theta <= kPi ? -1 : 1;
    if (vt >= m.theta12) return surfaces::td(m.ell, gamma, tau_max(m, Family::TD, vt), vt);
    return surfaces::ts(m.ell, gamma, tau_max(m, Family::TS, vt), vt);
}

double slice_vartheta(Family family, int side, double theta) {
    const bool direct = family == Family::P || family == Family::PL || family == Family::BUPside;
    return (side > 0) == direct ? theta : kTwoPi - theta;
}

State eval_piece(const BarrierModel& m, const PieceId& piece, const SurfaceParams& sp) {
    validate(m, piece, sp);
    const int s = piece.side;
    switch (piece.family) {
        case Family::BUP0: return surfaces::bup0(m.ell, sp.vartheta);
        case Family::BUPside: return surfaces::bup(m.ell, s, sp.vartheta);
        case Family::P: return surfaces::p(m.ell, s, sp.tau, sp.vartheta);
        case Family::PL: return surfaces::pl(m.ell, s, sp.vartheta);
        case Family::UL: return surfaces::ul(m.ell, s, sp.vartheta);
        case Family::TS: return surfaces::ts(m.ell, s, sp.tau, sp.vartheta);
        case Family::TD: return surfaces::td(m.ell, s, sp.tau, sp.vartheta);
        case Family::DL: return dispersal_point(m, sp.vartheta);
    }
    throw Unsupported("unknown piece");
}

Costate eval_piece_normal(const BarrierModel& m, const PieceId& piece, const SurfaceParams& sp) {
    if (piece.family == Family::DL) throw Unsupported("the dispersal line has no single normal");
    validate(m, piece, sp);
    const int s = piece.side;
    switch (piece.family) {
        case Family::BUP0: return surfaces::bup0_normal(sp.vartheta);
        case Family::BUPside: return surfaces::bup_normal(s, sp.vartheta);
        case Family::P: return surfaces::p_flow(m.ell, s, sp.tau, sp.vartheta).nu;
        case Family::PL: return surfaces::pl_flow(m.ell, s, sp.vartheta).nu;
        case Family::UL: return surfaces::ul_flow(m.ell, s, sp.vartheta).nu;
        case Family::TS: return surfaces::ts_flow(m.ell, s, sp.tau, sp.vartheta).nu;
        case Family::TD: return surfaces::td_flow(m.ell, s, sp.tau, sp.vartheta).nu;
        default: break;
    }
    throw Unsupported("unknown piece");
}

const char* intersection_name(Intersection k) {
    switch (k) {
        case Intersection::PxTS: return "PxTS";
        case Intersection::TDxTD: return "TDxTD";
        case Intersection::PxTD: return "PxTD";
        case Intersection::TSxTD: return "TSxTD";
    }
    return "?";
}

IntersectionParams intersection_params(const BarrierModel& m, Intersection kind, double vt) {
    const double l = m.ell;
    switch (kind) {
        case Intersection::PxTS: {
            require_range(vt, 0.0, m.theta1, "vartheta");
            return {p_branch1(m, vt), ts_branch1(m, vt)};
        }
        case Intersection::TDxTD: {
            require_range(vt, m.theta2, kTwoPi - m.theta2, "vartheta");
            const double p = detail::p_root(l, vt, m.tol).value;
            const XiEta xe = xi_eta(l, p);
            const double d = xe.xi - 4.0 * std::cos(0.5 * vt);
            const double r = clamp_radicand(d * d + xe.eta * xe.eta - 4.0);
            return {0.5 * (vt + p), kPi - 0.5 * (l + vt) + 0.5 * std::sqrt(r)};
        }
        case Intersection::PxTD: {
            if (m.regime != Regime::Small) throw RegimeMismatch("PxTD intersection exists only for ell < ell_J");
            require_range(vt, m.theta1, m.theta2, "vartheta");
            return {p_branch2(m, vt), 0.5 * (m.w + vt)};
        }
        case Intersection::TSxTD: {
            if (m.regime != Regime::Large) throw RegimeMismatch("TSxTD intersection exists only for ell > ell_J");
            require_range(vt, m.theta1, m.theta2, "vartheta");
            const double q = detail::q_root(l, vt, m.tol).value;
            const double a = l + vt, b = l + q;
            return {kPi - asin_c((a * a - b * b) / (4.0 * a)), kPi + 0.5 * (q - vt)};
        }
    }
    throw Unsupported("unknown intersection");
}

IntersectionPieces intersection_pieces(const BarrierModel& m, Intersection kind, int side, double vt) {
    const IntersectionParams ip = intersection_params(m, kind, vt);
    switch (kind) {
        case Intersection::PxTS:
            return {PieceId(Family::P, side), {ip.tau, vt}, PieceId(Family::TS, -side), {ip.tau_prime, vt}};
        case Intersection::TDxTD:
            return {PieceId(Family::TD, -side), {ip.tau, vt}, PieceId(Family::TD, side),
                    {ip.tau_prime, kTwoPi - vt}};
        case Intersection::PxTD:
            return {PieceId(Family::P, side), {ip.tau, vt}, PieceId(Family::TD, -side), {ip.tau_prime, vt}};
        case Intersection::TSxTD:
            return {PieceId(Family::TS, -side), {ip.tau, vt}, PieceId(Family::TD, side),
                    {ip.tau_prime, kTwoPi - vt}};
    }
    throw Unsupported("unknown intersection");
}

std::vector<SlicePoint> sample_slice(const BarrierModel& m, double theta, int n) {
    if (!(theta > 0.0 && theta < kTwoPi)) throw DomainError("slice angle must lie in (0, 2pi)");
    if (n < 2) throw DomainError("need at least 2 points per piece");

    std::vector<SlicePoint> pts;
    auto add = [&](const PieceId& id, SurfaceParams sp) {
        std::optional<Costate> nu;
        if (id.family != Family::DL) nu = eval_piece_normal(m, id, sp);
        pts.push_back({eval_piece(m, id, sp), id, sp, nu});
    };
    auto add_surface = [&](Family f, int side, double vt) {
        const double lo = tau_min(f, vt) + kSampleInset;
        const double hi = tau_max(m, f, vt) - kSampleInset;
        if (!(hi > lo)) return;
        for (int i = 0; i < n; ++i) add(PieceId(f, side), {lo + (hi - lo) * i / (n - 1), vt});
    };

    add(PieceId(Family::DL), {0.0, theta});
    for (int side : {1, -1}) {
        const double vp = slice_vartheta(Family::P, side, theta);
        const double vu = slice_vartheta(Family::UL, side, theta);
        add(PieceId(Family::BUPside, side), {0.0, theta});
        add_surface(Family::P, side, vp);
        if (vp > m.theta21) add(PieceId(Family::PL, side), {0.0, vp});
        if (vu <= m.theta12) add(PieceId(Family::UL, side), {0.0, vu});
        if (vu < m.theta12) add_surface(Family::TS, side, vu);
        if (vu < kTwoPi - m.theta21) add_surface(Family::TD, side, vu);
    }

    const State& dl = pts.front().z;
    const double ref = std::atan2(dl.x(), dl.y());
    auto key = [ref](const State& z) {
        double k = std::atan2(z.x(), z.y()) - ref;
        while (k < 0.0) k += kTwoPi;
        while (k >= kTwoPi) k -= kTwoPi;
        return k;
    };
    std::stable_sort(pts.begin() + 1, pts.end(),
                     [&](const SlicePoint& a, const SlicePoint& b) { return key(a.z) < key(b.z); });
    return pts;
}

}  // namespace twocars
