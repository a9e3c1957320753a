#include "twocars/classify.hpp"

#include <algorithm>
#include <cmath>

#include "twocars/errors.hpp"
#include "twocars/surfaces.hpp"

namespace twocars {

namespace {

// Frames and line tests are written for side +1; side -1 goes through the
// reflection symmetry.
State to_plus_side(int side, const State& z) { return side > 0 ? z : reflect(z); }

bool frame_plus(const BarrierModel& m, Family family, const State& z, double slack) {
    const double x = z.x(), y = z.y(), th = z.theta();
    switch (family) {
        case Family::P: {
            const double vt = th;
            if (vt <= 0.0) return false;
            // the chart radius must be positive; the frame alone never bounds it
            if (-(x * std::sin(0.5 * th) + y * std::cos(0.5 * th)) <= 0.0) return false;
            const double a = -x * std::cos(0.5 * th) + y * std::sin(0.5 * th);
            const double upper = 2.0 * std::cos(0.5 * vt) - 2.0 * std::cos(tau_max(m, Family::P, vt) + 0.5 * vt);
            return a > -slack && a < upper + slack;
        }
        case Family::TS: {
            const double vt = kTwoPi - th;
            if (!(vt > -slack && vt < m.theta12 + slack)) return false;
            const double v = std::clamp(vt, 0.0, m.theta12);
            if (!(1.0 - std::cos(th) < x + slack)) return false;
            return (m.ell + v) * std::cos(tau_max(m, Family::TS, v) - v) < y - std::sin(th) + slack;
        }
        case Family::TD: {
            const double vt = kTwoPi - th;
            const double hi = kTwoPi - m.theta21;
            if (!(vt > -slack && vt < hi + slack)) return false;
            const double v = std::clamp(vt, 0.0, hi);
            const double a = x + 1.0 + std::cos(th), b = y - std::sin(th);
            const double r = a * a + b * b - 4.0;
            if (r < -1e-12) return false;
            const double s = std::sqrt(std::max(r, 0.0));
            if (!(s - m.ell > -slack && s - m.ell < 2.0 * tau_max(m, Family::TD, v) - v + slack)) return false;
            return a * s < 2.0 * b + slack;
        }
        case Family::PL: {
            const double vt = th;
            if (!(vt > m.theta21 - slack && vt > 0.0)) return false;
            const State p = surfaces::pl(m.ell, 1, vt);
            return std::hypot(x - p.x(), y - p.y()) <= slack;
        }
        case Family::UL: {
            const double vt = kTwoPi - th;
            if (!(vt > -slack && vt <= m.theta12 + slack)) return false;
            const State p = surfaces::ul(m.ell, 1, vt);
            return std::hypot(x - p.x(), y - p.y()) <= slack;
        }
        default:
            return false;
    }
}

// Position along a curve piece that moves rigidly with ell: the recovered
// radius and the lateral miss distance, both for side +1.
struct LineFit {
    double ell;
    double lateral;
    double vt;
};

LineFit fit_line(Family family, const State& z) {
    const double x = z.x(), y = z.y(), th = z.theta();
    switch (family) {
        case Family::UL: {
            const double vt = kTwoPi - th;
            return {y - vt + std::sin(vt), std::abs(x - (1.0 - std::cos(vt))), vt};
        }
        case Family::PL: {
            const double vt = th, s = std::sin(0.5 * vt), c = std::cos(0.5 * vt);
            const double dx = x + 2.0 * c + 1.0 + std::cos(vt), dy = y - 2.0 * s - std::sin(vt);
            return {-dx * s - dy * c, std::abs(-dx * c + dy * s), vt};
        }
        case Family::BUPside: {
            const double s = std::sin(0.5 * th), c = std::cos(0.5 * th);
            return {-(x * s + y * c), std::abs(-x * c + y * s), th};
        }
        default:
            throw Unsupported("not a curve piece");
    }
}

struct Layer {
    double lo, hi;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

class Classifier {
public:
    Classifier(const BarrierModel& m, const LayerConfig& cfg)
        : m_(m), cfg_(cfg), layer_{m.ell - cfg.frame_slack, m.ell * (1.0 + cfg.delta) + cfg.frame_slack} {}

    std::optional<PieceMatch> run(const State& z) {
        if (auto r = dispersal(z)) return r;
        if (auto r = bup0(z)) return r;
        const int first = z.theta() <= kPi ? 1 : -1;
        for (Family f : {Family::BUPside, Family::UL, Family::PL})
            for (int side : {first, -first})
                if (auto r = curve(f, side, z)) return r;
        for (Family f : {Family::TS, Family::TD, Family::P})
            for (int side : {first, -first})
                if (auto r = surface(f, side, z)) return r;
        return std::nullopt;
    }

private:
    // Frames are taken at the recovered radius, so the model is rebuilt
    // unless the radius matches the given one.
    const BarrierModel& model_at(double ell) {
        if (std::abs(ell - m_.ell) <= 1e-13 * m_.ell) return m_;
        if (!other_ || other_->ell != ell) other_ = build_model(ell, m_.tol);
        return *other_;
    }

    PieceMatch make(const PieceId& id, double ell_rec, const State& z) const {
        auto [u, v] = piece_controls(id, z);
        return {id, ell_rec, std::max(0.0, ell_rec - m_.ell), u, v};
    }

    std::optional<PieceMatch> dispersal(const State& z) {
        const double th = z.theta();
        if (!(th > 0.0)) return std::nullopt;
        const int gamma = th <= kPi ? -1 : 1;
        const double vt = kPi - std::abs(kPi - th);
        const Family f = vt >= m_.theta12 ? Family::TD : Family::TS;
        double ell_rec;
        try {
            ell_rec = piece_ell(f, gamma, z);
        } catch (const OutOfChart&) {
            return std::nullopt;
        }
        if (!layer_.contains(ell_rec)) return std::nullopt;
        try {
            const State d = dispersal_point(model_at(std::max(ell_rec, m_.ell)), th);
            if (std::hypot(d.x() - z.x(), d.y() - z.y()) > cfg_.line_width) return std::nullopt;
        } catch (const Error&) {
            return std::nullopt;
        }
        return make(PieceId(Family::DL), ell_rec, z);
    }

    std::optional<PieceMatch> bup0(const State& z) {
        if (std::abs(angle_diff(z.theta(), 0.0)) > cfg_.frame_slack) return std::nullopt;
        const double r = radial_distance(z);
        if (!layer_.contains(r)) return std::nullopt;
        return make(PieceId(Family::BUP0), r, z);
    }

    std::optional<PieceMatch> curve(Family f, int side, const State& z) {
        const State zp = to_plus_side(side, z);
        if (zp.theta() <= 0.0) return std::nullopt;
        const LineFit fit = fit_line(f, zp);
        if (!layer_.contains(fit.ell) || fit.lateral > cfg_.line_width) return std::nullopt;
        const double ell = std::max(fit.ell, m_.ell);
        const double slack = cfg_.frame_slack;
        if (f == Family::UL) {
            if (!(fit.vt > 0.0 && fit.vt <= model_at(ell).theta12 + slack)) return std::nullopt;
        } else if (f == Family::PL) {
            if (!(fit.vt > model_at(ell).theta21 - slack)) return std::nullopt;
        }
        return make(PieceId(f, side), fit.ell, z);
    }

    std::optional<PieceMatch> surface(Family f, int side, const State& z) {
        double ell_rec;
        try {
            ell_rec = piece_ell(f, side, z);
        } catch (const OutOfChart&) {
            return std::nullopt;
        }
        if (!layer_.contains(ell_rec)) return std::nullopt;
        try {
            if (!in_frame(model_at(std::max(ell_rec, m_.ell)), f, side, z, cfg_.frame_slack)) return std::nullopt;
        } catch (const Error&) {
            return std::nullopt;
        }
        return make(PieceId(f, side), ell_rec, z);
    }

    const BarrierModel& m_;
    const LayerConfig& cfg_;
    Layer layer_;
    std::optional<BarrierModel> other_;
};

}  // namespace

double piece_ell(Family family, int side, const State& z) {
    if (side != 1 && side != -1) throw DomainError("side must be -1 or +1");
    const double x = z.x(), y = z.y(), th = z.theta();
    const double u = side;
    switch (family) {
        case Family::P:
            return -u * (x * std::sin(0.5 * th) + y * std::cos(0.5 * th));
        case Family::TS: {
            const double a = u * x - 1.0 + std::cos(th), b = y - u * std::sin(th);
            return -(1.0 + u) * kPi + u * th + std::hypot(a, b);
        }
        case Family::TD: {
            const double a = u * x + 1.0 + std::cos(th), b = y - u * std::sin(th);
            const double r = a * a + b * b;
            if (r - 4.0 < -1e-12) throw OutOfChart("state lies inside the TD chart's excluded disc");
            const double s = std::sqrt(std::max(r - 4.0, 0.0));
            // acos((2a + b s) / r), in a form that stays accurate near 0 and pi
            const double ang = std::atan2(std::abs(a * s - 2.0 * b), 2.0 * a + b * s);
            return s - (1.0 + u) * kPi + u * th + 2.0 * ang;
        }
        default:
            throw Unsupported(std::string("no radius chart for family ") + family_name(family));
    }
}

double line_ell(Family family, int side, const State& z) {
    if (side != 1 && side != -1) throw DomainError("side must be -1 or +1");
    return fit_line(family, to_plus_side(side, z)).ell;
}

bool in_frame(const BarrierModel& model, Family family, int side, const State& z, double slack) {
    if (side != 1 && side != -1) return false;
    try {
        return frame_plus(model, family, to_plus_side(side, z), slack);
    } catch (const OutOfDomain&) {
        return false;
    }
}

std::pair<ControlSet, ControlSet> piece_controls(const PieceId& piece, const State& z) {
    const int s = piece.side;
    switch (piece.family) {
        case Family::UL: return {ControlSet::single(0), ControlSet::single(s)};
        case Family::TS: return {ControlSet::single(s), ControlSet::single(s)};
        case Family::P:
        case Family::PL:
        case Family::TD:
        case Family::BUPside: return {ControlSet::single(-s), ControlSet::single(s)};
        case Family::BUP0: {
            if (z.x() == 0.0) return {ControlSet::any(), ControlSet::any()};
            const int k = z.x() > 0.0 ? 1 : -1;
            return {ControlSet::single(k), ControlSet::single(k)};
        }
        case Family::DL: return {ControlSet::bangs(), ControlSet::bangs()};
    }
    throw Unsupported("unknown piece");
}

std::optional<PieceMatch> classify(const BarrierModel& model, const State& z, const LayerConfig& cfg) {
    if (!(cfg.delta > 0.0) || !(cfg.frame_slack >= 0.0)) throw DomainError("invalid layer configuration");
    if (radial_distance(z) < model.ell * (1.0 - cfg.frame_slack))
        throw InsideCapture("state lies inside the capture circle");
    return Classifier(model, cfg).run(z);
}

std::pair<ControlSet, ControlSet> optimal_controls(const BarrierModel& model, const State& z, const LayerConfig& cfg) {
    const auto match = classify(model, z, cfg);
    if (!match) throw NotOnBarrier("state is not in the barrier layer");
    return {match->u_set, match->v_set};
}

}  // namespace twocars
