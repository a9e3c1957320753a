#include "twocars/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "twocars/errors.hpp"

namespace twocars {

namespace {

State rk4_step(const State& z, const ControlPair& c, double h) {
    auto add = [](const State& s, const Velocity& k, double f) {
        return State(s.x() + f * k.dx, s.y() + f * k.dy, s.theta() + f * k.dtheta);
    };
    const Velocity k1 = dynamics_rhs(z, c);
    const Velocity k2 = dynamics_rhs(add(z, k1, 0.5 * h), c);
    const Velocity k3 = dynamics_rhs(add(z, k2, 0.5 * h), c);
    const Velocity k4 = dynamics_rhs(add(z, k3, h), c);
    return {z.x() + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
            z.y() + h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
            z.theta() + h / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta)};
}

double checked(const Policy& p, const State& z, const char* who) {
    const double v = p(z);
    if (!(v >= -1.0 && v <= 1.0)) throw PolicyRange(std::string(who) + " policy returned " + std::to_string(v));
    return v;
}

// Forward exact motion under constant controls.
State forward(const State& z, int u, int v, double s) { return flow_state(-s, z, ControlPair(u, v)); }

bool segment_captures(const State& z, int u, int v, double h, double ell, int samples) {
    double best = radial_distance(z);
    int best_i = 0;
    for (int i = 1; i <= samples; ++i) {
        const double r = radial_distance(forward(z, u, v, h * i / samples));
        if (r <= ell) return true;
        if (r < best) {
            best = r;
            best_i = i;
        }
    }
    // Golden-section search around the sampled minimum for grazing contacts.
    double a = h * std::max(0, best_i - 1) / samples, b = h * std::min(samples, best_i + 1) / samples;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int k = 0; k < 40; ++k) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        const double rc = radial_distance(forward(z, u, v, c)), rd = radial_distance(forward(z, u, v, d));
        if (std::min(rc, rd) <= ell) return true;
        (rc < rd ? b : a) = rc < rd ? d : c;
    }
    return false;
}

struct OracleSearch {
    double ell;
    const OracleConfig& cfg;

    // Pursuer picks first each stage; evader replies knowing it.
    bool capture(const State& z, int left) const {
        for (int u : cfg.values) {
            bool all = true;
            for (int v : cfg.values) {
                if (segment_captures(z, u, v, cfg.stage_dt, ell, cfg.segment_samples)) continue;
                if (left > 1 && capture(forward(z, u, v, cfg.stage_dt), left - 1)) continue;
                all = false;
                break;
            }
            if (all) return true;
        }
        return false;
    }

    // Evader picks first each stage; pursuer replies knowing it.
    bool escape(const State& z, int left) const {
        for (int v : cfg.values) {
            bool all = true;
            for (int u : cfg.values) {
                if (!segment_captures(z, u, v, cfg.stage_dt, ell, cfg.segment_samples) &&
                    (left == 1 || escape(forward(z, u, v, cfg.stage_dt), left - 1)))
                    continue;
                all = false;
                break;
            }
            if (all) return true;
        }
        return false;
    }
};

double chart_ell(const PieceId& piece, const State& z) {
    switch (piece.family) {
        case Family::P:
        case Family::TS:
        case Family::TD: return piece_ell(piece.family, piece.side, z);
        case Family::UL:
        case Family::PL:
        case Family::BUPside: return line_ell(piece.family, piece.side, z);
        default: throw Unsupported(std::string("no radius chart for ") + piece.to_string());
    }
}

// Retrograde time left before the path leaves the piece.
double remaining_time(const SlicePoint& p) {
    const double tau = p.params.tau, vt = p.params.vartheta;
    switch (p.piece.family) {
        case Family::P: return tau;
        case Family::PL: return kPi - 0.5 * vt;
        case Family::UL: return vt;
        case Family::TS: return tau - vt;
        case Family::TD: return vt - tau;
        default: return 0.0;
    }
}

ProbeResult run_probe(const SlicePoint& point, double ell, int u, int v, double t_probe, double dt) {
    const double window = std::min(t_probe, remaining_time(point));
    if (!(window > 0.0)) throw DomainError("probe window is empty");
    const PieceId piece = point.piece;
    double max_drift = 0.0;
    auto monitor = [&](const State& z) {
        max_drift = std::max(max_drift, std::abs(chart_ell(piece, z) - ell));
        return true;
    };
    const Trajectory tr = integrate(
        point.z, [u](const State&) { return double(u); }, [v](const State&) { return double(v); }, dt, window,
        0.0, monitor);
    const State& end = tr.samples.back().z;
    return {piece, max_drift, chart_ell(piece, end) - ell, tr.t_end};
}

}  // namespace

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::Captured: return "captured";
        case Termination::HorizonReached: return "horizon";
        case Termination::LeftLayer: return "left_layer";
    }
    return "?";
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Capture: return "capture";
        case Outcome::Escape: return "escape";
        case Outcome::Undecided: return "undecided";
    }
    return "?";
}

Trajectory integrate(const State& z0, const Policy& u_policy, const Policy& v_policy, double dt, double t_max,
                     double ell, const std::function<bool(const State&)>& keep_going) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (!(t_max >= 0.0)) throw DomainError("t_max must be nonnegative");
    Trajectory tr;
    tr.samples.push_back({0.0, z0});
    if (radial_distance(z0) <= ell) {
        tr.termination = Termination::Captured;
        return tr;
    }
    if (keep_going && !keep_going(z0)) {
        tr.termination = Termination::LeftLayer;
        return tr;
    }
    State z = z0;
    double t = 0.0;
    const long steps = static_cast<long>(std::ceil(t_max / dt - 1e-9));
    for (long i = 0; i < steps; ++i) {
        const double h = std::min(dt, t_max - t);
        const ControlPair c(checked(u_policy, z, "pursuer"), checked(v_policy, z, "evader"));
        State next = rk4_step(z, c, h);
        if (radial_distance(next) - ell <= 0.0) {
            double a = 0.0, b = h;
            while (b - a > 1e-10) {
                const double mid = 0.5 * (a + b);
                (radial_distance(rk4_step(z, c, mid)) - ell <= 0.0 ? b : a) = mid;
            }
            tr.samples.push_back({t + b, rk4_step(z, c, b)});
            tr.termination = Termination::Captured;
            tr.t_end = t + b;
            return tr;
        }
        t = (i + 1 == steps) ? t_max : t + h;
        z = next;
        tr.samples.push_back({t, z});
        if (keep_going && !keep_going(z)) {
            tr.termination = Termination::LeftLayer;
            tr.t_end = t;
            return tr;
        }
    }
    tr.termination = Termination::HorizonReached;
    tr.t_end = t;
    return tr;
}

double semipermeability_residual(const State& z, const Costate& nu) {
    if (nu.is_zero()) throw DomainError("costate must be nonzero");
    const SwitchValues s = switch_values(z, nu);
    return -std::abs(s.s_p) + std::abs(s.s_e) + nu.nu_x * std::sin(z.theta()) + nu.nu_y * std::cos(z.theta()) -
           nu.nu_y;
}

OracleVerdict game_oracle(const State& z0, double ell, const OracleConfig& cfg) {
    if (!(ell > 0.0)) throw DomainError("capture radius must be positive");
    if (cfg.stages < 1 || cfg.values.empty() || !(cfg.stage_dt > 0.0))
        throw DomainError("oracle needs at least one stage, one value and a positive stage length");
    for (int v : cfg.values)
        if (v < -1 || v > 1) throw DomainError("oracle control values must be -1, 0 or +1");
    const double n = static_cast<double>(cfg.values.size());
    const double leaves = std::pow(n * n, cfg.stages);
    if (cfg.stages > 6 || cfg.values.size() > 3 || leaves > cfg.max_leaves)
        throw BudgetExceeded("oracle grid of " + std::to_string(leaves) + " leaves exceeds the budget");

    OracleVerdict out{Outcome::Undecided, cfg.stages * cfg.stage_dt, cfg.stages, cfg.values};
    if (radial_distance(z0) <= ell) {
        out.outcome = Outcome::Capture;
        return out;
    }
    const OracleSearch search{ell, cfg};
    if (search.capture(z0, cfg.stages))
        out.outcome = Outcome::Capture;
    else if (search.escape(z0, cfg.stages))
        out.outcome = Outcome::Escape;
    return out;
}

ControlPair emanation_controls(const PieceId& piece) {
    const int s = piece.side;
    switch (piece.family) {
        case Family::P:
        case Family::PL:
        case Family::TD:
        case Family::BUPside: return ControlPair(-s, s);
        case Family::UL: return ControlPair(0, s);
        case Family::TS: return ControlPair(s, s);
        default: throw Unsupported(std::string("no emanation pair for ") + piece.to_string());
    }
}

ProbeResult barrier_invariance_probe(const BarrierModel& model, const SlicePoint& point, const LayerConfig& cfg,
                                     double t_probe, double dt) {
    const auto match = classify(model, point.z, cfg);
    if (!match) throw NotOnBarrier("probe start is not in the barrier layer");
    const ControlPair pair = emanation_controls(point.piece);
    auto pick = [](const ControlSet& s, double fallback) {
        return s.is_single() ? s.value() : static_cast<int>(fallback);
    };
    const int u = pick(match->u_set, pair.u()), v = pick(match->v_set, pair.v());
    return run_probe(point, model.ell, u, v, t_probe, dt);
}

ProbeResult deviation_probe(const BarrierModel& model, const SlicePoint& point, double t_probe, double dt) {
    if (point.piece.family != Family::P && point.piece.family != Family::PL)
        throw Unsupported("deviation probe is defined for P and PL points");
    const ControlPair pair = emanation_controls(point.piece);
    return run_probe(point, model.ell, static_cast<int>(pair.u()), -static_cast<int>(pair.v()), t_probe, dt);
}

ConcordanceReport oracle_concordance(const BarrierModel& model, int n_states, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Family families[3] = {Family::P, Family::TS, Family::TD};
    ConcordanceReport rep;
    int found = 0;
    for (int attempt = 0; found < n_states; ++attempt) {
        if (attempt > 1000 * n_states) throw BudgetExceeded("could not draw enough interior probe points");
        const Family f = families[static_cast<int>(3 * U(rng)) % 3];
        const int side = U(rng) < 0.5 ? 1 : -1;
        const double hi = f == Family::P ? kTwoPi : f == Family::TS ? model.theta12 : kTwoPi - model.theta21;
        const double vt = hi * (0.02 + 0.96 * U(rng));
        const double a = tau_min(f, vt), b = tau_max(model, f, vt);
        if (b - a < 0.4) continue;
        const SurfaceParams sp{a + (b - a) * (0.2 + 0.6 * U(rng)), vt};
        const PieceId id(f, side);
        const State z0 = eval_piece(model, id, sp);
        const Costate nu = eval_piece_normal(model, id, sp);
        const double nn = std::hypot(nu.nu_x, nu.nu_y);
        if (nn < 1e-6) continue;
        std::vector<ConcordanceProbe> batch;
        bool inside = false;
        for (double d : {0.05, -0.05, 0.1, -0.1}) {
            const State z(z0.x() + d * nu.nu_x / nn, z0.y() + d * nu.nu_y / nn, z0.theta());
            if (radial_distance(z) <= model.ell) inside = true;
            batch.push_back({id, sp, d, z, Outcome::Undecided});
        }
        if (inside) continue;
        OracleConfig cfg;
        cfg.stages = 6;
        cfg.stage_dt = (sp.tau + 1.5) / cfg.stages;
        for (auto& p : batch) {
            p.verdict = game_oracle(p.z, model.ell, cfg).outcome;
            if (p.verdict == Outcome::Undecided) continue;
            ++rep.decided;
            const bool ok = (p.displacement > 0) == (p.verdict == Outcome::Escape);
            if (ok) ++rep.agreed;
            else if (std::abs(p.displacement) >= 0.1 - 1e-12) ++rep.far_contradictions;
        }
        rep.probes.insert(rep.probes.end(), batch.begin(), batch.end());
        ++found;
    }
    return rep;
}

}  // namespace twocars
