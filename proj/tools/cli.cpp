#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "twocars/barrier.hpp"
#include "twocars/classify.hpp"
#include "twocars/errors.hpp"
#include "twocars/roots.hpp"
#include "twocars/sim.hpp"
#include "twocars/surfaces.hpp"

namespace twocars::cli {

namespace {

using Json = nlohmann::ordered_json;
using Cell = std::variant<std::monostate, double, long long, std::string, bool>;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One command's result: a table of records plus scalar metadata. A single
// record table is flattened into the JSON object; longer ones go under
// `rows_key`.
struct Report {
    Json meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::string rows_key;  // empty: single record
    int exit_code = kExitOk;
};

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const Cell& c) {
    struct V {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double d) const { return fmt17(d); }
        std::string operator()(long long i) const { return std::to_string(i); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(V{}, c);
}

Json json_cell(const Cell& c) {
    struct V {
        Json operator()(std::monostate) const { return nullptr; }
        Json operator()(double d) const { return std::isfinite(d) ? Json(d) : Json(nullptr); }
        Json operator()(long long i) const { return i; }
        Json operator()(const std::string& s) const { return s; }
        Json operator()(bool b) const { return b; }
    };
    return std::visit(V{}, c);
}

void write_report(const Report& r, const std::string& format, std::ostream& os) {
    if (format == "csv") {
        for (size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
        os << "\n";
        for (const auto& row : r.rows) {
            for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
            os << "\n";
        }
        return;
    }
    Json j;
    j["schema_version"] = 1;
    for (auto it = r.meta.begin(); it != r.meta.end(); ++it) j[it.key()] = it.value();
    auto record = [&](const std::vector<Cell>& row) {
        Json o = Json::object();
        for (size_t i = 0; i < row.size(); ++i) o[r.columns[i]] = json_cell(row[i]);
        return o;
    };
    if (r.rows_key.empty()) {
        if (!r.rows.empty()) {
            const Json o = record(r.rows.front());
            for (auto it = o.begin(); it != o.end(); ++it) j[it.key()] = it.value();
        }
    } else {
        Json arr = Json::array();
        for (const auto& row : r.rows) arr.push_back(record(row));
        j[r.rows_key] = std::move(arr);
    }
    os << j.dump(2) << "\n";
}

double tol_from_env() {
    const char* s = std::getenv("BARRIER_TOL");
    if (!s || !*s) return kDefaultTol;
    char* end = nullptr;
    const double t = std::strtod(s, &end);
    if (end == s || *end != '\0' || !(t > 0.0) || !std::isfinite(t))
        throw UsageError(std::string("BARRIER_TOL must be a positive number, got '") + s + "'");
    return t;
}

std::string regime_label(Regime r) {
    switch (r) {
        case Regime::Small: return "small";
        case Regime::Medium: return "medium";
        case Regime::Large: return "large";
    }
    return "?";
}

// ---- commands ----

Report cmd_constants(const BarrierModel& m) {
    Report r;
    r.columns = {"ell", "regime", "theta_J", "ell_J", "theta1", "theta2", "theta12", "theta21", "w", "m", "n", "tol"};
    const bool small = m.regime == Regime::Small, large = m.regime == Regime::Large;
    r.rows.push_back({m.ell, regime_label(m.regime), m.theta_J, m.ell_J, m.theta1, m.theta2, m.theta12, m.theta21,
                      large ? Cell{} : Cell{m.w}, small ? Cell{} : Cell{m.m}, small ? Cell{} : Cell{m.n}, m.tol});
    r.meta["command"] = "constants";
    return r;
}

Report cmd_slice(const BarrierModel& m, double theta, int n) {
    Report r;
    r.meta["command"] = "slice";
    r.meta["ell"] = m.ell;
    r.meta["theta"] = theta;
    r.meta["n"] = n;
    r.rows_key = "points";
    r.columns = {"theta_slice", "piece", "side", "tau", "vartheta", "x", "y", "nu_x", "nu_y", "nu_theta"};
    for (const SlicePoint& p : sample_slice(m, theta, n)) {
        std::vector<Cell> row{theta, std::string(family_name(p.piece.family)), static_cast<long long>(p.piece.side)};
        const Family f = p.piece.family;
        const bool has_tau = f == Family::P || f == Family::TS || f == Family::TD;
        row.push_back(has_tau ? Cell{p.params.tau} : Cell{});
        row.push_back(p.params.vartheta);
        row.push_back(p.z.x());
        row.push_back(p.z.y());
        if (p.normal) {
            row.push_back(p.normal->nu_x);
            row.push_back(p.normal->nu_y);
            row.push_back(p.normal->nu_theta);
        } else {
            row.insert(row.end(), 3, Cell{});
        }
        r.rows.push_back(std::move(row));
    }
    return r;
}

Report cmd_classify(const BarrierModel& m, const State& z, const LayerConfig& cfg) {
    Report r;
    r.meta["command"] = "classify";
    r.columns = {"matched", "family", "side", "ell_recovered", "layer_excess", "u_set", "v_set"};
    const auto match = classify(m, z, cfg);
    if (!match) {
        r.rows.push_back({false, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}});
    } else {
        r.rows.push_back({true, std::string(family_name(match->piece.family)),
                          static_cast<long long>(match->piece.side), match->ell_recovered, match->layer_excess,
                          match->u_set.to_string(), match->v_set.to_string()});
    }
    return r;
}

Report cmd_controls(const BarrierModel& m, const State& z, const LayerConfig& cfg) {
    Report r;
    r.meta["command"] = "controls";
    r.columns = {"family", "side", "u_set", "v_set"};
    const auto match = classify(m, z, cfg);
    if (!match) throw NotOnBarrier("state is not in the barrier layer");
    r.rows.push_back({std::string(family_name(match->piece.family)), static_cast<long long>(match->piece.side),
                      match->u_set.to_string(), match->v_set.to_string()});
    return r;
}

// A multi-valued set falls back to the piece's emanation control when it has
// one, otherwise to the member of smallest magnitude (ties to +1).
int resolve(const ControlSet& s, const PieceId& piece, bool pursuer) {
    if (s.is_single()) return s.value();
    try {
        const ControlPair p = emanation_controls(piece);
        const int c = static_cast<int>(pursuer ? p.u() : p.v());
        if (s.contains(c)) return c;
    } catch (const Unsupported&) {
    }
    for (int c : {0, 1, -1})
        if (s.contains(c)) return c;
    return 0;
}

struct PolicySpec {
    bool barrier = true;
    double u = 0.0, v = 0.0;
};

PolicySpec parse_policy(const std::string& s) {
    if (s == "barrier") return {};
    const std::string prefix = "fixed:";
    if (s.rfind(prefix, 0) == 0) {
        const std::string rest = s.substr(prefix.size());
        const auto comma = rest.find(',');
        if (comma != std::string::npos) {
            try {
                size_t a = 0, b = 0;
                const std::string us = rest.substr(0, comma), vs = rest.substr(comma + 1);
                PolicySpec p{false, std::stod(us, &a), std::stod(vs, &b)};
                if (a == us.size() && b == vs.size()) return p;
            } catch (const std::exception&) {
            }
        }
    }
    throw UsageError("--policy must be 'barrier' or 'fixed:<u>,<v>', got '" + s + "'");
}

Report cmd_simulate(const BarrierModel& m, const State& z0, double dt, double tmax, const PolicySpec& pol,
                    const LayerConfig& cfg) {
    Report r;
    r.meta["command"] = "simulate";
    r.meta["ell"] = m.ell;
    r.meta["policy"] = pol.barrier ? "barrier" : "fixed";
    r.rows_key = "samples";
    r.columns = {"t", "x", "y", "theta", "r"};

    Trajectory tr;
    if (pol.barrier) {
        auto match_at = [&](const State& z) -> std::optional<PieceMatch> {
            try {
                return classify(m, z, cfg);
            } catch (const InsideCapture&) {
                return std::nullopt;
            }
        };
        if (!match_at(z0)) throw NotOnBarrier("barrier policy needs a start state in the barrier layer");
        const Policy u = [&](const State& z) {
            const auto mt = match_at(z);
            return mt ? static_cast<double>(resolve(mt->u_set, mt->piece, true)) : 0.0;
        };
        const Policy v = [&](const State& z) {
            const auto mt = match_at(z);
            return mt ? static_cast<double>(resolve(mt->v_set, mt->piece, false)) : 0.0;
        };
        tr = integrate(z0, u, v, dt, tmax, m.ell, [&](const State& z) { return match_at(z).has_value(); });
    } else {
        const double uc = pol.u, vc = pol.v;
        tr = integrate(z0, [uc](const State&) { return uc; }, [vc](const State&) { return vc; }, dt, tmax, m.ell);
    }
    r.meta["termination"] = termination_name(tr.termination);
    r.meta["t_end"] = tr.t_end;
    for (const TimedState& s : tr.samples)
        r.rows.push_back({s.t, s.z.x(), s.z.y(), s.z.theta(), radial_distance(s.z)});
    return r;
}

// ---- audit ----

struct Check {
    std::string name;
    double value;
    double threshold;
    long long samples;
    bool at_least = false;  // pass when value >= threshold instead of <
    bool pass() const { return at_least ? value >= threshold : value < threshold; }
};

std::vector<Check> run_audit(const BarrierModel& m, int n, std::uint64_t seed, int probes) {
    std::vector<Check> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double l = m.ell;

    // roots
    {
        double worst = std::abs(junction_equation(m.theta_J));
        long long cnt = 1;
        if (m.regime == Regime::Small) worst = std::max(worst, std::abs(w_equation(l, m.w))), ++cnt;
        if (m.regime == Regime::Large) {
            worst = std::max({worst, std::abs(m_equation(l, m.m)), std::abs(n_equation(l, m.n))});
            cnt += 2;
        }
        for (int i = 0; i < 100; ++i) {
            const double a = m.theta2 + 1e-9, b = kTwoPi - m.theta2 - 1e-9;
            const double vt = a + (b - a) * (i + 0.5) / 100;
            worst = std::max(worst, std::abs(p_equation(l, vt, solve_p(l, vt, m.tol).value)));
            ++cnt;
            if (m.regime == Regime::Large) {
                const double vq = m.theta1 + (m.theta2 - m.theta1) * (i + 0.5) / 100;
                worst = std::max(worst, std::abs(q_equation(l, vq, solve_q(l, vq, m.tol).value)));
                ++cnt;
            }
        }
        out.push_back({"root_residual", worst, 1e-10, cnt});
    }

    // boundary identities
    {
        double e1 = 0, e2 = 0;
        for (int i = 1; i <= 1000; ++i) {
            const double vt = kTwoPi * i / 1001;
            for (int s : {1, -1}) {
                e1 = std::max(e1, state_distance(surfaces::p(l, s, kPi - vt / 2, vt), surfaces::pl(l, s, vt)));
                e2 = std::max(e2, state_distance(surfaces::td(l, s, vt / 2, vt), surfaces::pl(l, s, kTwoPi - vt)));
            }
        }
        out.push_back({"identity_P_PL", e1, 1e-10, 2000});
        out.push_back({"identity_TD_PL", e2, 1e-10, 2000});
    }

    auto random_params = [&](Family f) -> SurfaceParams {
        if (f == Family::UL) return {0.0, m.theta12 * U(rng)};
        if (f == Family::PL) return {0.0, m.theta21 + (kTwoPi - m.theta21) * U(rng)};
        const double hi = f == Family::P ? kTwoPi : f == Family::TS ? m.theta12 : kTwoPi - m.theta21;
        const double vt = kSampleInset + (hi - 2 * kSampleInset) * U(rng);
        const double a = tau_min(f, vt), b = tau_max(m, f, vt);
        return {a + (b - a) * U(rng), vt};
    };

    // semipermeability
    for (Family f : {Family::P, Family::PL, Family::UL, Family::TS, Family::TD})
        for (int s : {1, -1}) {
            double worst = 0;
            const PieceId id(f, s);
            for (int k = 0; k < n; ++k) {
                const SurfaceParams sp = random_params(f);
                worst = std::max(worst, std::abs(semipermeability_residual(eval_piece(m, id, sp),
                                                                           eval_piece_normal(m, id, sp))));
            }
            out.push_back({"semipermeability_" + id.to_string(), worst, 1e-9, n});
        }

    // round trip through the state charts
    for (Family f : {Family::P, Family::TS, Family::TD})
        for (int s : {1, -1}) {
            double worst = 0;
            long long outside = 0;
            const PieceId id(f, s);
            for (int k = 0; k < n; ++k) {
                const SurfaceParams sp = random_params(f);
                const State z = eval_piece(m, id, sp);
                worst = std::max(worst, std::abs(piece_ell(f, s, z) - l));
                if (!in_frame(m, f, s, z)) ++outside;
            }
            out.push_back({"round_trip_" + id.to_string(), worst, 1e-9, n});
            out.push_back({"frame_misses_" + id.to_string(), static_cast<double>(outside), 0.5, n});
        }

    // intersections
    for (Intersection k : {Intersection::PxTS, Intersection::TDxTD, Intersection::PxTD, Intersection::TSxTD}) {
        if (k == Intersection::PxTD && m.regime != Regime::Small) continue;
        if (k == Intersection::TSxTD && m.regime != Regime::Large) continue;
        double lo = m.theta1, hi = m.theta2;
        if (k == Intersection::PxTS) lo = 0.0, hi = m.theta1;
        if (k == Intersection::TDxTD) lo = m.theta2, hi = kTwoPi - m.theta2;
        double worst = 0;
        for (int i = 0; i < 200; ++i) {
            const double vt = lo + (hi - lo) * (i + 0.5) / 200;
            for (int s : {1, -1}) {
                const auto ip = intersection_pieces(m, k, s, vt);
                worst = std::max(worst, state_distance(eval_piece(m, ip.first, ip.first_params),
                                                       eval_piece(m, ip.second, ip.second_params)));
            }
        }
        out.push_back({std::string("intersection_") + intersection_name(k), worst, 1e-8, 400});
    }

    if (probes > 0) {
        const ConcordanceReport rep = oracle_concordance(m, probes, seed);
        out.push_back({"oracle_agreement", rep.agreement(), 0.95, rep.decided, true});
        out.push_back({"oracle_far_contradictions", static_cast<double>(rep.far_contradictions), 0.5,
                       static_cast<long long>(rep.probes.size())});
    }
    return out;
}

Report cmd_audit(const BarrierModel& m, int n, std::uint64_t seed, int probes) {
    Report r;
    r.meta["command"] = "audit";
    r.meta["ell"] = m.ell;
    r.meta["regime"] = regime_label(m.regime);
    r.meta["seed"] = seed;
    r.rows_key = "checks";
    r.columns = {"check", "value", "threshold", "samples", "pass"};
    bool all = true;
    for (const Check& c : run_audit(m, n, seed, probes)) {
        r.rows.push_back({c.name, c.value, c.threshold, c.samples, c.pass()});
        all = all && c.pass();
    }
    r.meta["pass"] = all;
    if (!all) r.exit_code = kExitAudit;
    return r;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Barrier of the game of two cars: constants, slices, classification, simulation, audits"};
    app.require_subcommand(1);

    double ell = 0, theta = 0, x = 0, y = 0, delta = 1e-3, dt = 1e-3, tmax = 1.0;
    int n_slice = 50, n_audit = 10000;
    long long seed = 1;
    int probes = 20;
    std::string format, out_path, policy = "barrier";

    auto common = [&](CLI::App* sc, const std::string& default_format) {
        sc->add_option("--ell", ell, "capture radius")->required();
        sc->add_option("--format", format, "csv or json (default " + default_format + ")")
            ->check(CLI::IsMember({"csv", "json"}));
        sc->add_option("--out", out_path, "write output to this file");
    };
    auto point = [&](CLI::App* sc) {
        sc->add_option("--x", x)->required();
        sc->add_option("--y", y)->required();
        sc->add_option("--theta", theta, "heading difference, rad")->required();
        sc->add_option("--delta", delta, "relative layer width")->capture_default_str();
    };

    auto* c_const = app.add_subcommand("constants", "junction constants and critical angles");
    common(c_const, "json");
    auto* c_slice = app.add_subcommand("slice", "sampled barrier cross-section at one theta");
    common(c_slice, "csv");
    c_slice->add_option("--theta", theta, "slice angle, rad")->required();
    c_slice->add_option("--n", n_slice, "points per piece")->capture_default_str();
    auto* c_class = app.add_subcommand("classify", "barrier piece containing a state");
    common(c_class, "json");
    point(c_class);
    auto* c_ctrl = app.add_subcommand("controls", "optimal controls at a barrier state");
    common(c_ctrl, "json");
    point(c_ctrl);
    auto* c_sim = app.add_subcommand("simulate", "integrate a trajectory");
    common(c_sim, "csv");
    point(c_sim);
    c_sim->add_option("--dt", dt)->capture_default_str();
    c_sim->add_option("--tmax", tmax)->capture_default_str();
    c_sim->add_option("--policy", policy, "barrier or fixed:<u>,<v>")->capture_default_str();
    auto* c_audit = app.add_subcommand("audit", "numerical self-checks of the barrier");
    common(c_audit, "json");
    c_audit->add_option("--n", n_audit, "samples per family and side")->capture_default_str();
    c_audit->add_option("--seed", seed)->capture_default_str();
    c_audit->add_option("--probes", probes, "barrier points for the game oracle (0 skips it)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App* sc = app.get_subcommands().front();
    if (format.empty()) format = sc == c_const || sc == c_class || sc == c_ctrl || sc == c_audit ? "json" : "csv";

    try {
        const double tol = tol_from_env();
        if (sc == c_audit && (n_audit < 1 || probes < 0)) throw UsageError("--n must be >= 1 and --probes >= 0");
        const PolicySpec pol = sc == c_sim ? parse_policy(policy) : PolicySpec{};
        if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("--ell must be positive");
        LayerConfig cfg;
        if (!(delta > 0.0)) throw DomainError("--delta must be positive");
        cfg.delta = delta;

        const BarrierModel m = build_model(ell, tol);
        Report rep;
        if (sc == c_const) rep = cmd_constants(m);
        else if (sc == c_slice) rep = cmd_slice(m, theta, n_slice);
        else if (sc == c_class) rep = cmd_classify(m, State(x, y, theta), cfg);
        else if (sc == c_ctrl) rep = cmd_controls(m, State(x, y, theta), cfg);
        else if (sc == c_sim) rep = cmd_simulate(m, State(x, y, theta), dt, tmax, pol, cfg);
        else rep = cmd_audit(m, n_audit, static_cast<std::uint64_t>(seed), probes);

        if (out_path.empty()) {
            write_report(rep, format, out);
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) {
                err << "error: cannot open " << out_path << "\n";
                return kExitUsage;
            }
            write_report(rep, format, f);
        }
        return rep.exit_code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

}  // namespace twocars::cli
