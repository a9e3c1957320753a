#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "twocars/barrier.hpp"
#include "twocars/classify.hpp"
#include "twocars/kinematics.hpp"

namespace twocars {

using Policy = std::function<double(const State&)>;

struct TimedState {
    double t;
    State z;
};

enum class Termination { Captured, HorizonReached, LeftLayer };

const char* termination_name(Termination t);

struct Trajectory {
    std::vector<TimedState> samples;
    Termination termination = Termination::HorizonReached;
    double t_end = 0.0;  // capture time, horizon, or exit time
};

// Fixed-step RK4 with controls held over each step. Capture is located by
// bisection on the step length. `keep_going`, when set, stops the run with
// LeftLayer as soon as it returns false.
Trajectory integrate(const State& z0, const Policy& u_policy, const Policy& v_policy, double dt, double t_max,
                     double ell, const std::function<bool(const State&)>& keep_going = {});

// min over u of max over v of the normal velocity component.
double semipermeability_residual(const State& z, const Costate& nu);

enum class Outcome { Capture, Escape, Undecided };

const char* outcome_name(Outcome o);

struct OracleConfig {
    int stages = 4;
    std::vector<int> values{-1, 0, 1};
    double stage_dt = 0.5;
    // Upper bound on (|values|^2)^stages.
    double max_leaves = 531441.0;
    // Sub-samples per stage segment for the distance minimum.
    int segment_samples = 24;
};

struct OracleVerdict {
    Outcome outcome;
    double horizon;
    int stages;
    std::vector<int> values;
};

// Exhaustive minimax over piecewise-constant controls. Capture: the
// pursuer wins even when the evader learns each pursuer stage value first.
// Escape: the evader survives the horizon even when the pursuer learns each
// evader stage value first. Anything else is Undecided.
OracleVerdict game_oracle(const State& z0, double ell, const OracleConfig& cfg = {});

// Constant-control pair along which a piece was grown.
ControlPair emanation_controls(const PieceId& piece);

struct ProbeResult {
    PieceId piece;
    double max_drift;   // max |ell_piece(z(t)) - ell|
    double final_drift; // signed, at the end of the window
    double duration;
};

// Both players follow the barrier controls (multi-valued sets resolved by
// the emanation pair) for up to t_probe, or until the path reaches the end
// of the piece.
ProbeResult barrier_invariance_probe(const BarrierModel& model, const SlicePoint& point, const LayerConfig& cfg,
                                     double t_probe, double dt = 1e-4);

// The evader plays -side instead of +side on a P or PL point while the
// pursuer keeps its barrier control. final_drift < 0 means the state went
// to the capture side.
ProbeResult deviation_probe(const BarrierModel& model, const SlicePoint& point, double t_probe, double dt = 1e-4);

struct ConcordanceProbe {
    PieceId piece;
    SurfaceParams params;
    double displacement;  // along the unit (nu_x, nu_y); positive is the escape side
    State z;
    Outcome verdict;
};

struct ConcordanceReport {
    std::vector<ConcordanceProbe> probes;
    int decided = 0;
    int agreed = 0;
    int far_contradictions = 0;  // disagreements at |displacement| >= 0.1
    double agreement() const { return decided ? static_cast<double>(agreed) / decided : 0.0; }
};

// Random interior points of the P, TS and TD surfaces, each displaced by
// +-0.05 and +-0.1 off the barrier and judged by game_oracle over a horizon
// of tau + 1.5 in 6 stages. Points near the ends of a tau range are skipped:
// the ends lie on the dispersal line or a boundary line where the side of a
// displaced state is not well defined.
ConcordanceReport oracle_concordance(const BarrierModel& model, int n_states, std::uint64_t seed);

}  // namespace twocars
