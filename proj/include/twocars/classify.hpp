#pragma once

#include <optional>
#include <utility>

#include "twocars/barrier.hpp"
#include "twocars/kinematics.hpp"

namespace twocars {

struct LayerConfig {
    double delta = 1e-3;        // relative layer width
    double frame_slack = 1e-9;  // relaxation of strict frame inequalities
    double line_width = 1e-10;  // lateral tolerance for the curve pieces
};

struct PieceMatch {
    PieceId piece;
    double ell_recovered;
    double layer_excess;
    ControlSet u_set;
    ControlSet v_set;
};

// Capture radius for which the state lies on the given surface family.
double piece_ell(Family family, int side, const State& z);

// Radius recovered for the curve pieces UL, PL and BUPside by projecting
// onto the direction in which the curve moves as ell grows.
double line_ell(Family family, int side, const State& z);

bool in_frame(const BarrierModel& model, Family family, int side, const State& z, double slack = 1e-9);

// Optimal feedback controls on a barrier piece.
std::pair<ControlSet, ControlSet> piece_controls(const PieceId& piece, const State& z);

std::optional<PieceMatch> classify(const BarrierModel& model, const State& z, const LayerConfig& cfg = {});

std::pair<ControlSet, ControlSet> optimal_controls(const BarrierModel& model, const State& z,
                                                   const LayerConfig& cfg = {});

}  // namespace twocars
