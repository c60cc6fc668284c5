#pragma once

#include <utility>
#include <vector>

#include "tmc/pipeline.hpp"
#include "tmc/similarity.hpp"
#include "tmc/trajectory.hpp"

namespace tmc {

/// Manually placed image-space segment.
struct VirtualLine {
    Vec2 a;
    Vec2 b;
};

struct LinePair {
    VirtualLine entry;
    VirtualLine exit;
};

/// Line-crossing classifier spec: one entry/exit pair per movement, in
/// priority order.
struct LineBasedSpec {
    std::vector<std::pair<MovementLabel, LinePair>> movements;
};

/// Shape-similarity classifier spec: manually chosen modelling trajectories
/// per movement plus the fixed distance/angle acceptance limits.
struct ShapeSimilaritySpec {
    std::vector<std::pair<MovementLabel, std::vector<Trajectory>>> movements;
    double distance_limit = 0.0;  // pixels
    double angle_limit = 0.0;     // degrees

    void validate() const;
};

/// True when any consecutive point pair of t intersects the segment,
/// endpoint touches included.
bool segment_crossing(const Trajectory& t, const VirtualLine& line);

/// First movement (spec order) whose entry AND exit lines are both crossed;
/// Unknown when none. Crossing several complete pairs emits a diagnostic.
MovementLabel classify_line_based(const Trajectory& t, const LineBasedSpec& spec,
                                  Diagnostics* diag = nullptr);

/// Among modelling trajectories with d_s <= distance_limit and
/// t_s <= angle_limit, picks the movement minimizing w1*d_s + w2*t_s;
/// Unknown when no candidate passes both limits.
MovementLabel classify_shape_similarity(const Trajectory& t, const ShapeSimilaritySpec& spec,
                                        const SimilarityConfig& cfg);

}  // namespace tmc
