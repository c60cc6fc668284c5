#include "tmc/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace tmc {

void ShapeSimilaritySpec::validate() const {
    if (movements.empty()) {
        throw std::invalid_argument("ShapeSimilaritySpec: no movements");
    }
    if (!(distance_limit > 0.0) || !(angle_limit > 0.0)) {
        throw std::invalid_argument("ShapeSimilaritySpec: limits must be positive");
    }
    for (const auto& [label, models] : movements) {
        if (models.empty()) {
            throw std::invalid_argument("ShapeSimilaritySpec: movement '" + label.str() +
                                        "' has no modelling trajectories");
        }
    }
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (cross > 0.0) return 1;
    if (cross < 0.0) return -1;
    return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Inclusive segment intersection: shared endpoints and collinear overlap
// count.
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

bool segment_crossing(const Trajectory& t, const VirtualLine& line) {
    if (t.size() < 2) {
        throw std::invalid_argument("segment_crossing: trajectory '" + t.vehicle_id +
                                    "' has fewer than 2 points");
    }
    if (line.a.x == line.b.x && line.a.y == line.b.y) {
        throw std::invalid_argument("segment_crossing: degenerate virtual line");
    }
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        if (segments_intersect(t.points[k].pos(), t.points[k + 1].pos(), line.a, line.b)) {
            return true;
        }
    }
    return false;
}

MovementLabel classify_line_based(const Trajectory& t, const LineBasedSpec& spec,
                                  Diagnostics* diag) {
    if (spec.movements.empty()) {
        throw std::invalid_argument("classify_line_based: empty spec");
    }
    MovementLabel result = MovementLabel::unknown();
    int matches = 0;
    for (const auto& [label, pair] : spec.movements) {
        if (segment_crossing(t, pair.entry) && segment_crossing(t, pair.exit)) {
            if (matches == 0) result = label;
            ++matches;
        }
    }
    if (matches > 1 && diag) {
        diag->note("classify_line_based: trajectory '" + t.vehicle_id + "' crossed " +
                   std::to_string(matches) + " complete line pairs, kept the first");
    }
    return result;
}

MovementLabel classify_shape_similarity(const Trajectory& t, const ShapeSimilaritySpec& spec,
                                        const SimilarityConfig& cfg) {
    spec.validate();
    if (t.size() < 2) {
        throw std::invalid_argument("classify_shape_similarity: trajectory '" + t.vehicle_id +
                                    "' has fewer than 2 points");
    }
    MovementLabel result = MovementLabel::unknown();
    double best = 0.0;
    bool found = false;
    for (const auto& [label, models] : spec.movements) {
        for (const auto& m : models) {
            const SimilarityBreakdown b =
                composite_similarity(t, m, cfg, /*include_proximity=*/false);
            if (b.d_s > spec.distance_limit || b.t_s > spec.angle_limit) continue;
            if (!found || b.s < best) {
                best = b.s;
                result = label;
                found = true;
            }
        }
    }
    return result;
}

}  // namespace tmc
