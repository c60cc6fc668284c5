#include "tmc/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tmc {

void SimilarityConfig::validate() const {
    if (w1 < 0 || w2 < 0 || w3 < 0) {
        throw std::invalid_argument("SimilarityConfig: weights must be non-negative");
    }
    if (!(angle_threshold_deg > 0.0) || angle_threshold_deg > 180.0) {
        throw std::invalid_argument("SimilarityConfig: angle_threshold_deg must be in (0, 180]");
    }
    if (!(degree_divisor > 0.0)) {
        throw std::invalid_argument("SimilarityConfig: degree_divisor must be positive");
    }
}

namespace {

void require_nonempty(const Trajectory& t, const char* op) {
    if (t.empty()) {
        throw std::invalid_argument(std::string(op) + ": trajectory '" + t.vehicle_id +
                                    "' is empty");
    }
}

void require_two_points(const Trajectory& t, const char* op) {
    if (t.size() < 2) {
        throw std::invalid_argument(std::string(op) + ": trajectory '" + t.vehicle_id +
                                    "' has fewer than 2 points");
    }
}

double sq_dist(const TrackPoint& a, const TrackPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Index of the point of t nearest to target; lowest index wins ties.
std::size_t nearest_index(const Trajectory& t, const TrackPoint& target) {
    std::size_t best = 0;
    double best_sq = sq_dist(t.points[0], target);
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double d = sq_dist(t.points[k], target);
        if (d < best_sq) {
            best_sq = d;
            best = k;
        }
    }
    return best;
}

// Segment of j matched to i: j's nearest point to i's start -> j's nearest
// point to i's end.
Vec2 matched_segment_vector(const Trajectory& i, const Trajectory& j) {
    const std::size_t a = nearest_index(j, i.front());
    const std::size_t b = nearest_index(j, i.back());
    return j.points[b].pos() - j.points[a].pos();
}

bool is_zero(Vec2 v) { return v.x == 0.0 && v.y == 0.0; }

double angle_between_deg(Vec2 u, Vec2 v) {
    const double cross = u.x * v.y - u.y * v.x;
    const double dot = u.x * v.x + u.y * v.y;
    return std::atan2(std::abs(cross), dot) * 180.0 / std::numbers::pi;
}

// Orders (i, j) so that the first trajectory is the one whose net vector is
// used: smaller net length first, vehicle_id as the symmetric tie-break.
std::pair<const Trajectory*, const Trajectory*> angle_order(const Trajectory& i,
                                                            const Trajectory& j) {
    const double li = net_length(i);
    const double lj = net_length(j);
    if (li < lj) return {&i, &j};
    if (lj < li) return {&j, &i};
    return i.vehicle_id <= j.vehicle_id ? std::pair{&i, &j} : std::pair{&j, &i};
}

struct AngleOutcome {
    double t_s = 0.0;
    int degenerate = 0;  // how many of the two vectors had zero length
};

AngleOutcome angle_similarity_outcome(const Trajectory& i, const Trajectory& j,
                                      double fallback_deg) {
    const auto [shorter, longer] = angle_order(i, j);
    const Vec2 reference = net_vector(*shorter);
    const Vec2 matched = matched_segment_vector(*shorter, *longer);
    AngleOutcome out;
    out.degenerate = static_cast<int>(is_zero(reference)) + static_cast<int>(is_zero(matched));
    if (out.degenerate == 2) {
        out.t_s = 0.0;
    } else if (out.degenerate == 1) {
        out.t_s = fallback_deg;
    } else {
        out.t_s = angle_between_deg(reference, matched);
    }
    return out;
}

double proximity_from_components(double t_s, double d_r, double d_s,
                                 const SimilarityConfig& cfg) {
    if (d_r < d_s && t_s > cfg.angle_threshold_deg) return 0.0;
    return (t_s / cfg.degree_divisor) * (d_r - d_s);
}

}  // namespace

double directed_hausdorff(const Trajectory& p, const Trajectory& q) {
    require_nonempty(p, "directed_hausdorff");
    require_nonempty(q, "directed_hausdorff");
    double max_min_sq = 0.0;
    for (const auto& a : p.points) {
        double min_sq = std::numeric_limits<double>::infinity();
        for (const auto& b : q.points) {
            min_sq = std::min(min_sq, sq_dist(a, b));
        }
        max_min_sq = std::max(max_min_sq, min_sq);
    }
    return std::sqrt(max_min_sq);
}

double distance_similarity(const Trajectory& i, const Trajectory& j) {
    return std::min(directed_hausdorff(i, j), directed_hausdorff(j, i));
}

double angle_difference(const Trajectory& i, const Trajectory& j) {
    require_two_points(i, "angle_difference");
    require_nonempty(j, "angle_difference");
    const Vec2 reference = net_vector(i);
    if (is_zero(reference)) {
        throw DegenerateVectorError("angle_difference: zero net vector for trajectory '" +
                                    i.vehicle_id + "'");
    }
    const Vec2 matched = matched_segment_vector(i, j);
    if (is_zero(matched)) {
        throw DegenerateVectorError(
            "angle_difference: matched segment on trajectory '" + j.vehicle_id +
            "' collapses to a point");
    }
    return angle_between_deg(reference, matched);
}

double angle_similarity(const Trajectory& i, const Trajectory& j) {
    require_two_points(i, "angle_similarity");
    require_two_points(j, "angle_similarity");
    const auto [shorter, longer] = angle_order(i, j);
    return angle_difference(*shorter, *longer);
}

double rear_distance(const Trajectory& a, const Trajectory& b) {
    require_nonempty(a, "rear_distance");
    require_nonempty(b, "rear_distance");
    return distance(a.back(), b.back());
}

double proximity_factor(const Trajectory& i, const Trajectory& j, const SimilarityConfig& cfg) {
    require_two_points(i, "proximity_factor");
    require_two_points(j, "proximity_factor");
    const double t_s = angle_similarity_outcome(i, j, cfg.angle_threshold_deg).t_s;
    const double d_s = distance_similarity(i, j);
    const double d_r = rear_distance(i, j);
    return proximity_from_components(t_s, d_r, d_s, cfg);
}

SimilarityBreakdown composite_similarity(const Trajectory& i, const Trajectory& j,
                                         const SimilarityConfig& cfg, bool include_proximity) {
    require_two_points(i, "composite_similarity");
    require_two_points(j, "composite_similarity");

    SimilarityBreakdown out;
    out.d_s = distance_similarity(i, j);
    const AngleOutcome angle = angle_similarity_outcome(i, j, cfg.angle_threshold_deg);
    out.t_s = angle.t_s;
    out.angle_fallback = angle.degenerate > 0;
    if (include_proximity) {
        out.p_e = proximity_from_components(out.t_s, rear_distance(i, j), out.d_s, cfg);
        out.s = cfg.w1 * out.d_s + cfg.w2 * out.t_s + cfg.w3 * out.p_e;
    } else {
        out.p_e = 0.0;
        out.s = cfg.w1 * out.d_s + cfg.w2 * out.t_s;
    }
    return out;
}

}  // namespace tmc
