#pragma once

#include "tmc/trajectory.hpp"

namespace tmc {

/// Weights and constants of the composite trajectory similarity. The default
/// degree divisor (3.6) scales the angle term against pixel distances inside
/// the proximity factor; the angle threshold (15 degrees) gates its negative
/// branch. Weights default to 1.
struct SimilarityConfig {
    double w1 = 1.0;  // weight on distance similarity (pixels)
    double w2 = 1.0;  // weight on angle similarity (degrees)
    double w3 = 1.0;  // weight on end-proximity factor
    double angle_threshold_deg = 15.0;
    double degree_divisor = 3.6;

    void validate() const;
};

/// All components of one pairwise similarity evaluation. Lower s means more
/// similar. angle_fallback is set when a degenerate matched vector forced the
/// documented angle substitute instead of a measured angle.
struct SimilarityBreakdown {
    double d_s = 0.0;  // min directed Hausdorff distance, pixels
    double t_s = 0.0;  // angle similarity, degrees in [0, 180]
    double p_e = 0.0;  // end-proximity factor, may be negative
    double s = 0.0;    // w1*d_s + w2*t_s + w3*p_e
    bool angle_fallback = false;
};

/// Thrown when an angle would be taken against a zero-length vector.
class DegenerateVectorError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// max over points of p of the min distance to points of q. Asymmetric.
double directed_hausdorff(const Trajectory& p, const Trajectory& q);

/// min(d_H(i,j), d_H(j,i)). Taking the smaller directed distance keeps a
/// fragment close to the full track it was clipped from. Symmetric.
double distance_similarity(const Trajectory& i, const Trajectory& j);

/// Unsigned angle in [0, 180] degrees between i's net vector and the segment
/// of j matched to i: the vector from j's point nearest i's start to j's
/// point nearest i's end (nearest by Euclidean distance, lowest index on
/// ties). Throws DegenerateVectorError when either vector has zero length.
double angle_difference(const Trajectory& i, const Trajectory& j);

/// Angle similarity: the trajectory with the smaller net length contributes
/// its net vector, the longer one the matched segment. Equal lengths are
/// ordered by vehicle_id so the result is symmetric. Throws
/// DegenerateVectorError like angle_difference.
double angle_similarity(const Trajectory& i, const Trajectory& j);

/// Euclidean distance between the two end points. Symmetric.
double rear_distance(const Trajectory& a, const Trajectory& b);

/// End-proximity factor:
///   (t_s / divisor) * (d_r - d_s)   when d_r >= d_s, or when d_r < d_s and
///                                   t_s <= angle threshold (then negative)
///   0                               when d_r < d_s and t_s > angle threshold
/// Positive values push apart movements with divergent end points; the
/// negative branch pulls together parallel lanes of one movement.
double proximity_factor(const Trajectory& i, const Trajectory& j, const SimilarityConfig& cfg);

/// Full composite similarity. With include_proximity=false the proximity
/// factor is recorded as 0 and s = w1*d_s + w2*t_s. Degenerate matched
/// vectors do not throw here: t_s falls back to 0 when both vectors are
/// degenerate and to the configured angle threshold when exactly one is,
/// with angle_fallback set in the result.
SimilarityBreakdown composite_similarity(const Trajectory& i, const Trajectory& j,
                                         const SimilarityConfig& cfg, bool include_proximity);

}  // namespace tmc
