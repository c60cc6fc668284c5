#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tmc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

/// One tracked detection in image coordinates. x grows rightward, y grows
/// downward (y = 0 is the top edge of the frame).
struct TrackPoint {
    std::int64_t frame = 0;
    double x = 0.0;
    double y = 0.0;

    Vec2 pos() const { return {x, y}; }
};

inline double distance(const TrackPoint& a, const TrackPoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Ordered track of one vehicle. Points are strictly increasing in frame;
/// frame gaps (missed detections) are allowed, no interpolation is done.
struct Trajectory {
    std::string vehicle_id;
    std::vector<TrackPoint> points;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
    const TrackPoint& front() const { return points.front(); }
    const TrackPoint& back() const { return points.back(); }
};

/// Net displacement vector, first point to last point.
/// Requires at least 2 points.
Vec2 net_vector(const Trajectory& t);

/// Endpoint displacement |last - first| in pixels. This is deliberately not
/// arc length: an out-and-back track has net length 0.
double net_length(const Trajectory& t);

/// All trajectories observed at one inbound intersection approach.
/// vehicle_id is unique within the dataset.
struct ApproachDataset {
    std::string approach_id;
    std::vector<Trajectory> trajectories;

    const Trajectory* find(const std::string& vehicle_id) const;
};

/// Movement type of a trajectory. Left/Through/Right are the named turning
/// movements; Cluster(k) is a machine label before a human (or the naming
/// heuristic) assigns a direction; Unknown marks tracks that could not be
/// classified and never appears inside a trained model.
class MovementLabel {
  public:
    MovementLabel() : kind_(Kind::Unknown) {}

    static MovementLabel left() { return MovementLabel(Kind::Left); }
    static MovementLabel through() { return MovementLabel(Kind::Through); }
    static MovementLabel right() { return MovementLabel(Kind::Right); }
    static MovementLabel unknown() { return MovementLabel(Kind::Unknown); }
    static MovementLabel cluster(int index);

    bool is_unknown() const { return kind_ == Kind::Unknown; }
    bool is_cluster() const { return kind_ == Kind::Cluster; }

    std::string str() const;
    static MovementLabel parse(const std::string& text);

    friend auto operator<=>(const MovementLabel&, const MovementLabel&) = default;

  private:
    enum class Kind : int { Left = 0, Through = 1, Right = 2, Cluster = 3, Unknown = 4 };
    explicit MovementLabel(Kind k, int index = 0) : kind_(k), index_(index) {}

    Kind kind_;
    int index_ = 0;
};

/// Reads a trajectory CSV (header `vehicle_id,frame,x,y`). Rows may arrive in
/// any order; they are grouped by vehicle id and sorted by frame. Malformed
/// rows, non-finite coordinates and duplicate (vehicle_id, frame) pairs throw
/// with the offending 1-based row number in the message.
ApproachDataset load_trajectories(const std::filesystem::path& path);

/// Writes the same CSV format back. Floats use 6 significant digits, so
/// load -> save is byte-stable once the values have passed through the
/// formatter.
void save_trajectories(const ApproachDataset& dataset, const std::filesystem::path& path);

/// Fixed output formatting for floating point values (6 significant digits).
std::string format_double(double value);

}  // namespace tmc
