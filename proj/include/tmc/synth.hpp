#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tmc/trajectory.hpp"

namespace tmc {

/// One movement stream at the synthetic approach.
struct MovementSpec {
    MovementLabel label;
    int lanes = 1;
    int vehicles_per_lane = 0;
};

/// Deterministic synthetic intersection approach: vehicles enter at the top
/// of the frame and drive toward the camera; through traffic runs straight
/// to the bottom edge, turns follow a quarter arc just below the stop zone
/// and leave through a side edge. Tail truncation models broken tracks,
/// dwell repetition models stopped vehicles.
struct SceneSpec {
    std::uint64_t seed = 1;
    double frame_width = 1280.0;
    double frame_height = 720.0;
    std::vector<MovementSpec> movements;
    double noise_sigma = 0.0;                          // pixels, per point
    double truncation_fraction = 0.0;                  // share of vehicles truncated
    std::pair<double, double> truncation_range{0.15, 0.55};  // tail fraction removed
    double stop_fraction = 0.0;                        // share of vehicles that dwell
    double lane_spacing = 40.0;                        // pixels between lanes of one movement
    double movement_gap = 120.0;                       // pixels between adjacent movements

    void validate() const;
};

/// Frame-derived template geometry, exposed so tests can place virtual lines
/// and check stopbar recovery against known values.
struct SceneGeometry {
    double entry_y = 0.0;
    double stop_zone_y = 0.0;   // dwell anchor line
    double turn_y = 0.0;        // where the turn arcs begin
    double arc_radius = 0.0;
    double through_end_y = 0.0;
    double speed = 0.0;         // pixels per frame

    struct Lane {
        MovementLabel label;
        int lane_index = 0;     // within its movement
        double x = 0.0;         // approach centerline
        double entry_y = 0.0;   // lane 0 enters first and is the longest
        std::vector<Vec2> centerline;  // template polyline, one vertex per frame step
    };
    std::vector<Lane> lanes;
};

SceneGeometry scene_geometry(const SceneSpec& spec);

struct GeneratedScene {
    ApproachDataset dataset;
    std::map<std::string, MovementLabel> truth;
    std::vector<std::string> truncated_ids;
    SceneGeometry geometry;
};

/// Deterministic for a fixed spec (single SplitMix64 stream consumed in
/// documented order: per vehicle start frame, dwell decision and length,
/// per-point jitter; then truncation selection and per-vehicle tail
/// fraction).
GeneratedScene generate(const SceneSpec& spec);

/// Writes the trajectory CSV plus a `<stem>_truth.csv` sidecar next to it.
void write_scene(const GeneratedScene& scene, const std::filesystem::path& csv_path);

}  // namespace tmc
