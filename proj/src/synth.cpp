#include "tmc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "tmc/evaluation.hpp"
#include "tmc/rng.hpp"

namespace tmc {

void SceneSpec::validate() const {
    if (movements.empty()) throw std::invalid_argument("SceneSpec: no movements");
    long long total = 0;
    for (const auto& m : movements) {
        if (m.lanes < 1) throw std::invalid_argument("SceneSpec: lanes must be >= 1");
        if (m.vehicles_per_lane < 0) {
            throw std::invalid_argument("SceneSpec: vehicle counts must be >= 0");
        }
        total += static_cast<long long>(m.lanes) * m.vehicles_per_lane;
    }
    if (total == 0) throw std::invalid_argument("SceneSpec: zero total vehicles");
    if (frame_width <= 0 || frame_height <= 0) {
        throw std::invalid_argument("SceneSpec: frame size must be positive");
    }
    if (noise_sigma < 0) throw std::invalid_argument("SceneSpec: noise_sigma must be >= 0");
    if (truncation_fraction < 0.0 || truncation_fraction >= 1.0) {
        throw std::invalid_argument("SceneSpec: truncation_fraction must be in [0, 1)");
    }
    if (truncation_range.first < 0.0 || truncation_range.second >= 1.0 ||
        truncation_range.first > truncation_range.second) {
        throw std::invalid_argument("SceneSpec: truncation_range must satisfy 0 <= min <= max < 1");
    }
    if (stop_fraction < 0.0 || stop_fraction > 1.0) {
        throw std::invalid_argument("SceneSpec: stop_fraction must be in [0, 1]");
    }
    if (lane_spacing <= 0 || movement_gap <= 0) {
        throw std::invalid_argument("SceneSpec: lane_spacing and movement_gap must be positive");
    }
}

namespace {

constexpr double kSpeed = 8.0;        // pixels per frame along the template
constexpr double kLaneStagger = 20.0; // later lanes of a movement enter this much lower

enum class Turn { None, ExitPositiveX, ExitNegativeX };

// Movement labels are from the driver's point of view. The camera faces
// oncoming traffic, so a driver's left turn exits toward growing image x.
Turn turn_of(const MovementLabel& label) {
    if (label == MovementLabel::left()) return Turn::ExitPositiveX;
    if (label == MovementLabel::right()) return Turn::ExitNegativeX;
    return Turn::None;
}

std::vector<Vec2> sample_centerline(const SceneSpec& spec, const SceneGeometry& geo, double x,
                                    double entry_y, Turn turn) {
    std::vector<Vec2> points;
    const double approach_len = geo.turn_y - entry_y;
    const double arc_len = geo.arc_radius * std::numbers::pi / 2.0;

    double total;
    if (turn == Turn::None) {
        total = geo.through_end_y - entry_y;
    } else {
        const double exit_x = geo.arc_radius;  // lateral offset once the arc completes
        const double run_len = turn == Turn::ExitPositiveX
                                   ? spec.frame_width - (x + exit_x)
                                   : x - exit_x;
        total = approach_len + arc_len + std::max(0.0, run_len);
    }

    for (double s = 0.0; s <= total; s += kSpeed) {
        Vec2 p;
        if (turn == Turn::None || s <= approach_len) {
            p = {x, entry_y + s};
        } else if (s <= approach_len + arc_len) {
            const double alpha = (s - approach_len) / geo.arc_radius;  // 0 .. pi/2
            const double lateral = geo.arc_radius * (1.0 - std::cos(alpha));
            p.x = turn == Turn::ExitPositiveX ? x + lateral : x - lateral;
            p.y = geo.turn_y + geo.arc_radius * std::sin(alpha);
        } else {
            const double run = s - approach_len - arc_len;
            const double exit_y = geo.turn_y + geo.arc_radius;
            p.x = turn == Turn::ExitPositiveX ? x + geo.arc_radius + run
                                              : x - geo.arc_radius - run;
            p.y = exit_y;
        }
        points.push_back(p);
    }
    return points;
}

char label_tag(const MovementLabel& label) {
    if (label == MovementLabel::left()) return 'L';
    if (label == MovementLabel::through()) return 'T';
    if (label == MovementLabel::right()) return 'R';
    return 'C';
}

}  // namespace

SceneGeometry scene_geometry(const SceneSpec& spec) {
    spec.validate();
    SceneGeometry geo;
    geo.entry_y = 0.06 * spec.frame_height;
    geo.stop_zone_y = 0.42 * spec.frame_height;
    geo.turn_y = geo.stop_zone_y + 0.08 * spec.frame_height;
    geo.arc_radius = 0.125 * spec.frame_height;
    geo.through_end_y = 0.97 * spec.frame_height;
    geo.speed = kSpeed;

    // Lay the movement blocks side by side, centered in the frame.
    double width = 0.0;
    for (std::size_t m = 0; m < spec.movements.size(); ++m) {
        width += (spec.movements[m].lanes - 1) * spec.lane_spacing;
        if (m + 1 < spec.movements.size()) width += spec.movement_gap;
    }
    double cursor = spec.frame_width / 2.0 - width / 2.0;

    for (const auto& movement : spec.movements) {
        for (int lane = 0; lane < movement.lanes; ++lane) {
            SceneGeometry::Lane l;
            l.label = movement.label;
            l.lane_index = lane;
            l.x = cursor + lane * spec.lane_spacing;
            l.entry_y = geo.entry_y + kLaneStagger * lane;
            l.centerline = sample_centerline(spec, geo, l.x, l.entry_y, turn_of(movement.label));
            geo.lanes.push_back(std::move(l));
        }
        cursor += (movement.lanes - 1) * spec.lane_spacing + spec.movement_gap;
    }
    return geo;
}

GeneratedScene generate(const SceneSpec& spec) {
    spec.validate();
    GeneratedScene scene;
    scene.geometry = scene_geometry(spec);
    scene.dataset.approach_id = "synthetic";

    SplitMix64 rng(spec.seed);

    std::size_t lane_cursor = 0;
    for (const auto& movement : spec.movements) {
        for (int lane = 0; lane < movement.lanes; ++lane, ++lane_cursor) {
            const auto& tmpl = scene.geometry.lanes[lane_cursor].centerline;
            for (int v = 0; v < movement.vehicles_per_lane; ++v) {
                Trajectory t;
                {
                    char id[32];
                    std::snprintf(id, sizeof(id), "%c%d_%03d", label_tag(movement.label), lane, v);
                    t.vehicle_id = id;
                }

                const std::int64_t start_frame = static_cast<std::int64_t>(rng.uniform_int(6000));
                const bool dwells = rng.uniform() < spec.stop_fraction;
                // Repeat count >= 2 guarantees at least one zero-displacement
                // consecutive frame pair.
                const std::size_t dwell_repeats = dwells ? 2 + rng.uniform_int(4) : 0;

                std::size_t dwell_index = 0;
                if (dwells) {
                    double best = std::abs(tmpl[0].y - scene.geometry.stop_zone_y);
                    for (std::size_t k = 1; k < tmpl.size(); ++k) {
                        const double d = std::abs(tmpl[k].y - scene.geometry.stop_zone_y);
                        if (d < best) {
                            best = d;
                            dwell_index = k;
                        }
                    }
                }

                std::int64_t frame = start_frame;
                for (std::size_t k = 0; k < tmpl.size(); ++k) {
                    Vec2 p = tmpl[k];
                    if (spec.noise_sigma > 0.0) {
                        p.x += spec.noise_sigma * rng.normal();
                        p.y += spec.noise_sigma * rng.normal();
                    }
                    t.points.push_back(TrackPoint{frame++, p.x, p.y});
                    if (dwells && k == dwell_index) {
                        // A stopped tracker re-reports the same box.
                        for (std::size_t r = 1; r < dwell_repeats; ++r) {
                            t.points.push_back(TrackPoint{frame++, p.x, p.y});
                        }
                    }
                }

                scene.truth.emplace(t.vehicle_id, movement.label);
                scene.dataset.trajectories.push_back(std::move(t));
            }
        }
    }

    // Tail truncation: an exact count of vehicles, chosen by shuffle.
    const std::size_t n = scene.dataset.trajectories.size();
    const auto n_truncated =
        static_cast<std::size_t>(std::llround(spec.truncation_fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.uniform_int(i)]);
    }
    for (std::size_t k = 0; k < n_truncated; ++k) {
        Trajectory& t = scene.dataset.trajectories[order[k]];
        const double fraction =
            rng.uniform(spec.truncation_range.first, spec.truncation_range.second);
        const auto remove =
            static_cast<std::size_t>(std::llround(fraction * static_cast<double>(t.size())));
        const std::size_t keep = std::max<std::size_t>(2, t.size() - remove);
        t.points.resize(keep);
        scene.truncated_ids.push_back(t.vehicle_id);
    }
    std::sort(scene.truncated_ids.begin(), scene.truncated_ids.end());
    return scene;
}

void write_scene(const GeneratedScene& scene, const std::filesystem::path& csv_path) {
    save_trajectories(scene.dataset, csv_path);
    std::filesystem::path truth_path = csv_path;
    truth_path.replace_filename(csv_path.stem().string() + "_truth.csv");
    save_truth(scene.truth, truth_path);
}

}  // namespace tmc
