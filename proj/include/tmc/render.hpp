#pragma once

#include <filesystem>
#include <string>

#include "tmc/pipeline.hpp"
#include "tmc/trajectory.hpp"

namespace tmc {

/// SVG 1.1 rendering of a scene: trajectory points as a scatter, and — when
/// a model is given — points colored by assigned movement, stopped locations
/// in red, the stopbar as a dashed horizontal line and the modelling
/// trajectories as thick polylines.
std::string render_svg(const ApproachDataset& dataset, const MovementModel* model = nullptr);

void render_svg_file(const ApproachDataset& dataset, const MovementModel* model,
                     const std::filesystem::path& path);

}  // namespace tmc
