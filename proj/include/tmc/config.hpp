#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tmc/baselines.hpp"
#include "tmc/pipeline.hpp"
#include "tmc/synth.hpp"

namespace tmc {

/// Shape-similarity baseline as declared in a config file: vehicle ids name
/// the manually chosen modelling trajectories inside some dataset.
struct ShapeSpecConfig {
    std::vector<std::pair<MovementLabel, std::vector<std::string>>> model_ids;
    double distance_limit = 0.0;
    double angle_limit = 0.0;

    ShapeSimilaritySpec resolve(const ApproachDataset& dataset) const;
};

/// One declarative `key = value` config file covering the pipeline, the
/// scene generator and the baseline specs. Unknown keys are rejected; flags
/// override file values. Lines starting with '#' are comments.
struct RunConfig {
    PipelineConfig pipeline;
    SceneSpec scene;
    std::optional<LineBasedSpec> line_spec;
    std::optional<ShapeSpecConfig> shape_spec;

    /// Applies one key/value pair (file line or flag override). Throws on
    /// unknown keys or malformed values.
    void set(const std::string& key, const std::string& value);

    static RunConfig from_file(const std::filesystem::path& path);
};

}  // namespace tmc
