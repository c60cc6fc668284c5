#include "tmc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tmc {

ShapeSimilaritySpec ShapeSpecConfig::resolve(const ApproachDataset& dataset) const {
    ShapeSimilaritySpec spec;
    spec.distance_limit = distance_limit;
    spec.angle_limit = angle_limit;
    for (const auto& [label, ids] : model_ids) {
        std::vector<Trajectory> models;
        for (const auto& id : ids) {
            const Trajectory* t = dataset.find(id);
            if (t == nullptr) {
                throw std::runtime_error("shape baseline: vehicle id '" + id +
                                         "' not present in the dataset");
            }
            models.push_back(*t);
        }
        spec.movements.emplace_back(label, std::move(models));
    }
    spec.validate();
    return spec;
}

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::stringstream ss(text);
    while (std::getline(ss, part, sep)) parts.push_back(trim(part));
    return parts;
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
        throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& value) {
    long long out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("config key '" + key + "': bad integer '" + value + "'");
    }
    return out;
}

VirtualLine parse_line(const std::string& key, const std::string& value) {
    const auto parts = split(value, ',');
    if (parts.size() != 4) {
        throw std::invalid_argument("config key '" + key + "': want 'x1,y1,x2,y2'");
    }
    return VirtualLine{{parse_double(key, parts[0]), parse_double(key, parts[1])},
                       {parse_double(key, parts[2]), parse_double(key, parts[3])}};
}

// "Right:1:20,Through:2:30,Left:1:20"
std::vector<MovementSpec> parse_movements(const std::string& key, const std::string& value) {
    std::vector<MovementSpec> out;
    for (const auto& item : split(value, ',')) {
        const auto fields = split(item, ':');
        if (fields.size() != 3) {
            throw std::invalid_argument("config key '" + key +
                                        "': want 'Label:lanes:vehicles_per_lane' items");
        }
        MovementSpec m;
        m.label = MovementLabel::parse(fields[0]);
        m.lanes = static_cast<int>(parse_int(key, fields[1]));
        m.vehicles_per_lane = static_cast<int>(parse_int(key, fields[2]));
        out.push_back(m);
    }
    return out;
}

// "0:1,1:2"
std::map<int, int> parse_lane_map(const std::string& key, const std::string& value) {
    std::map<int, int> out;
    for (const auto& item : split(value, ',')) {
        const auto fields = split(item, ':');
        if (fields.size() != 2) {
            throw std::invalid_argument("config key '" + key + "': want 'cluster:lanes' items");
        }
        out[static_cast<int>(parse_int(key, fields[0]))] =
            static_cast<int>(parse_int(key, fields[1]));
    }
    return out;
}

LinePair& line_pair_for(LineBasedSpec& spec, const MovementLabel& label) {
    for (auto& [l, pair] : spec.movements) {
        if (l == label) return pair;
    }
    spec.movements.emplace_back(label, LinePair{});
    return spec.movements.back().second;
}

std::vector<std::string>& shape_ids_for(ShapeSpecConfig& spec, const MovementLabel& label) {
    for (auto& [l, ids] : spec.model_ids) {
        if (l == label) return ids;
    }
    spec.model_ids.emplace_back(label, std::vector<std::string>{});
    return spec.model_ids.back().second;
}

}  // namespace

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);

    if (key == "similarity.w1") pipeline.similarity.w1 = parse_double(key, value);
    else if (key == "similarity.w2") pipeline.similarity.w2 = parse_double(key, value);
    else if (key == "similarity.w3") pipeline.similarity.w3 = parse_double(key, value);
    else if (key == "similarity.angle_threshold_deg")
        pipeline.similarity.angle_threshold_deg = parse_double(key, value);
    else if (key == "similarity.degree_divisor")
        pipeline.similarity.degree_divisor = parse_double(key, value);
    else if (key == "pipeline.k_movements")
        pipeline.k_movements = static_cast<int>(parse_int(key, value));
    else if (key == "pipeline.lanes_per_movement")
        pipeline.lanes_per_movement = parse_lane_map(key, value);
    else if (key == "pipeline.stop_displacement_tolerance")
        pipeline.stop_displacement_tolerance = parse_double(key, value);
    else if (key == "pipeline.min_points")
        pipeline.min_points = static_cast<int>(parse_int(key, value));
    else if (key == "pipeline.min_cluster_fraction")
        pipeline.min_cluster_fraction = parse_double(key, value);
    else if (key == "scene.seed")
        scene.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "scene.frame_width") scene.frame_width = parse_double(key, value);
    else if (key == "scene.frame_height") scene.frame_height = parse_double(key, value);
    else if (key == "scene.movements") scene.movements = parse_movements(key, value);
    else if (key == "scene.noise_sigma") scene.noise_sigma = parse_double(key, value);
    else if (key == "scene.truncation_fraction")
        scene.truncation_fraction = parse_double(key, value);
    else if (key == "scene.truncation_min")
        scene.truncation_range.first = parse_double(key, value);
    else if (key == "scene.truncation_max")
        scene.truncation_range.second = parse_double(key, value);
    else if (key == "scene.stop_fraction") scene.stop_fraction = parse_double(key, value);
    else if (key == "scene.lane_spacing") scene.lane_spacing = parse_double(key, value);
    else if (key == "scene.movement_gap") scene.movement_gap = parse_double(key, value);
    else if (key == "baseline.shape.distance_limit") {
        if (!shape_spec) shape_spec.emplace();
        shape_spec->distance_limit = parse_double(key, value);
    } else if (key == "baseline.shape.angle_limit") {
        if (!shape_spec) shape_spec.emplace();
        shape_spec->angle_limit = parse_double(key, value);
    } else if (key.rfind("baseline.shape.models.", 0) == 0) {
        const MovementLabel label = MovementLabel::parse(key.substr(22));
        if (!shape_spec) shape_spec.emplace();
        shape_ids_for(*shape_spec, label) = split(value, ',');
    } else if (key.rfind("baseline.line.", 0) == 0) {
        const std::string rest = key.substr(14);
        const auto dot = rest.rfind('.');
        if (dot == std::string::npos) {
            throw std::invalid_argument("config key '" + key +
                                        "': want baseline.line.<Label>.entry|exit");
        }
        const MovementLabel label = MovementLabel::parse(rest.substr(0, dot));
        const std::string which = rest.substr(dot + 1);
        if (!line_spec) line_spec.emplace();
        LinePair& pair = line_pair_for(*line_spec, label);
        if (which == "entry") pair.entry = parse_line(key, value);
        else if (which == "exit") pair.exit = parse_line(key, value);
        else {
            throw std::invalid_argument("config key '" + key +
                                        "': want baseline.line.<Label>.entry|exit");
        }
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());

    RunConfig cfg;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path.string() + ":" + std::to_string(row) +
                                     ": expected 'key = value'");
        }
        try {
            cfg.set(text.substr(0, eq), text.substr(eq + 1));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(row) + ": " + e.what());
        }
    }

    if (cfg.line_spec) {
        for (const auto& [label, pair] : cfg.line_spec->movements) {
            const auto degenerate = [](const VirtualLine& l) {
                return l.a.x == l.b.x && l.a.y == l.b.y;
            };
            if (degenerate(pair.entry) || degenerate(pair.exit)) {
                throw std::runtime_error(path.string() + ": line baseline movement '" +
                                         label.str() + "' needs both a non-degenerate entry and "
                                         "exit line");
            }
        }
    }
    return cfg;
}

}  // namespace tmc
