#include "tmc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace tmc {

int PipelineConfig::lanes_for(int cluster_index) const {
    const auto it = lanes_per_movement.find(cluster_index);
    return it == lanes_per_movement.end() ? 1 : it->second;
}

void PipelineConfig::validate() const {
    similarity.validate();
    if (k_movements < 1) throw std::invalid_argument("PipelineConfig: k_movements must be >= 1");
    if (min_points < 2) throw std::invalid_argument("PipelineConfig: min_points must be >= 2");
    if (stop_displacement_tolerance < 0) {
        throw std::invalid_argument("PipelineConfig: stop_displacement_tolerance must be >= 0");
    }
    if (min_cluster_fraction < 0.0 || min_cluster_fraction >= 1.0) {
        throw std::invalid_argument("PipelineConfig: min_cluster_fraction must be in [0, 1)");
    }
    for (const auto& [index, lanes] : lanes_per_movement) {
        if (index < 0 || lanes < 1) {
            throw std::invalid_argument("PipelineConfig: lanes_per_movement entries must map a "
                                        "cluster index >= 0 to a lane count >= 1");
        }
    }
}

namespace {

DissimilarityMatrix pairwise_impl(const std::vector<Trajectory>& trajectories,
                                  const SimilarityConfig& cfg, bool include_proximity,
                                  bool parallel, Diagnostics* diag) {
    cfg.validate();
    const std::size_t n = trajectories.size();
    DissimilarityMatrix m(n);
    if (n < 2) return m;

    // Flattened upper triangle, one independent evaluation per pair.
    const std::size_t pairs = n * (n - 1) / 2;
    std::vector<double> values(pairs);
    std::vector<unsigned char> fallback(pairs, 0);

    const auto evaluate = [&](std::size_t p) {
        // Unrank p -> (i, j), j > i, row-major over the upper triangle.
        std::size_t i = 0;
        std::size_t offset = p;
        std::size_t row_len = n - 1;
        while (offset >= row_len) {
            offset -= row_len;
            --row_len;
            ++i;
        }
        const std::size_t j = i + 1 + offset;
        const SimilarityBreakdown b =
            composite_similarity(trajectories[i], trajectories[j], cfg, include_proximity);
        values[p] = b.s;
        fallback[p] = b.angle_fallback ? 1 : 0;
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic, 32)
        for (long long p = 0; p < static_cast<long long>(pairs); ++p) {
            evaluate(static_cast<std::size_t>(p));
        }
    } else {
        for (std::size_t p = 0; p < pairs; ++p) evaluate(p);
    }

    std::size_t p = 0;
    std::size_t fallbacks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++p) {
            m.set(i, j, values[p]);
            fallbacks += fallback[p];
        }
    }
    if (diag && fallbacks > 0) {
        diag->angle_fallbacks += fallbacks;
        diag->note("pairwise matrix: " + std::to_string(fallbacks) +
                   " pair(s) used the degenerate-angle fallback");
    }
    return m;
}

}  // namespace

DissimilarityMatrix pairwise_dissimilarity(const std::vector<Trajectory>& trajectories,
                                           const SimilarityConfig& cfg, bool include_proximity,
                                           Execution exec, Diagnostics* diag) {
    return pairwise_impl(trajectories, cfg, include_proximity, exec == Execution::Parallel, diag);
}

DissimilarityMatrix pairwise_dissimilarity_serial(const std::vector<Trajectory>& trajectories,
                                                  const SimilarityConfig& cfg,
                                                  bool include_proximity, Diagnostics* diag) {
    return pairwise_impl(trajectories, cfg, include_proximity, false, diag);
}

std::vector<TrackPoint> stopped_points(const ApproachDataset& dataset, double tolerance) {
    std::vector<TrackPoint> stopped;
    for (const auto& t : dataset.trajectories) {
        for (std::size_t k = 0; k + 1 < t.size(); ++k) {
            if (t.points[k + 1].frame != t.points[k].frame + 1) continue;
            if (distance(t.points[k], t.points[k + 1]) <= tolerance) {
                stopped.push_back(t.points[k]);
            }
        }
    }
    return stopped;
}

double percentile_linear(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile_linear: empty input");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("percentile_linear: p must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double rank = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Stopbar find_stopbar(const ApproachDataset& dataset, const PipelineConfig& cfg,
                     Diagnostics* diag) {
    cfg.validate();
    if (dataset.trajectories.empty()) {
        throw std::runtime_error("find_stopbar: empty dataset");
    }
    const auto stopped = stopped_points(dataset, cfg.stop_displacement_tolerance);
    if (!stopped.empty()) {
        std::vector<double> ys;
        ys.reserve(stopped.size());
        for (const auto& p : stopped) ys.push_back(p.y);
        return Stopbar{percentile_linear(std::move(ys), 0.5)};
    }

    // Free-flow fallback: no vehicle ever dwelt for two consecutive frames.
    std::vector<double> all_ys;
    for (const auto& t : dataset.trajectories) {
        for (const auto& p : t.points) all_ys.push_back(p.y);
    }
    const double y = percentile_linear(std::move(all_ys), 0.25);
    if (diag) {
        diag->stopbar_fallback = true;
        diag->note("find_stopbar: no stopped locations, fell back to the 25th percentile of all "
                   "y values (" + format_double(y) + ")");
    }
    return Stopbar{y};
}

Trajectory clip_below_stopbar(const Trajectory& t, const Stopbar& stopbar) {
    Trajectory clipped;
    clipped.vehicle_id = t.vehicle_id;
    for (const auto& p : t.points) {
        if (p.y >= stopbar.y_sl) clipped.points.push_back(p);
    }
    return clipped;
}

std::vector<Trajectory> extract_valid_set(const ApproachDataset& dataset, const Stopbar& stopbar,
                                          const PipelineConfig& cfg, Diagnostics* diag) {
    cfg.validate();
    std::vector<Trajectory> valid;
    std::size_t dropped = 0;
    for (const auto& t : dataset.trajectories) {
        Trajectory clipped = clip_below_stopbar(t, stopbar);
        if (clipped.size() < static_cast<std::size_t>(cfg.min_points)) {
            ++dropped;
            continue;
        }
        valid.push_back(std::move(clipped));
    }
    if (diag && dropped > 0) {
        diag->short_trajectories_dropped += dropped;
        diag->note("extract_valid_set: dropped " + std::to_string(dropped) +
                   " trajectorie(s) with fewer than " + std::to_string(cfg.min_points) +
                   " points below the stopbar");
    }
    if (valid.empty()) {
        throw std::runtime_error("extract_valid_set: no trajectory has at least " +
                                 std::to_string(cfg.min_points) + " points below y=" +
                                 format_double(stopbar.y_sl));
    }
    return valid;
}

ClusterAssignment cluster_movements(const std::vector<Trajectory>& valid,
                                    const PipelineConfig& cfg, Diagnostics* diag) {
    cfg.validate();
    if (valid.size() < static_cast<std::size_t>(cfg.k_movements)) {
        throw std::runtime_error("cluster_movements: " + std::to_string(valid.size()) +
                                 " trajectories but k_movements=" +
                                 std::to_string(cfg.k_movements));
    }
    const DissimilarityMatrix m = pairwise_dissimilarity(valid, cfg.similarity,
                                                         /*include_proximity=*/true,
                                                         Execution::Parallel, diag);
    ClusterAssignment clusters = agglomerate(m, cfg.k_movements, Linkage::Single);
    if (diag) {
        const auto outliers = outlier_clusters(clusters, cfg);
        for (std::size_t c = 0; c < outliers.size(); ++c) {
            if (outliers[c]) {
                diag->outlier_clusters.push_back(static_cast<int>(c));
                diag->note("cluster_movements: cluster " + std::to_string(c) +
                           " is below min_cluster_fraction and is excluded from modelling "
                           "selection");
            }
        }
    }
    return clusters;
}

std::vector<bool> outlier_clusters(const ClusterAssignment& clusters, const PipelineConfig& cfg) {
    const auto sizes = cluster_sizes(clusters);
    const double threshold = cfg.min_cluster_fraction * static_cast<double>(clusters.labels.size());
    std::vector<bool> outlier(sizes.size(), false);
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        outlier[c] = static_cast<double>(sizes[c]) < threshold;
    }
    return outlier;
}

namespace {

// Signed angle (degrees) from `from` to `to`, positive clockwise in image
// coordinates (y down). With the camera facing oncoming traffic a left turn
// bends toward negative angles.
double signed_heading_change_deg(Vec2 from, Vec2 to) {
    const double cross = from.x * to.y - from.y * to.x;
    const double dot = from.x * to.x + from.y * to.y;
    return std::atan2(cross, dot) * 180.0 / std::numbers::pi;
}

Vec2 unit_or_zero(Vec2 v) {
    const double n = v.norm();
    return n == 0.0 ? Vec2{0.0, 0.0} : Vec2{v.x / n, v.y / n};
}

}  // namespace

std::vector<MovementLabel> name_clusters(const std::vector<Trajectory>& valid,
                                         const ClusterAssignment& clusters,
                                         const PipelineConfig& cfg) {
    const std::size_t k = static_cast<std::size_t>(clusters.k);
    std::vector<Vec2> mean_dir(k, Vec2{0.0, 0.0});
    Vec2 dominant{0.0, 0.0};
    for (std::size_t i = 0; i < valid.size(); ++i) {
        const Vec2 u = unit_or_zero(net_vector(valid[i]));
        const auto c = static_cast<std::size_t>(clusters.labels[i]);
        mean_dir[c] = mean_dir[c] + u;
        dominant = dominant + u;
    }

    std::vector<double> heading(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        heading[c] = signed_heading_change_deg(dominant, mean_dir[c]);
    }

    std::vector<std::size_t> order(k);
    for (std::size_t c = 0; c < k; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (heading[a] != heading[b]) return heading[a] < heading[b];
        return a < b;
    });

    const auto outliers = outlier_clusters(clusters, cfg);
    const std::size_t named =
        static_cast<std::size_t>(std::count(outliers.begin(), outliers.end(), false));

    std::vector<MovementLabel> labels(k, MovementLabel::unknown());
    int rank = 0;
    int named_rank = 0;
    for (std::size_t c : order) {
        if (named == 3 && !outliers[c]) {
            labels[c] = named_rank == 0   ? MovementLabel::left()
                        : named_rank == 1 ? MovementLabel::through()
                                          : MovementLabel::right();
            ++named_rank;
        } else {
            labels[c] = MovementLabel::cluster(rank);
        }
        ++rank;
    }
    return labels;
}

MovementModel select_modelling_trajectories(const std::vector<Trajectory>& valid,
                                            const ClusterAssignment& clusters,
                                            const PipelineConfig& cfg, const Stopbar& stopbar,
                                            const std::string& approach_id, Diagnostics* diag) {
    cfg.validate();
    if (valid.size() != clusters.labels.size()) {
        throw std::invalid_argument("select_modelling_trajectories: assignment does not match "
                                    "the trajectory list");
    }

    const auto names = name_clusters(valid, clusters, cfg);
    const auto outliers = outlier_clusters(clusters, cfg);

    MovementModel model;
    model.approach_id = approach_id;
    model.stopbar = stopbar;
    model.config = cfg;

    // Keep movements ordered leftmost-heading first, matching the name ranks.
    std::vector<std::pair<MovementLabel, int>> ordered;
    for (int c = 0; c < clusters.k; ++c) {
        if (!outliers[static_cast<std::size_t>(c)]) ordered.emplace_back(names[c], c);
    }
    std::sort(ordered.begin(), ordered.end());

    for (const auto& [label, cluster_index] : ordered) {
        std::vector<Trajectory> group;
        for (std::size_t i = 0; i < valid.size(); ++i) {
            if (clusters.labels[i] == cluster_index) group.push_back(valid[i]);
        }

        int lanes = cfg.lanes_for(cluster_index);
        if (static_cast<std::size_t>(lanes) > group.size()) {
            if (diag) {
                ++diag->lane_count_clamps;
                diag->note("select_modelling_trajectories: cluster " +
                           std::to_string(cluster_index) + " has " +
                           std::to_string(group.size()) + " members, clamping lanes from " +
                           std::to_string(lanes));
            }
            lanes = static_cast<int>(group.size());
        }

        ClusterAssignment sub;
        if (lanes == 1) {
            sub.labels.assign(group.size(), 0);
            sub.k = 1;
        } else {
            // Lane-level structure: average linkage, proximity factor dropped
            // so incomplete tracks stay with their lane.
            const DissimilarityMatrix m = pairwise_dissimilarity(group, cfg.similarity,
                                                                 /*include_proximity=*/false,
                                                                 Execution::Parallel, diag);
            sub = agglomerate(m, lanes, Linkage::Average);
        }

        MovementEntry entry;
        entry.label = label;
        entry.cluster_index = cluster_index;
        for (int lane = 0; lane < sub.k; ++lane) {
            const Trajectory* best = nullptr;
            double best_len = -1.0;
            for (std::size_t i = 0; i < group.size(); ++i) {
                if (sub.labels[i] != lane) continue;
                const double len = net_length(group[i]);
                if (best == nullptr || len > best_len ||
                    (len == best_len && group[i].vehicle_id < best->vehicle_id)) {
                    best = &group[i];
                    best_len = len;
                }
            }
            entry.modelling.push_back(*best);
        }
        model.movements.push_back(std::move(entry));
    }

    if (model.movements.empty()) {
        throw std::runtime_error("select_modelling_trajectories: every cluster was flagged as an "
                                 "outlier; lower min_cluster_fraction");
    }
    return model;
}

std::pair<MovementLabel, double> assign_movement(const Trajectory& t, const MovementModel& model) {
    const VehicleClassification c = assign_movement_detailed(t, model);
    return {c.label, c.similarity};
}

VehicleClassification assign_movement_detailed(const Trajectory& t, const MovementModel& model) {
    if (model.movements.empty()) {
        throw std::invalid_argument("assign_movement: model has no movements");
    }
    VehicleClassification out;
    const Trajectory clipped = clip_below_stopbar(t, model.stopbar);
    if (clipped.size() < 2) {
        out.label = MovementLabel::unknown();
        out.similarity = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    const SimilarityConfig& cfg = model.config.similarity;
    bool first = true;
    for (const auto& movement : model.movements) {
        MovementScore score;
        score.label = movement.label;
        bool first_model = true;
        for (const auto& m : movement.modelling) {
            const SimilarityBreakdown b =
                composite_similarity(clipped, m, cfg, /*include_proximity=*/false);
            if (first_model || b.s < score.best.s) {
                score.best = b;
                first_model = false;
            }
        }
        // Strict < keeps the first movement in model order on ties.
        if (first || score.best.s < out.similarity) {
            out.label = movement.label;
            out.similarity = score.best.s;
            first = false;
        }
        out.per_movement.push_back(std::move(score));
    }
    return out;
}

ClassificationResult classify_dataset(const ApproachDataset& dataset, const MovementModel& model) {
    ClassificationResult result;
    for (const auto& t : dataset.trajectories) {
        VehicleClassification c = assign_movement_detailed(t, model);
        if (c.label.is_unknown()) {
            ++result.unknown_count;
        } else {
            ++result.counts[c.label];
        }
        result.per_vehicle.emplace_back(t.vehicle_id, std::move(c));
    }
    return result;
}

MovementModel train(const ApproachDataset& dataset, const PipelineConfig& cfg, Diagnostics* diag) {
    cfg.validate();
    const auto stage = [](const char* name, auto&& fn) -> decltype(fn()) {
        try {
            return fn();
        } catch (const std::exception& e) {
            throw std::runtime_error("train[" + std::string(name) + "]: " + e.what());
        }
    };

    const Stopbar stopbar = stage("stopbar", [&] { return find_stopbar(dataset, cfg, diag); });
    const std::vector<Trajectory> valid =
        stage("valid-set", [&] { return extract_valid_set(dataset, stopbar, cfg, diag); });
    const ClusterAssignment clusters =
        stage("clustering", [&] { return cluster_movements(valid, cfg, diag); });
    return stage("modelling-selection", [&] {
        return select_modelling_trajectories(valid, clusters, cfg, stopbar, dataset.approach_id,
                                             diag);
    });
}

// --- model serialization ---

namespace {

using nlohmann::json;

constexpr const char* kModelSchema = "movement-model/1";

json trajectory_to_json(const Trajectory& t) {
    json points = json::array();
    for (const auto& p : t.points) {
        points.push_back(json{{"frame", p.frame}, {"x", p.x}, {"y", p.y}});
    }
    return json{{"vehicle_id", t.vehicle_id}, {"points", std::move(points)}};
}

Trajectory trajectory_from_json(const json& j) {
    Trajectory t;
    t.vehicle_id = j.at("vehicle_id").get<std::string>();
    for (const auto& p : j.at("points")) {
        t.points.push_back(TrackPoint{p.at("frame").get<std::int64_t>(), p.at("x").get<double>(),
                                      p.at("y").get<double>()});
    }
    return t;
}

json config_to_json(const PipelineConfig& cfg) {
    json lanes = json::object();
    for (const auto& [index, count] : cfg.lanes_per_movement) {
        lanes[std::to_string(index)] = count;
    }
    return json{
        {"similarity",
         json{{"w1", cfg.similarity.w1},
              {"w2", cfg.similarity.w2},
              {"w3", cfg.similarity.w3},
              {"angle_threshold_deg", cfg.similarity.angle_threshold_deg},
              {"degree_divisor", cfg.similarity.degree_divisor}}},
        {"k_movements", cfg.k_movements},
        {"lanes_per_movement", std::move(lanes)},
        {"stop_displacement_tolerance", cfg.stop_displacement_tolerance},
        {"min_points", cfg.min_points},
        {"min_cluster_fraction", cfg.min_cluster_fraction},
    };
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig cfg;
    const json& sim = j.at("similarity");
    cfg.similarity.w1 = sim.at("w1").get<double>();
    cfg.similarity.w2 = sim.at("w2").get<double>();
    cfg.similarity.w3 = sim.at("w3").get<double>();
    cfg.similarity.angle_threshold_deg = sim.at("angle_threshold_deg").get<double>();
    cfg.similarity.degree_divisor = sim.at("degree_divisor").get<double>();
    cfg.k_movements = j.at("k_movements").get<int>();
    for (const auto& [key, value] : j.at("lanes_per_movement").items()) {
        cfg.lanes_per_movement[std::stoi(key)] = value.get<int>();
    }
    cfg.stop_displacement_tolerance = j.at("stop_displacement_tolerance").get<double>();
    cfg.min_points = j.at("min_points").get<int>();
    cfg.min_cluster_fraction = j.at("min_cluster_fraction").get<double>();
    return cfg;
}

}  // namespace

void save_model(const MovementModel& model, const std::filesystem::path& path) {
    json movements = json::array();
    for (const auto& m : model.movements) {
        json trajs = json::array();
        for (const auto& t : m.modelling) trajs.push_back(trajectory_to_json(t));
        movements.push_back(json{{"label", m.label.str()},
                                 {"cluster_index", m.cluster_index},
                                 {"modelling_trajectories", std::move(trajs)}});
    }
    const json doc{
        {"schema", kModelSchema},
        {"approach_id", model.approach_id},
        {"stopbar", json{{"y_sl", model.stopbar.y_sl}}},
        {"config", config_to_json(model.config)},
        {"movements", std::move(movements)},
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

MovementModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("model file is not valid JSON: " + path.string() + ": " +
                                 e.what());
    }
    try {
        if (doc.at("schema").get<std::string>() != kModelSchema) {
            throw std::runtime_error("unsupported schema '" +
                                     doc.at("schema").get<std::string>() + "'");
        }
        MovementModel model;
        model.approach_id = doc.at("approach_id").get<std::string>();
        model.stopbar.y_sl = doc.at("stopbar").at("y_sl").get<double>();
        model.config = config_from_json(doc.at("config"));
        for (const auto& m : doc.at("movements")) {
            MovementEntry entry;
            entry.label = MovementLabel::parse(m.at("label").get<std::string>());
            entry.cluster_index = m.at("cluster_index").get<int>();
            for (const auto& t : m.at("modelling_trajectories")) {
                entry.modelling.push_back(trajectory_from_json(t));
            }
            if (entry.modelling.empty()) {
                throw std::runtime_error("movement '" + entry.label.str() +
                                         "' has no modelling trajectories");
            }
            model.movements.push_back(std::move(entry));
        }
        if (model.movements.empty()) throw std::runtime_error("model has no movements");
        return model;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed model document: " + path.string() + ": " + e.what());
    }
}

}  // namespace tmc
