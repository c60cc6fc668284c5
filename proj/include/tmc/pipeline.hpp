#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tmc/clustering.hpp"
#include "tmc/similarity.hpp"
#include "tmc/trajectory.hpp"

namespace tmc {

/// Non-fatal findings gathered while training or classifying. Counters are
/// machine-checkable, notes are for humans.
struct Diagnostics {
    std::vector<std::string> notes;
    bool stopbar_fallback = false;
    std::size_t short_trajectories_dropped = 0;
    std::size_t angle_fallbacks = 0;
    std::size_t lane_count_clamps = 0;
    std::vector<int> outlier_clusters;

    void note(std::string text) { notes.push_back(std::move(text)); }
};

/// Horizontal image line y = y_sl separating the approach corridor from the
/// region where movements diverge. Points above it are discarded before
/// clustering and assignment.
struct Stopbar {
    double y_sl = 0.0;
};

struct PipelineConfig {
    SimilarityConfig similarity;
    int k_movements = 3;
    /// Lanes per movement cluster, keyed by cluster index (0..k-1 as produced
    /// by cluster_movements). Missing entries default to 1 lane.
    std::map<int, int> lanes_per_movement;
    double stop_displacement_tolerance = 0.5;
    int min_points = 5;
    double min_cluster_fraction = 0.0;

    int lanes_for(int cluster_index) const;
    void validate() const;
};

/// The trained artifact: stopbar plus labelled modelling trajectories and a
/// snapshot of the config that produced them.
struct MovementEntry {
    MovementLabel label;
    int cluster_index = 0;
    std::vector<Trajectory> modelling;
};

struct MovementModel {
    std::string approach_id;
    Stopbar stopbar;
    PipelineConfig config;
    std::vector<MovementEntry> movements;  // ordered by heading, leftmost first
};

struct MovementScore {
    MovementLabel label;
    SimilarityBreakdown best;  // best modelling trajectory of that movement
};

struct VehicleClassification {
    MovementLabel label;  // Unknown when fewer than 2 points survive the stopbar
    double similarity = 0.0;
    std::vector<MovementScore> per_movement;
};

struct ClassificationResult {
    std::vector<std::pair<std::string, VehicleClassification>> per_vehicle;
    std::map<MovementLabel, long long> counts;  // excludes Unknown
    long long unknown_count = 0;
};

enum class Execution { Serial, Parallel };

/// Pairwise composite-similarity matrix over a trajectory list. The parallel
/// path distributes pairs across OpenMP threads; every entry is an
/// independent pure evaluation, so results are bitwise identical to the
/// serial reference regardless of scheduling.
DissimilarityMatrix pairwise_dissimilarity(const std::vector<Trajectory>& trajectories,
                                           const SimilarityConfig& cfg, bool include_proximity,
                                           Execution exec = Execution::Parallel,
                                           Diagnostics* diag = nullptr);

/// Serial reference implementation, kept as the comparison baseline for
/// tests and the benchmark.
DissimilarityMatrix pairwise_dissimilarity_serial(const std::vector<Trajectory>& trajectories,
                                                  const SimilarityConfig& cfg,
                                                  bool include_proximity,
                                                  Diagnostics* diag = nullptr);

/// Points whose displacement to the same vehicle's detection in the next
/// consecutive frame is at most `tolerance` pixels.
std::vector<TrackPoint> stopped_points(const ApproachDataset& dataset, double tolerance);

/// Percentile with linear interpolation between order statistics
/// (rank = p * (n - 1)). p in [0, 1].
double percentile_linear(std::vector<double> values, double p);

/// Stage 1: median y of the stopped locations. Approaches with free-flowing
/// traffic have no stopped locations; those fall back to the 25th percentile
/// of all point y values, with diag->stopbar_fallback set.
Stopbar find_stopbar(const ApproachDataset& dataset, const PipelineConfig& cfg,
                     Diagnostics* diag = nullptr);

/// Points of t at or below the stopbar, order preserved.
Trajectory clip_below_stopbar(const Trajectory& t, const Stopbar& stopbar);

/// Stage 1b: clips every trajectory to the region below the stopbar and
/// drops the ones left with fewer than min_points points.
std::vector<Trajectory> extract_valid_set(const ApproachDataset& dataset, const Stopbar& stopbar,
                                          const PipelineConfig& cfg, Diagnostics* diag = nullptr);

/// Stage 2: single-linkage clustering of the valid set under the composite
/// similarity with the proximity factor included, k = k_movements.
ClusterAssignment cluster_movements(const std::vector<Trajectory>& valid,
                                    const PipelineConfig& cfg, Diagnostics* diag = nullptr);

/// Clusters smaller than min_cluster_fraction * n, excluded from modelling
/// selection (never from diagnostics).
std::vector<bool> outlier_clusters(const ClusterAssignment& clusters, const PipelineConfig& cfg);

/// Heading-based movement names, one per cluster index. Clusters are ranked
/// by the signed angle of their mean travel direction relative to the
/// dominant direction of the whole valid set; with exactly three non-outlier
/// clusters the ranks map to Left / Through / Right (movement labels are from
/// the driver's point of view, with the camera facing oncoming traffic),
/// otherwise to generic Cluster(rank) labels. Outlier clusters keep generic
/// labels. Naming is cosmetic; evaluation aligns labels by best permutation.
std::vector<MovementLabel> name_clusters(const std::vector<Trajectory>& valid,
                                         const ClusterAssignment& clusters,
                                         const PipelineConfig& cfg);

/// Stage 3: sub-clusters each movement with average linkage and the
/// proximity factor dropped (k = lanes for that movement, clamped to the
/// cluster size), then picks each sub-cluster's longest trajectory by net
/// length (smallest vehicle_id on ties) as its modelling trajectory.
MovementModel select_modelling_trajectories(const std::vector<Trajectory>& valid,
                                            const ClusterAssignment& clusters,
                                            const PipelineConfig& cfg, const Stopbar& stopbar,
                                            const std::string& approach_id,
                                            Diagnostics* diag = nullptr);

/// Stage 4: clips the trajectory at the model's stopbar and assigns the
/// movement of the most similar modelling trajectory, proximity factor
/// omitted. Returns Unknown (with NaN similarity) when fewer than 2 points
/// remain; there is no acceptance threshold.
std::pair<MovementLabel, double> assign_movement(const Trajectory& t, const MovementModel& model);

/// assign_movement plus the per-movement breakdown.
VehicleClassification assign_movement_detailed(const Trajectory& t, const MovementModel& model);

ClassificationResult classify_dataset(const ApproachDataset& dataset, const MovementModel& model);

/// All four training stages in sequence. Deterministic for fixed input and
/// config. Errors carry the failing stage in their message.
MovementModel train(const ApproachDataset& dataset, const PipelineConfig& cfg,
                    Diagnostics* diag = nullptr);

/// Model (de)serialization as a self-describing JSON document. Lossless
/// round trip.
void save_model(const MovementModel& model, const std::filesystem::path& path);
MovementModel load_model(const std::filesystem::path& path);

}  // namespace tmc
