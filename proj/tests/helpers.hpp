#pragma once

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tmc/rng.hpp"
#include "tmc/trajectory.hpp"

namespace testutil {

inline tmc::Trajectory make_trajectory(const std::string& id,
                                       std::initializer_list<std::pair<double, double>> xy) {
    tmc::Trajectory t;
    t.vehicle_id = id;
    std::int64_t frame = 0;
    for (const auto& [x, y] : xy) t.points.push_back({frame++, x, y});
    return t;
}

inline tmc::Trajectory random_trajectory(tmc::SplitMix64& rng, const std::string& id,
                                         std::size_t max_points = 50, double box = 500.0) {
    tmc::Trajectory t;
    t.vehicle_id = id;
    const std::size_t n = 1 + rng.uniform_int(max_points);
    double x = rng.uniform(0.0, box);
    double y = rng.uniform(0.0, box);
    for (std::size_t k = 0; k < n; ++k) {
        t.points.push_back({static_cast<std::int64_t>(k), x, y});
        x += rng.uniform(-20.0, 20.0);
        y += rng.uniform(-20.0, 20.0);
    }
    return t;
}

inline bool same_points(const tmc::Trajectory& a, const tmc::Trajectory& b) {
    if (a.vehicle_id != b.vehicle_id || a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a.points[k].frame != b.points[k].frame || a.points[k].x != b.points[k].x ||
            a.points[k].y != b.points[k].y) {
            return false;
        }
    }
    return true;
}

/// Two flat clusterings describe the same partition (label names ignored).
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, std::set<std::size_t>> ca, cb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca[a[i]].insert(i);
        cb[b[i]].insert(i);
    }
    std::set<std::set<std::size_t>> sa, sb;
    for (auto& [k, v] : ca) sa.insert(v);
    for (auto& [k, v] : cb) sb.insert(v);
    return sa == sb;
}

class TempDir {
  public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("tmc_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
