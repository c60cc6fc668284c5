#include "tmc/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tmc {

Vec2 net_vector(const Trajectory& t) {
    if (t.size() < 2) {
        throw std::invalid_argument("net_vector: trajectory '" + t.vehicle_id +
                                    "' has fewer than 2 points");
    }
    return t.back().pos() - t.front().pos();
}

double net_length(const Trajectory& t) {
    if (t.empty()) {
        throw std::invalid_argument("net_length: trajectory '" + t.vehicle_id + "' is empty");
    }
    if (t.size() == 1) return 0.0;
    return net_vector(t).norm();
}

const Trajectory* ApproachDataset::find(const std::string& vehicle_id) const {
    for (const auto& t : trajectories) {
        if (t.vehicle_id == vehicle_id) return &t;
    }
    return nullptr;
}

MovementLabel MovementLabel::cluster(int index) {
    if (index < 0) throw std::invalid_argument("MovementLabel::cluster: negative index");
    return MovementLabel(Kind::Cluster, index);
}

std::string MovementLabel::str() const {
    switch (kind_) {
        case Kind::Left: return "Left";
        case Kind::Through: return "Through";
        case Kind::Right: return "Right";
        case Kind::Cluster: return "Cluster" + std::to_string(index_);
        case Kind::Unknown: return "Unknown";
    }
    return "Unknown";
}

MovementLabel MovementLabel::parse(const std::string& text) {
    if (text == "Left") return left();
    if (text == "Through") return through();
    if (text == "Right") return right();
    if (text == "Unknown") return unknown();
    if (text.rfind("Cluster", 0) == 0) {
        const std::string digits = text.substr(7);
        if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
            return cluster(std::stoi(digits));
        }
    }
    throw std::invalid_argument("MovementLabel::parse: unrecognized label '" + text + "'");
}

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_finite_double(const std::string& text, std::size_t row, const char* what) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw std::runtime_error("row " + std::to_string(row) + ": cannot parse " + what +
                                 " value '" + text + "'");
    }
    if (!std::isfinite(value)) {
        throw std::runtime_error("row " + std::to_string(row) + ": non-finite " + what +
                                 " value '" + text + "'");
    }
    return value;
}

std::int64_t parse_frame(const std::string& text, std::size_t row) {
    std::int64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || value < 0) {
        throw std::runtime_error("row " + std::to_string(row) +
                                 ": frame must be a non-negative integer, got '" + text + "'");
    }
    return value;
}

}  // namespace

ApproachDataset load_trajectories(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trajectory file: " + path.string());
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty trajectory file (missing header): " + path.string());
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) != "vehicle_id,frame,x,y") {
        throw std::runtime_error("unexpected header '" + line +
                                 "', want 'vehicle_id,frame,x,y': " + path.string());
    }

    ApproachDataset dataset;
    dataset.approach_id = path.stem().string();

    std::map<std::string, std::size_t> index_of;  // vehicle_id -> trajectory slot
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        const auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw std::runtime_error("row " + std::to_string(row) + ": expected 4 fields, got " +
                                     std::to_string(fields.size()));
        }
        const std::string& vid = fields[0];
        if (vid.empty()) {
            throw std::runtime_error("row " + std::to_string(row) + ": empty vehicle_id");
        }

        TrackPoint p;
        p.frame = parse_frame(fields[1], row);
        p.x = parse_finite_double(fields[2], row, "x");
        p.y = parse_finite_double(fields[3], row, "y");

        auto [it, inserted] = index_of.try_emplace(vid, dataset.trajectories.size());
        if (inserted) {
            dataset.trajectories.push_back(Trajectory{vid, {}});
        }
        dataset.trajectories[it->second].points.push_back(p);
    }

    for (auto& t : dataset.trajectories) {
        std::stable_sort(t.points.begin(), t.points.end(),
                         [](const TrackPoint& a, const TrackPoint& b) { return a.frame < b.frame; });
        for (std::size_t i = 1; i < t.points.size(); ++i) {
            if (t.points[i].frame == t.points[i - 1].frame) {
                throw std::runtime_error("duplicate frame " + std::to_string(t.points[i].frame) +
                                         " for vehicle '" + t.vehicle_id + "'");
            }
        }
    }
    return dataset;
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

void save_trajectories(const ApproachDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write trajectory file: " + path.string());
    }
    out << "vehicle_id,frame,x,y\n";
    for (const auto& t : dataset.trajectories) {
        for (const auto& p : t.points) {
            out << t.vehicle_id << ',' << p.frame << ',' << format_double(p.x) << ','
                << format_double(p.y) << '\n';
        }
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

}  // namespace tmc
