#include "tmc/render.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace tmc {

namespace {

const char* kPalette[] = {"#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#17becf", "#bcbd22", "#e377c2"};

std::string color_for(std::size_t index) {
    return kPalette[index % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

struct Bounds {
    double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;
};

Bounds data_bounds(const ApproachDataset& dataset) {
    Bounds b;
    bool first = true;
    for (const auto& t : dataset.trajectories) {
        for (const auto& p : t.points) {
            if (first) {
                b = {p.x, p.y, p.x, p.y};
                first = false;
            } else {
                b.min_x = std::min(b.min_x, p.x);
                b.min_y = std::min(b.min_y, p.y);
                b.max_x = std::max(b.max_x, p.x);
                b.max_y = std::max(b.max_y, p.y);
            }
        }
    }
    const double margin = 20.0;
    b.min_x -= margin;
    b.min_y -= margin;
    b.max_x += margin;
    b.max_y += margin;
    return b;
}

void emit_polyline(std::ostream& out, const Trajectory& t, const std::string& color,
                   double width) {
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
        << format_double(width) << "\" points=\"";
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (k > 0) out << ' ';
        out << format_double(t.points[k].x) << ',' << format_double(t.points[k].y);
    }
    out << "\"/>\n";
}

}  // namespace

std::string render_svg(const ApproachDataset& dataset, const MovementModel* model) {
    const Bounds b = data_bounds(dataset);
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\""
        << format_double(b.min_x) << ' ' << format_double(b.min_y) << ' '
        << format_double(b.max_x - b.min_x) << ' ' << format_double(b.max_y - b.min_y)
        << "\">\n";
    out << "  <rect x=\"" << format_double(b.min_x) << "\" y=\"" << format_double(b.min_y)
        << "\" width=\"" << format_double(b.max_x - b.min_x) << "\" height=\""
        << format_double(b.max_y - b.min_y) << "\" fill=\"white\"/>\n";

    // Assign one color per movement label when a model is available.
    std::map<MovementLabel, std::string> movement_color;
    if (model != nullptr) {
        for (std::size_t m = 0; m < model->movements.size(); ++m) {
            movement_color[model->movements[m].label] = color_for(m);
        }
    }

    for (const auto& t : dataset.trajectories) {
        std::string color = "#9aa0a6";
        if (model != nullptr) {
            const auto [label, s] = assign_movement(t, *model);
            (void)s;
            const auto it = movement_color.find(label);
            if (it != movement_color.end()) color = it->second;
        }
        for (const auto& p : t.points) {
            out << "  <circle cx=\"" << format_double(p.x) << "\" cy=\"" << format_double(p.y)
                << "\" r=\"1.5\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
        }
    }

    if (model != nullptr) {
        for (const auto& p :
             stopped_points(dataset, model->config.stop_displacement_tolerance)) {
            out << "  <circle cx=\"" << format_double(p.x) << "\" cy=\"" << format_double(p.y)
                << "\" r=\"2.5\" fill=\"#d62728\"/>\n";
        }
        out << "  <line x1=\"" << format_double(b.min_x) << "\" y1=\""
            << format_double(model->stopbar.y_sl) << "\" x2=\"" << format_double(b.max_x)
            << "\" y2=\"" << format_double(model->stopbar.y_sl)
            << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"8,4\"/>\n";
        out << "  <text x=\"" << format_double(b.min_x + 6.0) << "\" y=\""
            << format_double(model->stopbar.y_sl - 6.0)
            << "\" font-size=\"14\" fill=\"#d62728\">stopbar</text>\n";

        for (const auto& movement : model->movements) {
            const std::string& color = movement_color[movement.label];
            for (const auto& m : movement.modelling) emit_polyline(out, m, color, 3.0);
            if (!movement.modelling.empty() && !movement.modelling.front().empty()) {
                const TrackPoint& p = movement.modelling.front().back();
                out << "  <text x=\"" << format_double(p.x + 4.0) << "\" y=\""
                    << format_double(p.y) << "\" font-size=\"14\" fill=\"" << color << "\">"
                    << movement.label.str() << "</text>\n";
            }
        }
    }

    out << "</svg>\n";
    return out.str();
}

void render_svg_file(const ApproachDataset& dataset, const MovementModel* model,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write SVG file: " + path.string());
    out << render_svg(dataset, model);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace tmc
