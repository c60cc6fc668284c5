#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tmc/config.hpp"
#include "tmc/evaluation.hpp"
#include "tmc/pipeline.hpp"
#include "tmc/render.hpp"
#include "tmc/synth.hpp"
#include "tmc/trajectory.hpp"

namespace {

tmc::RunConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    return tmc::RunConfig::from_file(path);
}

void print_diagnostics(const tmc::Diagnostics& diag) {
    for (const auto& note : diag.notes) std::cerr << "note: " << note << '\n';
}

int cmd_train(const std::string& input, const std::string& config_path,
              const std::string& output, std::optional<int> k_override) {
    tmc::RunConfig cfg = load_config(config_path);
    if (k_override) cfg.pipeline.k_movements = *k_override;

    const tmc::ApproachDataset dataset = tmc::load_trajectories(input);
    tmc::Diagnostics diag;
    const tmc::MovementModel model = tmc::train(dataset, cfg.pipeline, &diag);
    print_diagnostics(diag);
    tmc::save_model(model, output);

    std::cerr << "trained on " << dataset.trajectories.size() << " trajectories; stopbar y="
              << tmc::format_double(model.stopbar.y_sl) << "; " << model.movements.size()
              << " movements -> " << output << '\n';
    return 0;
}

int cmd_classify(const std::string& input, const std::string& model_path,
                 const std::string& output, const std::string& counts_path) {
    const tmc::MovementModel model = tmc::load_model(model_path);
    const tmc::ApproachDataset dataset = tmc::load_trajectories(input);
    const tmc::ClassificationResult result = tmc::classify_dataset(dataset, model);
    tmc::save_labels(result, output);

    std::ostringstream counts;
    counts << "label,count\n";
    for (const auto& [label, count] : result.counts) counts << label.str() << ',' << count << '\n';
    counts << "Unknown," << result.unknown_count << '\n';
    if (counts_path.empty()) {
        std::cout << counts.str();
    } else {
        std::ofstream out(counts_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write counts file: " + counts_path);
        out << counts.str();
    }
    return 0;
}

int cmd_evaluate(const std::string& labels_path, const std::string& truth_path,
                 const std::string& policy_text, const std::string& json_path) {
    const auto truth = tmc::load_truth(truth_path);
    const auto predictions = tmc::load_labels(labels_path);
    const tmc::UnknownPolicy policy = tmc::parse_unknown_policy(policy_text);

    tmc::Diagnostics diag;
    const tmc::MetricsReport report = tmc::evaluate_predictions(truth, predictions, policy, &diag);
    print_diagnostics(diag);

    std::cout << tmc::metrics_report_text(report);
    if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write report file: " + json_path);
        out << tmc::metrics_report_json(report);
    }
    return 0;
}

int cmd_generate(const std::string& config_path, const std::string& output,
                 std::optional<std::uint64_t> seed_override) {
    tmc::RunConfig cfg = load_config(config_path);
    if (cfg.scene.movements.empty()) {
        throw std::runtime_error("generate: config does not declare scene.movements");
    }
    if (seed_override) cfg.scene.seed = *seed_override;

    const tmc::GeneratedScene scene = tmc::generate(cfg.scene);
    tmc::write_scene(scene, output);
    std::cerr << "generated " << scene.dataset.trajectories.size() << " trajectories ("
              << scene.truncated_ids.size() << " truncated) -> " << output << '\n';
    return 0;
}

int cmd_render(const std::string& input, const std::string& model_path,
               const std::string& output) {
    const tmc::ApproachDataset dataset = tmc::load_trajectories(input);
    std::optional<tmc::MovementModel> model;
    if (!model_path.empty()) model = tmc::load_model(model_path);
    tmc::render_svg_file(dataset, model ? &*model : nullptr, output);
    std::cerr << "rendered " << dataset.trajectories.size() << " trajectories -> " << output
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vehicle movement classification for intersection approach trajectories"};
    app.require_subcommand(1);

    std::string config_path, input, output, model_path, counts_path, labels_path, truth_path;
    std::string policy = "count-as-error";
    std::string json_path;
    std::optional<int> k_override;
    std::optional<std::uint64_t> seed_override;

    auto* train = app.add_subcommand("train", "Train a movement model from a trajectory CSV");
    train->add_option("--input", input, "Trajectory CSV")->required();
    train->add_option("--config", config_path, "Config file");
    train->add_option("--output", output, "Model JSON path")->required();
    train->add_option("--k", k_override, "Override pipeline.k_movements");

    auto* classify = app.add_subcommand("classify", "Assign movements with a trained model");
    classify->add_option("--input", input, "Trajectory CSV")->required();
    classify->add_option("--model", model_path, "Model JSON")->required();
    classify->add_option("--output", output, "Per-vehicle labels CSV")->required();
    classify->add_option("--counts", counts_path,
                         "Counts CSV path (default: print to stdout)");

    auto* evaluate = app.add_subcommand("evaluate", "Score labels against ground truth");
    evaluate->add_option("--labels", labels_path, "Predicted labels CSV")->required();
    evaluate->add_option("--truth", truth_path, "Ground truth CSV")->required();
    evaluate->add_option("--policy", policy, "Unknown policy: count-as-error|exclude")
        ->check(CLI::IsMember({"count-as-error", "exclude"}));
    evaluate->add_option("--json", json_path, "Also write the report as JSON");

    auto* generate = app.add_subcommand("generate", "Generate a synthetic labelled scene");
    generate->add_option("--config", config_path, "Config file with scene.* keys")->required();
    generate->add_option("--output", output, "Trajectory CSV path (truth sidecar written "
                                             "next to it)")
        ->required();
    generate->add_option("--seed", seed_override, "Override scene.seed");

    auto* render = app.add_subcommand("render", "Render a scene (and optional model) to SVG");
    render->add_option("--input", input, "Trajectory CSV")->required();
    render->add_option("--model", model_path, "Model JSON (adds clusters and stopbar)");
    render->add_option("--output", output, "SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(input, config_path, output, k_override);
        if (classify->parsed()) return cmd_classify(input, model_path, output, counts_path);
        if (evaluate->parsed()) return cmd_evaluate(labels_path, truth_path, policy, json_path);
        if (generate->parsed()) return cmd_generate(config_path, output, seed_override);
        if (render->parsed()) return cmd_render(input, model_path, output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
