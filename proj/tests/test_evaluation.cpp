#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tmc/evaluation.hpp"
#include "tmc/rng.hpp"

using namespace tmc;

namespace {

const MovementLabel kLeft = MovementLabel::left();
const MovementLabel kThrough = MovementLabel::through();
const MovementLabel kRight = MovementLabel::right();

// The worked three-class example: rows actual, columns predicted.
ConfusionMatrix worked_example() {
    ConfusionMatrix cm;
    cm.classes = {kLeft, kThrough, kRight};
    cm.counts = {{8, 1, 1}, {0, 9, 1}, {0, 0, 10}};
    cm.unknown_by_class = {0, 0, 0};
    cm.policy = UnknownPolicy::CountAsError;
    return cm;
}

}  // namespace

TEST_CASE("build_confusion tallies actual vs predicted") {
    std::map<std::string, MovementLabel> truth = {
        {"a", kLeft}, {"b", kThrough}, {"c", kRight}, {"d", kLeft}};

    SUBCASE("perfect predictions give a diagonal matrix") {
        LabelledPredictions pred = {{"a", kLeft}, {"b", kThrough}, {"c", kRight}, {"d", kLeft}};
        const ConfusionMatrix cm = build_confusion(truth, pred, UnknownPolicy::CountAsError);
        REQUIRE(cm.classes.size() == 3);
        CHECK(cm.trace() == 4);
        CHECK(cm.total() == 4);
        CHECK(accuracy(cm) == 1.0);
        CHECK(balanced_accuracy(cm) == 1.0);
        CHECK(macro_f1(cm) == 1.0);
    }

    SUBCASE("one Left mispredicted as Through lands off-diagonal") {
        LabelledPredictions pred = {{"a", kThrough}, {"b", kThrough}, {"c", kRight}, {"d", kLeft}};
        const ConfusionMatrix cm = build_confusion(truth, pred, UnknownPolicy::CountAsError);
        // classes sorted Left, Through, Right
        CHECK(cm.counts[0][1] == 1);
        CHECK(cm.trace() == 3);
    }

    SUBCASE("unknown handling follows the policy") {
        LabelledPredictions pred = {{"a", MovementLabel::unknown()},
                                    {"b", kThrough},
                                    {"c", kRight},
                                    {"d", kLeft}};
        const ConfusionMatrix counted = build_confusion(truth, pred, UnknownPolicy::CountAsError);
        CHECK(counted.unknown_count == 1);
        CHECK(counted.total() == 4);
        CHECK(accuracy(counted) == 0.75);

        const ConfusionMatrix excluded = build_confusion(truth, pred, UnknownPolicy::Exclude);
        CHECK(excluded.unknown_count == 1);
        CHECK(excluded.total() == 3);
        CHECK(accuracy(excluded) == 1.0);
    }

    SUBCASE("a predicted id without truth is an error") {
        LabelledPredictions pred = {{"zz", kLeft}};
        CHECK_THROWS(build_confusion(truth, pred, UnknownPolicy::CountAsError));
    }
}

TEST_CASE("metrics on the worked example match hand-derived values") {
    const ConfusionMatrix cm = worked_example();
    CHECK(accuracy(cm) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(balanced_accuracy(cm) == doctest::Approx(0.9).epsilon(1e-12));
    const double expected_f1 = (8.0 / 9.0 + 9.0 / 10.0 + 10.0 / 11.0) / 3.0;
    CHECK(macro_f1(cm) == doctest::Approx(expected_f1).epsilon(1e-12));
    CHECK(std::abs(macro_f1(cm) - 0.89932) < 1e-5);
}

TEST_CASE("degenerate classes follow the documented conventions") {
    SUBCASE("a fully misclassified class zeroes one recall") {
        ConfusionMatrix cm;
        cm.classes = {kLeft, kThrough, kRight};
        cm.counts = {{0, 5, 0}, {0, 5, 0}, {0, 0, 5}};
        cm.unknown_by_class = {0, 0, 0};
        cm.policy = UnknownPolicy::CountAsError;
        CHECK(balanced_accuracy(cm) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }

    SUBCASE("zero-support classes leave the balanced-accuracy mean") {
        ConfusionMatrix cm;
        cm.classes = {kLeft, kThrough};
        cm.counts = {{4, 0}, {0, 0}};
        cm.unknown_by_class = {0, 0};
        cm.policy = UnknownPolicy::CountAsError;
        Diagnostics diag;
        CHECK(balanced_accuracy(cm, &diag) == 1.0);
        CHECK(diag.notes.size() == 1);
    }

    SUBCASE("a class never predicted and never correct has F1 zero") {
        ConfusionMatrix cm;
        cm.classes = {kLeft, kThrough};
        cm.counts = {{3, 0}, {3, 0}};  // Through never predicted
        cm.unknown_by_class = {0, 0};
        cm.policy = UnknownPolicy::CountAsError;
        Diagnostics diag;
        CHECK(macro_f1(cm, &diag) == doctest::Approx(0.5 * (2.0 * 0.5 / 1.5)).epsilon(1e-12));
        CHECK(!diag.notes.empty());
    }
}

TEST_CASE("balanced accuracy ignores class imbalance") {
    ConfusionMatrix cm = worked_example();
    ConfusionMatrix scaled = cm;
    for (std::size_t c = 0; c < scaled.classes.size(); ++c) scaled.counts[1][c] *= 7;
    CHECK(balanced_accuracy(scaled) == doctest::Approx(balanced_accuracy(cm)).epsilon(1e-12));
}

TEST_CASE("accuracy equals balanced accuracy when row sums are equal") {
    ConfusionMatrix cm;
    cm.classes = {kLeft, kThrough, kRight};
    cm.counts = {{7, 2, 1}, {1, 8, 1}, {0, 2, 8}};
    cm.unknown_by_class = {0, 0, 0};
    cm.policy = UnknownPolicy::CountAsError;
    CHECK(accuracy(cm) == doctest::Approx(balanced_accuracy(cm)).epsilon(1e-12));
}

TEST_CASE("metrics agree with a from-pairs re-derivation on random label sets") {
    SplitMix64 rng(61);
    const std::vector<MovementLabel> labels = {kLeft, kThrough, kRight};
    for (int it = 0; it < 100; ++it) {
        std::map<std::string, MovementLabel> truth;
        LabelledPredictions pred;
        std::vector<std::pair<MovementLabel, MovementLabel>> pairs;
        const bool count_unknown = rng.uniform() < 0.5;
        const std::size_t n = 3 + rng.uniform_int(60);
        bool has_unknown_free_row = false;
        for (std::size_t v = 0; v < n; ++v) {
            const MovementLabel actual = labels[rng.uniform_int(3)];
            MovementLabel predicted = labels[rng.uniform_int(3)];
            if (rng.uniform() < 0.1) predicted = MovementLabel::unknown();
            if (!predicted.is_unknown()) has_unknown_free_row = true;
            const std::string id = "v" + std::to_string(v);
            truth[id] = actual;
            pred.emplace_back(id, predicted);
            pairs.emplace_back(actual, predicted);
        }
        if (!has_unknown_free_row) continue;

        const ConfusionMatrix cm = build_confusion(
            truth, pred, count_unknown ? UnknownPolicy::CountAsError : UnknownPolicy::Exclude);
        const auto expected = oracle::metrics_from_pairs(pairs, count_unknown);
        CHECK(accuracy(cm) == doctest::Approx(expected.accuracy).epsilon(1e-12));
        CHECK(balanced_accuracy(cm) ==
              doctest::Approx(expected.balanced_accuracy).epsilon(1e-12));
        CHECK(macro_f1(cm) == doctest::Approx(expected.macro_f1).epsilon(1e-12));
    }
}

TEST_CASE("best label alignment undoes a relabelling") {
    std::map<std::string, MovementLabel> truth;
    LabelledPredictions pred;
    // Clusters named 0/1/2 that are really Right/Left/Through.
    const std::vector<MovementLabel> actual = {kRight, kLeft, kThrough};
    int id = 0;
    for (int c = 0; c < 3; ++c) {
        for (int v = 0; v < 5 + c; ++v) {
            const std::string vid = "v" + std::to_string(id++);
            truth[vid] = actual[static_cast<std::size_t>(c)];
            pred.emplace_back(vid, MovementLabel::cluster(c));
        }
    }
    // One mistake so the mapping is not trivially perfect.
    pred[0].second = MovementLabel::cluster(1);

    const auto mapping = best_label_alignment(truth, pred);
    CHECK(mapping.at(MovementLabel::cluster(0)) == kRight);
    CHECK(mapping.at(MovementLabel::cluster(1)) == kLeft);
    CHECK(mapping.at(MovementLabel::cluster(2)) == kThrough);

    const ConfusionMatrix cm =
        build_confusion(truth, apply_alignment(pred, mapping), UnknownPolicy::CountAsError);
    CHECK(accuracy(cm) == doctest::Approx(17.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("labels and truth round-trip through CSV") {
    testutil::TempDir dir;

    ClassificationResult result;
    VehicleClassification a;
    a.label = kLeft;
    a.similarity = 12.5;
    VehicleClassification b;
    b.label = MovementLabel::unknown();
    b.similarity = std::nan("");
    result.per_vehicle = {{"a", a}, {"b", b}};
    const auto labels_path = dir.file("labels.csv");
    save_labels(result, labels_path);
    const LabelledPredictions loaded = load_labels(labels_path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0] == std::pair<std::string, MovementLabel>{"a", kLeft});
    CHECK(loaded[1].second.is_unknown());

    const std::map<std::string, MovementLabel> truth = {{"a", kLeft}, {"b", kRight}};
    const auto truth_path = dir.file("truth.csv");
    save_truth(truth, truth_path);
    CHECK(load_truth(truth_path) == truth);
}

TEST_CASE("report rendering stays stable and machine readable") {
    std::map<std::string, MovementLabel> truth = {{"a", kLeft}, {"b", kThrough}, {"c", kRight}};
    LabelledPredictions pred = {{"a", kLeft}, {"b", kThrough}, {"c", kLeft}};
    const MetricsReport report =
        evaluate_predictions(truth, pred, UnknownPolicy::CountAsError);
    const std::string text = metrics_report_text(report);
    CHECK(text.find("accuracy") != std::string::npos);
    CHECK(text.find("confusion matrix") != std::string::npos);
    const std::string json = metrics_report_json(report);
    CHECK(json.find("\"accuracy\"") != std::string::npos);
    CHECK(report.accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}
