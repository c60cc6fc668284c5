#include "tmc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tmc {

UnknownPolicy parse_unknown_policy(const std::string& text) {
    if (text == "count-as-error") return UnknownPolicy::CountAsError;
    if (text == "exclude") return UnknownPolicy::Exclude;
    throw std::invalid_argument("unknown policy '" + text +
                                "', want 'count-as-error' or 'exclude'");
}

std::string unknown_policy_name(UnknownPolicy policy) {
    return policy == UnknownPolicy::CountAsError ? "count-as-error" : "exclude";
}

long long ConfusionMatrix::total() const {
    long long sum = 0;
    for (const auto& row : counts)
        for (long long v : row) sum += v;
    if (policy == UnknownPolicy::CountAsError) {
        for (long long v : unknown_by_class) sum += v;
    }
    return sum;
}

long long ConfusionMatrix::trace() const {
    long long sum = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
    return sum;
}

long long ConfusionMatrix::row_total(std::size_t r) const {
    long long sum = 0;
    for (long long v : counts[r]) sum += v;
    if (policy == UnknownPolicy::CountAsError) sum += unknown_by_class[r];
    return sum;
}

long long ConfusionMatrix::col_total(std::size_t c) const {
    long long sum = 0;
    for (const auto& row : counts) sum += row[c];
    return sum;
}

LabelledPredictions flatten(const ClassificationResult& result) {
    LabelledPredictions out;
    out.reserve(result.per_vehicle.size());
    for (const auto& [vid, c] : result.per_vehicle) out.emplace_back(vid, c.label);
    return out;
}

ConfusionMatrix build_confusion(const std::map<std::string, MovementLabel>& truth,
                                const LabelledPredictions& predictions, UnknownPolicy policy,
                                Diagnostics* diag) {
    const auto actual_of = [&](const std::string& vid) {
        const auto it = truth.find(vid);
        if (it == truth.end()) {
            throw std::runtime_error("build_confusion: vehicle '" + vid +
                                     "' has no ground-truth label");
        }
        return it->second;
    };

    // Classes cover exactly the vehicles that enter the tally: excluded
    // Unknown predictions contribute neither a class nor a count.
    std::set<MovementLabel> class_set;
    for (const auto& [vid, predicted] : predictions) {
        const MovementLabel actual = actual_of(vid);
        if (predicted.is_unknown() && policy == UnknownPolicy::Exclude) continue;
        if (!actual.is_unknown()) class_set.insert(actual);
        if (!predicted.is_unknown()) class_set.insert(predicted);
    }

    ConfusionMatrix cm;
    cm.policy = policy;
    cm.classes.assign(class_set.begin(), class_set.end());
    const std::size_t k = cm.classes.size();
    cm.counts.assign(k, std::vector<long long>(k, 0));
    cm.unknown_by_class.assign(k, 0);

    const auto index_of = [&](const MovementLabel& label) {
        const auto it = std::lower_bound(cm.classes.begin(), cm.classes.end(), label);
        return static_cast<std::size_t>(it - cm.classes.begin());
    };

    for (const auto& [vid, predicted] : predictions) {
        const MovementLabel actual = actual_of(vid);
        if (predicted.is_unknown()) {
            ++cm.unknown_count;
            if (policy == UnknownPolicy::CountAsError) ++cm.unknown_by_class[index_of(actual)];
            continue;
        }
        ++cm.counts[index_of(actual)][index_of(predicted)];
    }
    if (diag && cm.unknown_count > 0 && policy == UnknownPolicy::Exclude) {
        diag->note("build_confusion: excluded " + std::to_string(cm.unknown_count) +
                   " Unknown prediction(s) from the matrix");
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const long long total = cm.total();
    if (total == 0) throw std::runtime_error("accuracy: empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double balanced_accuracy(const ConfusionMatrix& cm, Diagnostics* diag) {
    if (cm.total() == 0) throw std::runtime_error("balanced_accuracy: empty confusion matrix");
    double sum = 0.0;
    std::size_t supported = 0;
    for (std::size_t c = 0; c < cm.classes.size(); ++c) {
        const long long actual = cm.row_total(c);
        if (actual == 0) {
            if (diag) {
                diag->note("balanced_accuracy: class '" + cm.classes[c].str() +
                           "' has no actual instances and is excluded from the macro mean");
            }
            continue;
        }
        sum += static_cast<double>(cm.counts[c][c]) / static_cast<double>(actual);
        ++supported;
    }
    if (supported == 0) throw std::runtime_error("balanced_accuracy: no class has support");
    return sum / static_cast<double>(supported);
}

double macro_f1(const ConfusionMatrix& cm, Diagnostics* diag) {
    if (cm.total() == 0) throw std::runtime_error("macro_f1: empty confusion matrix");
    double sum = 0.0;
    for (std::size_t c = 0; c < cm.classes.size(); ++c) {
        const long long tp = cm.counts[c][c];
        const long long tp_fp = cm.col_total(c);
        const long long tp_fn = cm.row_total(c);
        if (tp_fp == 0 || tp_fn == 0) {
            if (diag) {
                diag->note("macro_f1: class '" + cm.classes[c].str() +
                           "' has empty precision or recall support; F1 taken as 0");
            }
            continue;  // contributes 0
        }
        const double p = static_cast<double>(tp) / static_cast<double>(tp_fp);
        const double r = static_cast<double>(tp) / static_cast<double>(tp_fn);
        if (p + r > 0.0) sum += 2.0 * p * r / (p + r);
    }
    return sum / static_cast<double>(cm.classes.size());
}

namespace {

long long agreement(const std::map<std::string, MovementLabel>& truth,
                    const LabelledPredictions& predictions,
                    const std::map<MovementLabel, MovementLabel>& mapping) {
    long long correct = 0;
    for (const auto& [vid, predicted] : predictions) {
        const auto t = truth.find(vid);
        if (t == truth.end()) continue;
        const auto m = mapping.find(predicted);
        const MovementLabel mapped = m == mapping.end() ? predicted : m->second;
        if (mapped == t->second) ++correct;
    }
    return correct;
}

}  // namespace

std::map<MovementLabel, MovementLabel> best_label_alignment(
    const std::map<std::string, MovementLabel>& truth, const LabelledPredictions& predictions) {
    std::set<MovementLabel> predicted_set;
    for (const auto& [vid, label] : predictions) {
        (void)vid;
        if (!label.is_unknown()) predicted_set.insert(label);
    }
    std::set<MovementLabel> truth_set;
    for (const auto& [vid, label] : truth) {
        (void)vid;
        if (!label.is_unknown()) truth_set.insert(label);
    }

    const std::vector<MovementLabel> predicted(predicted_set.begin(), predicted_set.end());
    std::vector<MovementLabel> targets(truth_set.begin(), truth_set.end());
    // Predicted labels may outnumber truth labels; pad targets with the
    // predicted labels themselves so the assignment stays bijective.
    for (const auto& p : predicted) {
        if (!truth_set.count(p)) targets.push_back(p);
    }
    std::sort(targets.begin(), targets.end());

    std::map<MovementLabel, MovementLabel> best;
    long long best_correct = -1;
    std::vector<MovementLabel> perm = targets;
    do {
        std::map<MovementLabel, MovementLabel> mapping;
        for (std::size_t i = 0; i < predicted.size(); ++i) mapping[predicted[i]] = perm[i];
        const long long correct = agreement(truth, predictions, mapping);
        if (correct > best_correct) {
            best_correct = correct;
            best = mapping;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

LabelledPredictions apply_alignment(const LabelledPredictions& predictions,
                                    const std::map<MovementLabel, MovementLabel>& mapping) {
    LabelledPredictions out = predictions;
    for (auto& [vid, label] : out) {
        (void)vid;
        const auto it = mapping.find(label);
        if (it != mapping.end()) label = it->second;
    }
    return out;
}

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> read_csv_rows(const std::filesystem::path& path, const char* header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty file (missing header): " + path.string());
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) != header) {
        throw std::runtime_error("unexpected header '" + line + "' in " + path.string() +
                                 ", want '" + header + "'");
    }
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) rows.push_back(line);
    }
    return rows;
}

}  // namespace

std::map<std::string, MovementLabel> load_truth(const std::filesystem::path& path) {
    std::map<std::string, MovementLabel> truth;
    for (const auto& row : read_csv_rows(path, "vehicle_id,label")) {
        const auto comma = row.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("malformed truth row '" + row + "' in " + path.string());
        }
        const std::string vid = trim(row.substr(0, comma));
        const MovementLabel label = MovementLabel::parse(trim(row.substr(comma + 1)));
        if (!truth.emplace(vid, label).second) {
            throw std::runtime_error("duplicate truth row for vehicle '" + vid + "'");
        }
    }
    return truth;
}

void save_truth(const std::map<std::string, MovementLabel>& truth,
                const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write truth file: " + path.string());
    out << "vehicle_id,label\n";
    for (const auto& [vid, label] : truth) out << vid << ',' << label.str() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_labels(const ClassificationResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write labels file: " + path.string());
    out << "vehicle_id,label,similarity\n";
    for (const auto& [vid, c] : result.per_vehicle) {
        out << vid << ',' << c.label.str() << ',';
        if (!c.label.is_unknown()) out << format_double(c.similarity);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

LabelledPredictions load_labels(const std::filesystem::path& path) {
    LabelledPredictions out;
    for (const auto& row : read_csv_rows(path, "vehicle_id,label,similarity")) {
        std::stringstream ss(row);
        std::string vid, label;
        if (!std::getline(ss, vid, ',') || !std::getline(ss, label, ',')) {
            throw std::runtime_error("malformed labels row '" + row + "' in " + path.string());
        }
        out.emplace_back(trim(vid), MovementLabel::parse(trim(label)));
    }
    return out;
}

MetricsReport evaluate_predictions(const std::map<std::string, MovementLabel>& truth,
                                   const LabelledPredictions& predictions, UnknownPolicy policy,
                                   Diagnostics* diag) {
    MetricsReport report;
    report.cm = build_confusion(truth, predictions, policy, diag);
    report.accuracy = accuracy(report.cm);
    report.balanced_accuracy = balanced_accuracy(report.cm, diag);
    report.macro_f1 = macro_f1(report.cm, diag);

    report.alignment = best_label_alignment(truth, predictions);
    bool identity = true;
    for (const auto& [from, to] : report.alignment) identity &= (from == to);
    if (identity) {
        report.alignment.clear();
        report.aligned_accuracy = report.accuracy;
        report.aligned_balanced_accuracy = report.balanced_accuracy;
        report.aligned_macro_f1 = report.macro_f1;
    } else {
        const ConfusionMatrix aligned =
            build_confusion(truth, apply_alignment(predictions, report.alignment), policy);
        report.aligned_accuracy = accuracy(aligned);
        report.aligned_balanced_accuracy = balanced_accuracy(aligned);
        report.aligned_macro_f1 = macro_f1(aligned);
    }
    return report;
}

std::string metrics_report_text(const MetricsReport& report) {
    std::ostringstream out;
    const auto& cm = report.cm;

    std::size_t width = 8;
    for (const auto& c : cm.classes) width = std::max(width, c.str().size());
    width += 2;

    const auto pad = [](const std::string& s, std::size_t w) {
        std::string padded = s;
        if (padded.size() < w) padded.resize(w, ' ');
        return padded;
    };
    const auto cell = [&](const std::string& s) { return pad(s, width); };
    const auto metric = [&](const std::string& name) { return pad(name, 28); };

    out << "confusion matrix (rows actual, columns predicted; policy "
        << unknown_policy_name(cm.policy) << ")\n";
    out << cell("");
    for (const auto& c : cm.classes) out << cell(c.str());
    out << cell("Unknown") << '\n';
    for (std::size_t r = 0; r < cm.classes.size(); ++r) {
        out << cell(cm.classes[r].str());
        for (std::size_t c = 0; c < cm.classes.size(); ++c) {
            out << cell(std::to_string(cm.counts[r][c]));
        }
        out << cell(std::to_string(cm.unknown_by_class[r])) << '\n';
    }
    out << '\n';
    out << metric("accuracy") << format_double(report.accuracy) << '\n';
    out << metric("balanced_accuracy") << format_double(report.balanced_accuracy) << '\n';
    out << metric("macro_f1") << format_double(report.macro_f1) << '\n';
    out << metric("unknown_count") << cm.unknown_count << '\n';

    if (!report.alignment.empty()) {
        out << "\nbest label alignment:";
        for (const auto& [from, to] : report.alignment) {
            out << ' ' << from.str() << "->" << to.str();
        }
        out << '\n';
        out << metric("aligned_accuracy") << format_double(report.aligned_accuracy) << '\n';
        out << metric("aligned_balanced_accuracy") << format_double(report.aligned_balanced_accuracy)
            << '\n';
        out << metric("aligned_macro_f1") << format_double(report.aligned_macro_f1) << '\n';
    }
    return out.str();
}

std::string metrics_report_json(const MetricsReport& report) {
    using nlohmann::json;
    const auto& cm = report.cm;
    json classes = json::array();
    for (const auto& c : cm.classes) classes.push_back(c.str());
    json mapping = json::object();
    for (const auto& [from, to] : report.alignment) mapping[from.str()] = to.str();
    const json doc{
        {"policy", unknown_policy_name(cm.policy)},
        {"classes", std::move(classes)},
        {"confusion", cm.counts},
        {"unknown_by_class", cm.unknown_by_class},
        {"unknown_count", cm.unknown_count},
        {"accuracy", report.accuracy},
        {"balanced_accuracy", report.balanced_accuracy},
        {"macro_f1", report.macro_f1},
        {"alignment", std::move(mapping)},
        {"aligned_accuracy", report.aligned_accuracy},
        {"aligned_balanced_accuracy", report.aligned_balanced_accuracy},
        {"aligned_macro_f1", report.aligned_macro_f1},
    };
    return doc.dump(2) + "\n";
}

}  // namespace tmc
