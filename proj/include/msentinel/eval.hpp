#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "msentinel/scenario.hpp"

namespace msentinel {

struct ConfusionMatrix {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    long long total() const { return tp + fp + fn + tn; }
};

struct MetricsSummary {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    long long units = 0;
};

// Every ratio with a zero denominator is reported as 0; an empty matrix
// therefore yields all zeros rather than NaNs.
inline MetricsSummary metrics(const ConfusionMatrix& m) {
    MetricsSummary s;
    s.units = m.total();
    double tp = static_cast<double>(m.tp);
    if (m.tp + m.fp > 0)
        s.precision = tp / static_cast<double>(m.tp + m.fp);
    if (m.tp + m.fn > 0)
        s.recall = tp / static_cast<double>(m.tp + m.fn);
    if (s.precision + s.recall > 0.0)
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    if (s.units > 0)
        s.accuracy = static_cast<double>(m.tp + m.tn) /
                     static_cast<double>(s.units);
    return s;
}

struct TimingSummary {
    double median_ms = 0.0;
    double mean_ms = 0.0;
    double stddev_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
};

// Condenses each scenario's repetition samples to its mean, then summarises
// the per-scenario means. Median of an even count is the midpoint of the two
// central values; the deviation is the population form.
inline TimingSummary timing_summary(
    const std::vector<std::vector<double>>& per_scenario_samples) {
    std::vector<double> means;
    for (const auto& samples : per_scenario_samples) {
        if (samples.empty())
            continue;
        means.push_back(std::accumulate(samples.begin(), samples.end(), 0.0) /
                        static_cast<double>(samples.size()));
    }
    TimingSummary t;
    if (means.empty())
        return t;
    std::sort(means.begin(), means.end());
    size_t n = means.size();
    t.median_ms = (n % 2 == 1) ? means[n / 2]
                               : 0.5 * (means[n / 2 - 1] + means[n / 2]);
    t.mean_ms = std::accumulate(means.begin(), means.end(), 0.0) /
                static_cast<double>(n);
    double var = 0.0;
    for (double m : means)
        var += (m - t.mean_ms) * (m - t.mean_ms);
    t.stddev_ms = std::sqrt(var / static_cast<double>(n));
    t.min_ms = means.front();
    t.max_ms = means.back();
    return t;
}

struct ScenarioResult {
    std::string id;
    std::filesystem::path dir;
    bool prediction = false;
    std::optional<bool> ground_truth;
    InterferenceReport report;
    std::vector<double> samples_ms;
};

struct CorpusEvaluation {
    std::vector<ScenarioResult> scenarios;
    ConfusionMatrix confusion;
    MetricsSummary summary;
    TimingSummary timing;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<std::filesystem::path>
find_scenario_dirs(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> dirs;
    if (std::filesystem::is_regular_file(root / "scenario.json"))
        dirs.push_back(root);
    if (std::filesystem::is_directory(root))
        for (const auto& entry :
             std::filesystem::recursive_directory_iterator(root))
            if (entry.is_regular_file() &&
                entry.path().filename() == "scenario.json")
                dirs.push_back(entry.path().parent_path());
    std::sort(dirs.begin(), dirs.end());
    dirs.erase(std::unique(dirs.begin(), dirs.end()), dirs.end());
    return dirs;
}

} // namespace detail

// Runs the full pipeline over every scenario found under `root` (any
// directory holding a scenario.json) and aggregates a confusion matrix over
// the labelled ones. Scenarios without ground truth still run and appear in
// the timing stats, but are excluded from the matrix with a warning.
inline CorpusEvaluation evaluate_corpus(const std::filesystem::path& root,
                                        const AnalysisConfig& config,
                                        int repetitions = 1, int jobs = 1) {
    if (repetitions < 1)
        throw InputError("repetitions must be at least 1");
    std::vector<std::filesystem::path> dirs = detail::find_scenario_dirs(root);
    if (dirs.empty())
        throw InputError("no scenarios found under " + root.string());

    std::vector<MergeScenario> scenarios;
    scenarios.reserve(dirs.size());
    for (const auto& d : dirs)
        scenarios.push_back(load_scenario(d));

    CorpusEvaluation eval;
    eval.scenarios.resize(scenarios.size());

    size_t workers = static_cast<size_t>(std::max(jobs, 1));
    workers = std::min(workers, scenarios.size());
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= scenarios.size())
                return;
            try {
                ScenarioRun run = run_scenario(scenarios[i], config, repetitions);
                ScenarioResult& res = eval.scenarios[i];
                res.id = scenarios[i].id;
                res.dir = scenarios[i].dir;
                res.prediction = run.report.combined;
                res.ground_truth = scenarios[i].ground_truth;
                res.report = std::move(run.report);
                res.samples_ms = std::move(run.samples_ms);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (first_error)
        std::rethrow_exception(first_error);

    std::vector<std::vector<double>> samples;
    long long labelled = 0;
    for (const auto& res : eval.scenarios) {
        samples.push_back(res.samples_ms);
        if (!res.ground_truth) {
            eval.warnings.push_back("scenario '" + res.id +
                                    "' has no ground truth; excluded from "
                                    "metrics");
            continue;
        }
        ++labelled;
        bool truth = *res.ground_truth;
        if (res.prediction && truth)
            ++eval.confusion.tp;
        else if (res.prediction && !truth)
            ++eval.confusion.fp;
        else if (!res.prediction && truth)
            ++eval.confusion.fn;
        else
            ++eval.confusion.tn;
    }
    if (labelled == 0)
        throw InputError("no labelled scenarios under " + root.string());
    for (const auto& res : eval.scenarios)
        for (const auto& w : res.report.warnings)
            eval.warnings.push_back("scenario '" + res.id + "': " + w);
    eval.summary = metrics(eval.confusion);
    eval.timing = timing_summary(samples);
    return eval;
}

namespace detail {

inline double round4(double x) { return std::round(x * 10000.0) / 10000.0; }

// Two-decimal display truncates rather than rounds, so a ratio is never
// overstated: 0.6061 prints as 0.60.
inline std::string trunc2(double x) {
    double t = std::floor(x * 100.0 + 1e-9) / 100.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", t);
    return buf;
}

inline std::string fixed2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

} // namespace detail

inline nlohmann::ordered_json corpus_json(const CorpusEvaluation& eval) {
    nlohmann::ordered_json j;
    j["scenarios"] = nlohmann::ordered_json::array();
    for (const auto& res : eval.scenarios) {
        nlohmann::ordered_json s;
        s["id"] = res.id;
        s["prediction"] = res.prediction;
        if (res.ground_truth)
            s["ground_truth"] = *res.ground_truth;
        s["samples_ms"] = res.samples_ms;
        s["report"] = report_json(res.report);
        j["scenarios"].push_back(std::move(s));
    }
    j["confusion"] = {{"tp", eval.confusion.tp},
                      {"fp", eval.confusion.fp},
                      {"fn", eval.confusion.fn},
                      {"tn", eval.confusion.tn}};
    j["metrics"] = {{"precision", detail::round4(eval.summary.precision)},
                    {"recall", detail::round4(eval.summary.recall)},
                    {"f1", detail::round4(eval.summary.f1)},
                    {"accuracy", detail::round4(eval.summary.accuracy)},
                    {"units", eval.summary.units}};
    j["timing"] = {{"median_ms", eval.timing.median_ms},
                   {"mean_ms", eval.timing.mean_ms},
                   {"stddev_ms", eval.timing.stddev_ms},
                   {"min_ms", eval.timing.min_ms},
                   {"max_ms", eval.timing.max_ms}};
    j["warnings"] = eval.warnings;
    return j;
}

inline std::string format_corpus_text(const CorpusEvaluation& eval) {
    std::ostringstream out;
    out << "scenarios: " << eval.scenarios.size() << " (labelled "
        << eval.confusion.total() << ")\n";
    for (const auto& res : eval.scenarios) {
        out << "  " << res.id << ": "
            << (res.prediction ? "interference" : "clean");
        if (res.ground_truth) {
            bool truth = *res.ground_truth;
            out << ", expected " << (truth ? "interference" : "clean");
            out << (res.prediction == truth ? " [ok]" : " [miss]");
        } else {
            out << ", unlabelled";
        }
        out << "\n";
    }
    out << "confusion: tp=" << eval.confusion.tp << " fp=" << eval.confusion.fp
        << " fn=" << eval.confusion.fn << " tn=" << eval.confusion.tn << "\n";
    out << "precision=" << detail::trunc2(eval.summary.precision)
        << " recall=" << detail::trunc2(eval.summary.recall)
        << " f1=" << detail::trunc2(eval.summary.f1)
        << " accuracy=" << detail::trunc2(eval.summary.accuracy) << "\n";
    out << "timing: median=" << detail::fixed2(eval.timing.median_ms)
        << "ms mean=" << detail::fixed2(eval.timing.mean_ms)
        << "ms stddev=" << detail::fixed2(eval.timing.stddev_ms)
        << "ms min=" << detail::fixed2(eval.timing.min_ms)
        << "ms max=" << detail::fixed2(eval.timing.max_ms) << "ms\n";
    for (const auto& w : eval.warnings)
        out << "warning: " << w << "\n";
    return out.str();
}

} // namespace msentinel
