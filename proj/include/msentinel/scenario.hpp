#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "msentinel/annotate.hpp"
#include "msentinel/lower.hpp"
#include "msentinel/orchestrator.hpp"
#include "msentinel/source.hpp"

namespace msentinel {

// One three-way merge under analysis: the base version, the two parent
// versions, and the merged result, plus the entry callable to start from.
struct MergeScenario {
    std::string id;
    std::filesystem::path dir;
    std::vector<SourceFile> base, left, right, merge;
    CallableId entry;
    std::optional<bool> ground_truth;
    std::optional<ChangedLineSets> explicit_annotations;
};

namespace detail {

inline std::vector<SourceFile> load_source_dir(const std::filesystem::path& dir) {
    std::vector<SourceFile> out;
    if (!std::filesystem::is_directory(dir))
        return out;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".ml")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
        out.push_back(SourceFile::load(f, f.filename().string()));
    return out;
}

inline std::set<int> int_set(const nlohmann::json& arr) {
    std::set<int> out;
    for (const auto& v : arr)
        out.insert(v.get<int>());
    return out;
}

} // namespace detail

// Reads a scenario directory: base/ left/ right/ merge/ subdirectories of
// .ml sources plus a scenario.json manifest. The merged sources must parse
// and the entry callable must exist in them.
inline MergeScenario load_scenario(const std::filesystem::path& dir) {
    std::filesystem::path manifest_path = dir / "scenario.json";
    if (!std::filesystem::exists(manifest_path))
        throw InputError("missing scenario manifest: " + manifest_path.string());

    nlohmann::json manifest;
    try {
        std::ifstream in(manifest_path);
        manifest = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw InputError(manifest_path.string() + ": " + e.what());
    }

    MergeScenario scn;
    scn.dir = dir;
    scn.id = manifest.value("id", dir.filename().string());
    if (!manifest.contains("entry") || !manifest["entry"].is_string())
        throw InputError(manifest_path.string() + ": manifest lacks an \"entry\"");
    scn.entry = manifest["entry"].get<std::string>();
    if (manifest.contains("ground_truth"))
        scn.ground_truth = manifest["ground_truth"].get<bool>();

    scn.base = detail::load_source_dir(dir / "base");
    scn.left = detail::load_source_dir(dir / "left");
    scn.right = detail::load_source_dir(dir / "right");
    scn.merge = detail::load_source_dir(dir / "merge");
    if (scn.merge.empty())
        throw InputError(dir.string() + ": merge/ contains no .ml sources");

    if (manifest.contains("left_lines") || manifest.contains("right_lines")) {
        if (scn.merge.size() != 1)
            throw InputError(manifest_path.string() +
                             ": explicit line annotations require exactly one "
                             "merged source file");
        std::set<int> l, r;
        if (manifest.contains("left_lines"))
            l = detail::int_set(manifest["left_lines"]);
        if (manifest.contains("right_lines"))
            r = detail::int_set(manifest["right_lines"]);
        scn.explicit_annotations = ChangedLineSets::single_file(
            scn.merge.front().path, std::move(l), std::move(r));
    }

    try {
        ProgramIr ir = lower_sources(scn.merge);
        if (!ir.cfgs.count(scn.entry))
            throw InputError("entry callable '" + scn.entry + "' not found");
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(dir.string() + ": " + e.what());
    }
    return scn;
}

// Parses the merged sources and tags their instructions, either from the
// manifest's explicit line sets or by diffing the parents against base.
inline AnnotatedProgram prepare_scenario(const MergeScenario& scn) {
    ProgramIr ir = lower_sources(scn.merge);
    ChangedLineSets changed =
        scn.explicit_annotations
            ? *scn.explicit_annotations
            : compute_changed_lines(scn.base, scn.left, scn.right, scn.merge);
    return annotate(std::move(ir), changed);
}

struct ScenarioRun {
    InterferenceReport report;        // first repetition's report
    std::vector<double> samples_ms;   // total elapsed per repetition
};

// Runs the pipeline `repetitions` times over one scenario. All repetitions
// must agree on everything except timing; divergence means a determinism bug
// and is raised as an error.
inline ScenarioRun run_scenario(const MergeScenario& scn,
                                const AnalysisConfig& config, int repetitions) {
    if (repetitions < 1)
        throw InputError("repetitions must be at least 1");
    AnnotatedProgram program = prepare_scenario(scn);
    ScenarioRun run;
    std::string first_normalized;
    for (int i = 0; i < repetitions; ++i) {
        InterferenceReport report = run_all(program, scn.entry, config, scn.id);
        run.samples_ms.push_back(report.total_elapsed_ms);
        std::string normalized =
            serialize_report(strip_timings(report), OutputFormat::Json);
        if (i == 0) {
            first_normalized = std::move(normalized);
            run.report = std::move(report);
        } else if (normalized != first_normalized) {
            throw Error("scenario '" + scn.id +
                        "': verdicts diverged between repetitions");
        }
    }
    return run;
}

} // namespace msentinel
