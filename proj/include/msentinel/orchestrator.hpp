#pragma once

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "msentinel/analysis.hpp"
#include "msentinel/annotate.hpp"
#include "msentinel/callgraph.hpp"
#include "msentinel/detectors.hpp"
#include "msentinel/pdg.hpp"

namespace msentinel {

struct InterferenceReport {
    std::string scenario;
    CallableId entry;
    bool combined = false;
    std::vector<AnalysisVerdict> verdicts; // in executed order
    std::vector<std::string> warnings;
    double total_elapsed_ms = 0.0;
};

enum class OutputFormat { Text, Json };

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

inline AnalysisVerdict run_one(AnalysisKind kind, const AnnotatedProgram& program,
                               const CallGraph& cg) {
    auto t0 = std::chrono::steady_clock::now();
    AnalysisVerdict v;
    try {
        switch (kind) {
        case AnalysisKind::DF: v = detect_df(program, cg); break;
        case AnalysisKind::CF: v = detect_confluence(program, cg); break;
        case AnalysisKind::OA: v = detect_oa(program, cg); break;
        case AnalysisKind::PDG: v = detect_pdg(program, cg); break;
        }
    } catch (const std::exception& e) {
        v = AnalysisVerdict{};
        v.analysis = kind;
        v.error = e.what();
    }
    v.elapsed_ms = ms_since(t0);
    return v;
}

} // namespace detail

// Runs the enabled analyses over one annotated program and combines their
// verdicts by disjunction. The call graph is built once and shared. With
// `lazy`, analyses run cheapest-first and stop at the first interference;
// skipped analyses simply do not appear in the report.
inline InterferenceReport run_all(const AnnotatedProgram& program,
                                  const CallableId& entry,
                                  const AnalysisConfig& config,
                                  std::string scenario_id = "") {
    auto t0 = std::chrono::steady_clock::now();
    InterferenceReport report;
    report.scenario = std::move(scenario_id);
    report.entry = entry;
    report.warnings = program.warnings;

    CallGraph cg = build_call_graph(program.ir, entry, config.depth_limit);

    static constexpr AnalysisKind kDefaultOrder[] = {
        AnalysisKind::DF, AnalysisKind::CF, AnalysisKind::OA, AnalysisKind::PDG};
    static constexpr AnalysisKind kLazyOrder[] = {
        AnalysisKind::DF, AnalysisKind::OA, AnalysisKind::PDG, AnalysisKind::CF};

    for (AnalysisKind kind : config.lazy ? kLazyOrder : kDefaultOrder) {
        if (!config.enabled.count(kind))
            continue;
        AnalysisVerdict v = detail::run_one(kind, program, cg);
        if (v.error)
            report.warnings.push_back(std::string(analysis_kind_name(kind)) +
                                      " analysis failed: " + *v.error);
        report.combined = report.combined || v.interference;
        report.verdicts.push_back(std::move(v));
        if (config.lazy && report.combined)
            break;
    }
    report.total_elapsed_ms = detail::ms_since(t0);
    return report;
}

// Copy with all timing fields zeroed; lets callers compare or hash reports
// without the one field that legitimately varies between runs.
inline InterferenceReport strip_timings(InterferenceReport report) {
    report.total_elapsed_ms = 0.0;
    for (auto& v : report.verdicts)
        v.elapsed_ms = 0.0;
    return report;
}

namespace detail {

inline nlohmann::ordered_json witness_step_json(const WitnessStep& s) {
    nlohmann::ordered_json j;
    j["callable"] = s.callable;
    j["line"] = s.line;
    j["tag"] = s.tag;
    if (s.element)
        j["element"] = *s.element;
    return j;
}

inline nlohmann::ordered_json verdict_json(const AnalysisVerdict& v) {
    nlohmann::ordered_json j;
    j["interference"] = v.interference;
    j["elapsed_ms"] = v.elapsed_ms;
    j["witnesses"] = nlohmann::ordered_json::array();
    if (v.analysis == AnalysisKind::OA) {
        auto endpoint = [](const OaEndpoint& e) {
            nlohmann::ordered_json p;
            p["callable"] = e.callable;
            p["line"] = e.line;
            p["element"] = e.element;
            p["tag"] = e.tag;
            return p;
        };
        for (const auto& c : v.conflicts) {
            nlohmann::ordered_json w;
            w["first"] = endpoint(c.first);
            w["second"] = endpoint(c.second);
            w["relation"] = c.relation == OaRelation::Equal ? "equal" : "contains";
            j["witnesses"].push_back(std::move(w));
        }
    } else {
        for (const auto& path : v.paths) {
            nlohmann::ordered_json p = nlohmann::ordered_json::array();
            for (const auto& step : path)
                p.push_back(witness_step_json(step));
            j["witnesses"].push_back(std::move(p));
        }
    }
    if (v.error)
        j["error"] = *v.error;
    return j;
}

} // namespace detail

inline nlohmann::ordered_json report_json(const InterferenceReport& report) {
    nlohmann::ordered_json j;
    j["scenario"] = report.scenario;
    j["entry"] = report.entry;
    j["combined"] = report.combined;
    j["analyses"] = nlohmann::ordered_json::object();
    for (const auto& v : report.verdicts)
        j["analyses"][analysis_kind_name(v.analysis)] = detail::verdict_json(v);
    j["warnings"] = report.warnings;
    return j;
}

inline std::string serialize_report(const InterferenceReport& report,
                                    OutputFormat format) {
    if (format == OutputFormat::Json)
        return report_json(report).dump(2) + "\n";

    std::ostringstream out;
    out << "scenario: " << report.scenario << "\n";
    out << "entry:    " << report.entry << "\n";
    out << "combined: " << (report.combined ? "interference" : "no interference")
        << "\n";
    out.setf(std::ios::fixed);
    out.precision(2);
    for (const auto& v : report.verdicts) {
        size_t witnesses =
            v.analysis == AnalysisKind::OA ? v.conflicts.size() : v.paths.size();
        out << "  " << analysis_kind_name(v.analysis) << ": "
            << (v.interference ? "interference" : "clean") << " (" << v.elapsed_ms
            << " ms";
        if (v.error)
            out << ", error: " << *v.error;
        out << ")";
        if (witnesses)
            out << ", " << witnesses << (witnesses == 1 ? " witness" : " witnesses");
        out << "\n";
        if (v.analysis == AnalysisKind::OA) {
            for (const auto& c : v.conflicts)
                out << "      " << c.first.callable << ":" << c.first.line << " ["
                    << c.first.tag << "] " << c.first.element << "  vs  "
                    << c.second.callable << ":" << c.second.line << " ["
                    << c.second.tag << "] " << c.second.element << "  ("
                    << (c.relation == OaRelation::Equal ? "equal" : "contains")
                    << ")\n";
        } else {
            for (const auto& path : v.paths) {
                out << "      ";
                for (size_t i = 0; i < path.size(); ++i) {
                    if (i)
                        out << " -> ";
                    out << path[i].callable << ":" << path[i].line << " ["
                        << path[i].tag << "]";
                }
                out << "\n";
            }
        }
    }
    out << "total: " << report.total_elapsed_ms << " ms\n";
    if (!report.warnings.empty()) {
        out << "warnings:\n";
        for (const auto& w : report.warnings)
            out << "  - " << w << "\n";
    }
    return out.str();
}

} // namespace msentinel
