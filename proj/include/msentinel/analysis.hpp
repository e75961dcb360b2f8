#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msentinel/ir.hpp"

namespace msentinel {

enum class AnalysisKind { DF, CF, OA, PDG };

inline const char* analysis_kind_name(AnalysisKind k) {
    switch (k) {
    case AnalysisKind::DF: return "df";
    case AnalysisKind::CF: return "cf";
    case AnalysisKind::OA: return "oa";
    case AnalysisKind::PDG: return "pdg";
    }
    return "?";
}

inline std::optional<AnalysisKind> parse_analysis_kind(const std::string& s) {
    if (s == "df") return AnalysisKind::DF;
    if (s == "cf") return AnalysisKind::CF;
    if (s == "oa") return AnalysisKind::OA;
    if (s == "pdg") return AnalysisKind::PDG;
    return std::nullopt;
}

struct AnalysisConfig {
    int depth_limit = 5;
    std::set<AnalysisKind> enabled = {AnalysisKind::DF, AnalysisKind::CF,
                                      AnalysisKind::OA, AnalysisKind::PDG};
    bool lazy = false; // short-circuit on the first interference found
};

// One step of a reported flow or dependence path.
struct WitnessStep {
    CallableId callable;
    int line = 0;
    std::string tag;                    // "left" | "right" | "base" | "both"
    std::optional<std::string> element; // absent for instruction-level steps

    bool operator==(const WitnessStep&) const = default;
};

using PathWitness = std::vector<WitnessStep>;

enum class OaRelation { Equal, Contains };

struct OaEndpoint {
    CallableId callable;
    int line = 0;
    std::string element;
    std::string tag;

    bool operator==(const OaEndpoint&) const = default;
};

struct OaWitness {
    OaEndpoint first;  // the definition already recorded
    OaEndpoint second; // the definition that collided with it
    OaRelation relation = OaRelation::Equal;

    bool operator==(const OaWitness&) const = default;
};

struct AnalysisVerdict {
    AnalysisKind analysis = AnalysisKind::DF;
    bool interference = false;
    std::vector<PathWitness> paths;   // DF, CF, PDG
    std::vector<OaWitness> conflicts; // OA
    double elapsed_ms = 0.0;
    std::optional<std::string> error;
};

// At most this many witnesses are kept per analysis per query direction;
// verdicts are decided before the cut.
inline constexpr size_t kWitnessCap = 16;

} // namespace msentinel
