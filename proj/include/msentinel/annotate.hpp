#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "msentinel/diff.hpp"
#include "msentinel/ir.hpp"
#include "msentinel/source.hpp"

namespace msentinel {

// Which merge parent a line (and hence an instruction) came from. Both flags
// clear means the line is untouched base code. Both set should not happen in
// a clean merge and is reported, not rejected.
struct ContributionTag {
    bool left = false;
    bool right = false;

    bool is_base() const { return !left && !right; }
    auto operator<=>(const ContributionTag&) const = default;

    std::string to_string() const {
        if (left && right) return "both";
        if (left) return "left";
        if (right) return "right";
        return "base";
    }
};

// Changed lines per file, in merge-version coordinates.
struct ChangedLineSets {
    std::map<std::string, std::set<int>> left;
    std::map<std::string, std::set<int>> right;

    static ChangedLineSets single_file(const std::string& file, std::set<int> l,
                                       std::set<int> r) {
        ChangedLineSets s;
        s.left[file] = std::move(l);
        s.right[file] = std::move(r);
        return s;
    }
};

struct AnnotatedProgram {
    ProgramIr ir;
    std::map<int, ContributionTag> tags; // instruction id -> tag
    std::vector<std::string> warnings;

    ContributionTag tag_of(int instr_id) const {
        auto it = tags.find(instr_id);
        return it == tags.end() ? ContributionTag{} : it->second;
    }
};

namespace detail {
inline const std::set<int>* find_lines(const std::map<std::string, std::set<int>>& m,
                                       const std::string& file) {
    auto it = m.find(file);
    return it == m.end() ? nullptr : &it->second;
}
} // namespace detail

// Derives changed-line sets by diffing each parent against base and carrying
// the parent's new lines into the merge through the parent->merge diff. A
// changed line that did not survive into the merge simply drops out.
inline ChangedLineSets compute_changed_lines(const std::vector<SourceFile>& base,
                                             const std::vector<SourceFile>& parent_left,
                                             const std::vector<SourceFile>& parent_right,
                                             const std::vector<SourceFile>& merge) {
    auto lines_of = [](const std::vector<SourceFile>& files,
                       const std::string& path) -> std::vector<std::string> {
        for (auto& f : files)
            if (f.path == path)
                return f.lines;
        return {};
    };
    ChangedLineSets out;
    for (const auto& m : merge) {
        std::vector<std::string> b = lines_of(base, m.path);
        for (int side = 0; side < 2; ++side) {
            std::vector<std::string> p =
                lines_of(side == 0 ? parent_left : parent_right, m.path);
            std::set<int> changed = changed_lines(line_diff(b, p));
            std::map<int, int> to_merge = keep_mapping(line_diff(p, m.lines));
            std::set<int>& dst = side == 0 ? out.left[m.path] : out.right[m.path];
            for (int line : changed) {
                auto it = to_merge.find(line);
                if (it != to_merge.end())
                    dst.insert(it->second);
            }
        }
    }
    return out;
}

// Tags every instruction of the merge-version program by line membership.
// Line numbers outside the file, files unknown to the program, and lines
// holding several statements are all reported as warnings.
inline AnnotatedProgram annotate(ProgramIr ir, const ChangedLineSets& changed) {
    AnnotatedProgram out;
    out.warnings = ir.warnings;

    auto check_lines = [&](const std::map<std::string, std::set<int>>& m,
                           const char* side) {
        for (auto& [file, lines] : m) {
            auto fc = ir.file_line_counts.find(file);
            if (fc == ir.file_line_counts.end()) {
                if (!lines.empty())
                    out.warnings.push_back("changed lines given for unknown file '" +
                                           file + "'");
                continue;
            }
            for (int line : lines)
                if (line < 1 || line > fc->second)
                    out.warnings.push_back(file + ": " + side + " changed line " +
                                           std::to_string(line) +
                                           " is outside the file");
        }
    };
    check_lines(changed.left, "left");
    check_lines(changed.right, "right");

    std::set<std::pair<std::string, int>> both_reported;
    for (auto& [id, cfg] : ir.cfgs) {
        const std::set<int>* l = detail::find_lines(changed.left, cfg.file);
        const std::set<int>* r = detail::find_lines(changed.right, cfg.file);
        for (const auto& instr : cfg.instructions) {
            ContributionTag tag;
            tag.left = l && l->count(instr.line);
            tag.right = r && r->count(instr.line);
            if (tag.left && tag.right &&
                both_reported.insert({cfg.file, instr.line}).second)
                out.warnings.push_back(cfg.file + ":" + std::to_string(instr.line) +
                                       ": line is attributed to both parents");
            if (tag.left || tag.right)
                out.tags[instr.id] = tag;
        }
    }
    for (auto& [file, lines] : ir.multi_statement_lines) {
        const std::set<int>* l = detail::find_lines(changed.left, file);
        const std::set<int>* r = detail::find_lines(changed.right, file);
        for (int line : lines)
            if ((l && l->count(line)) || (r && r->count(line)))
                out.warnings.push_back(file + ":" + std::to_string(line) +
                                       ": several statements share a tagged line");
    }
    out.ir = std::move(ir);
    return out;
}

} // namespace msentinel
