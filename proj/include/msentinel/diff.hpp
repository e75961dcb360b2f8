#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace msentinel {

struct EditOp {
    enum class Kind { Keep, Insert, Delete };
    Kind kind;
    int old_line = 0; // Keep/Delete: 1-based position in the old file
    int new_line = 0; // Keep/Insert: 1-based position in the new file
    std::string text;

    bool operator==(const EditOp&) const = default;
};

using EditScript = std::vector<EditOp>;

// Longest-common-subsequence diff over whole lines. Ties prefer keeping the
// earliest old line, which keeps scripts stable across runs.
inline EditScript line_diff(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
    const size_t n = a.size(), m = b.size();
    // dp[i][j] = LCS length of a[i:], b[j:]
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = n; i-- > 0;) {
        for (size_t j = m; j-- > 0;) {
            if (a[i] == b[j])
                dp[i][j] = dp[i + 1][j + 1] + 1;
            else
                dp[i][j] = std::max(dp[i + 1][j], dp[i][j + 1]);
        }
    }
    EditScript script;
    size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i] == b[j] && dp[i][j] == dp[i + 1][j + 1] + 1) {
            script.push_back({EditOp::Kind::Keep, int(i + 1), int(j + 1), a[i]});
            ++i, ++j;
        } else if (dp[i][j + 1] >= dp[i + 1][j]) {
            script.push_back({EditOp::Kind::Insert, 0, int(j + 1), b[j]});
            ++j;
        } else {
            script.push_back({EditOp::Kind::Delete, int(i + 1), 0, a[i]});
            ++i;
        }
    }
    for (; j < m; ++j)
        script.push_back({EditOp::Kind::Insert, 0, int(j + 1), b[j]});
    for (; i < n; ++i)
        script.push_back({EditOp::Kind::Delete, int(i + 1), 0, a[i]});
    return script;
}

// Replays a script against the old file, validating line positions and
// contents as it goes. Mostly a checking aid for tests.
inline std::vector<std::string> apply_edit_script(const std::vector<std::string>& a,
                                                  const EditScript& script) {
    std::vector<std::string> out;
    size_t i = 0;
    for (const auto& op : script) {
        switch (op.kind) {
        case EditOp::Kind::Keep:
            if (i >= a.size() || op.old_line != int(i + 1) || a[i] != op.text)
                throw std::invalid_argument("edit script does not match old file");
            out.push_back(a[i]);
            ++i;
            break;
        case EditOp::Kind::Delete:
            if (i >= a.size() || op.old_line != int(i + 1) || a[i] != op.text)
                throw std::invalid_argument("edit script does not match old file");
            ++i;
            break;
        case EditOp::Kind::Insert:
            if (op.new_line != int(out.size() + 1))
                throw std::invalid_argument("edit script inserts out of order");
            out.push_back(op.text);
            break;
        }
    }
    if (i != a.size())
        throw std::invalid_argument("edit script leaves old lines unconsumed");
    return out;
}

// New-file lines introduced by the script. Deleted lines have no home in the
// new file, so edits that only remove code are invisible to line tagging.
inline std::set<int> changed_lines(const EditScript& script) {
    std::set<int> out;
    for (const auto& op : script)
        if (op.kind == EditOp::Kind::Insert)
            out.insert(op.new_line);
    return out;
}

// old line -> new line for every kept line.
inline std::map<int, int> keep_mapping(const EditScript& script) {
    std::map<int, int> out;
    for (const auto& op : script)
        if (op.kind == EditOp::Kind::Keep)
            out.emplace(op.old_line, op.new_line);
    return out;
}

} // namespace msentinel
