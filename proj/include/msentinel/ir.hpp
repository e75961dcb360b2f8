#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace msentinel {

// "Class.method" for methods, bare name for free functions.
using CallableId = std::string;

inline std::optional<std::string> callable_class(const CallableId& id) {
    auto dot = id.find('.');
    if (dot == std::string::npos)
        return std::nullopt;
    return id.substr(0, dot);
}

// A storage location the analyses track. `this` is resolved to the
// enclosing class name before elements are built, so two methods of the
// same class touching this.f produce the identical Field element.
struct StateElement {
    enum class Kind { Local, Global, Field, ReturnSlot };

    Kind kind;
    std::string owner; // Local/ReturnSlot: callable id; Field: base path; Global: empty
    std::string name;  // Local/Global: variable name; Field: field name; ReturnSlot: empty

    static StateElement local(CallableId callable, std::string var) {
        return {Kind::Local, std::move(callable), std::move(var)};
    }
    static StateElement global(std::string var) {
        return {Kind::Global, "", std::move(var)};
    }
    static StateElement field(std::string base_path, std::string field_name) {
        return {Kind::Field, std::move(base_path), std::move(field_name)};
    }
    static StateElement return_slot(CallableId callable) {
        return {Kind::ReturnSlot, std::move(callable), ""};
    }

    auto operator<=>(const StateElement&) const = default;

    std::string to_string() const {
        switch (kind) {
        case Kind::Local: return "local:" + owner + ":" + name;
        case Kind::Global: return "global:" + name;
        case Kind::Field: return "field:" + owner + "." + name;
        case Kind::ReturnSlot: return "return:" + owner;
        }
        return "?";
    }
};

struct Instruction {
    enum class Kind { Entry, Exit, Assign, Call, Return, CondBranch };

    int id = 0;   // unique across the whole program
    Kind kind = Kind::Assign;
    int line = 0; // 1-based source line; Entry/Exit carry the declaration line

    std::optional<StateElement> target; // Assign target, Call result, Return slot
    std::vector<StateElement> uses;     // elements read by this instruction

    // Call only.
    std::string callee; // as spelled: "name" or "Class.name"
    std::optional<CallableId> callee_resolved;
    std::vector<std::optional<StateElement>> args; // element per actual, if the
                                                   // actual is a plain read
};

inline const char* instruction_kind_name(Instruction::Kind k) {
    switch (k) {
    case Instruction::Kind::Entry: return "entry";
    case Instruction::Kind::Exit: return "exit";
    case Instruction::Kind::Assign: return "assign";
    case Instruction::Kind::Call: return "call";
    case Instruction::Kind::Return: return "return";
    case Instruction::Kind::CondBranch: return "branch";
    }
    return "?";
}

struct Cfg {
    CallableId callable;
    std::string file;
    std::vector<std::string> params;
    std::vector<Instruction> instructions; // ascending id order
    std::vector<std::pair<int, int>> edges; // emission order; a branch's true
                                            // edge precedes its false edge
    int entry_id = -1;
    int exit_id = -1;

    std::map<int, std::vector<int>> succ, pred; // rebuilt by finalize_edges()

    const Instruction& instr(int id) const {
        auto it = std::lower_bound(instructions.begin(), instructions.end(), id,
                                   [](const Instruction& i, int v) { return i.id < v; });
        return *it;
    }
    bool has_instr(int id) const {
        auto it = std::lower_bound(instructions.begin(), instructions.end(), id,
                                   [](const Instruction& i, int v) { return i.id < v; });
        return it != instructions.end() && it->id == id;
    }
    const std::vector<int>& successors(int id) const {
        static const std::vector<int> none;
        auto it = succ.find(id);
        return it == succ.end() ? none : it->second;
    }
    const std::vector<int>& predecessors(int id) const {
        static const std::vector<int> none;
        auto it = pred.find(id);
        return it == pred.end() ? none : it->second;
    }

    void finalize_edges() {
        succ.clear();
        pred.clear();
        for (auto [a, b] : edges) {
            succ[a].push_back(b);
            pred[b].push_back(a);
        }
    }
};

struct ClassInfo {
    std::set<std::string> fields;
    std::set<std::string> methods;
};

struct ProgramIr {
    std::map<CallableId, Cfg> cfgs;
    std::map<std::string, ClassInfo> classes;
    std::set<std::string> globals;
    std::vector<std::string> warnings;
    // file -> lines holding more than one statement (tags are line-grained,
    // so such lines are ambiguous and worth flagging)
    std::map<std::string, std::set<int>> multi_statement_lines;
    std::map<std::string, int> file_line_counts;

    const Cfg* find_cfg(const CallableId& id) const {
        auto it = cfgs.find(id);
        return it == cfgs.end() ? nullptr : &it->second;
    }
    // Locate the cfg owning a program-wide instruction id.
    const Cfg* cfg_of_instr(int instr_id) const {
        for (auto& [name, cfg] : cfgs)
            if (cfg.has_instr(instr_id))
                return &cfg;
        return nullptr;
    }
};

} // namespace msentinel
