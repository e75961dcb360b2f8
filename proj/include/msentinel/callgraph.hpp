#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "msentinel/ir.hpp"
#include "msentinel/source.hpp"

namespace msentinel {

struct CallGraphEdge {
    CallableId caller;
    int call_instr; // id of the Call instruction
    CallableId callee;
};

struct CallGraph {
    CallableId root;
    int depth_limit = 0;
    std::map<CallableId, int> depths;
    std::vector<CallGraphEdge> edges; // every resolved call between in-scope nodes

    bool in_scope(const CallableId& id) const { return depths.count(id) != 0; }
};

// Breadth-first walk from the entry callable. The entry sits at depth zero;
// nodes at the depth limit are kept but their outgoing calls are not
// followed. Edges are recorded between any two in-scope nodes.
inline CallGraph build_call_graph(const ProgramIr& ir, const CallableId& entry,
                                  int depth_limit) {
    if (!ir.cfgs.count(entry))
        throw InputError("entry callable '" + entry + "' does not exist");
    CallGraph cg;
    cg.root = entry;
    cg.depth_limit = depth_limit;
    cg.depths[entry] = 0;
    std::deque<CallableId> work{entry};
    while (!work.empty()) {
        CallableId cur = work.front();
        work.pop_front();
        int d = cg.depths.at(cur);
        if (d >= depth_limit)
            continue;
        for (const auto& instr : ir.cfgs.at(cur).instructions) {
            if (instr.kind != Instruction::Kind::Call || !instr.callee_resolved)
                continue;
            const CallableId& callee = *instr.callee_resolved;
            if (!ir.cfgs.count(callee))
                continue;
            if (!cg.depths.count(callee)) {
                cg.depths[callee] = d + 1;
                work.push_back(callee);
            }
        }
    }
    for (auto& [id, depth] : cg.depths) {
        for (const auto& instr : ir.cfgs.at(id).instructions) {
            if (instr.kind != Instruction::Kind::Call || !instr.callee_resolved)
                continue;
            if (cg.in_scope(*instr.callee_resolved))
                cg.edges.push_back({id, instr.id, *instr.callee_resolved});
        }
    }
    return cg;
}

// In-scope callables ordered by depth, then name.
inline std::vector<CallableId> reachable_callables(const CallGraph& cg) {
    std::vector<CallableId> out;
    for (auto& [id, d] : cg.depths)
        out.push_back(id);
    std::sort(out.begin(), out.end(), [&](const CallableId& a, const CallableId& b) {
        int da = cg.depths.at(a), db = cg.depths.at(b);
        return da != db ? da < db : a < b;
    });
    return out;
}

// For each in-scope callable, the fields and globals written by it or by
// anything it can transitively call within scope.
inline std::map<CallableId, std::set<StateElement>>
transitive_writes(const ProgramIr& ir, const CallGraph& cg) {
    std::map<CallableId, std::set<StateElement>> out;
    std::map<CallableId, std::set<CallableId>> callees;
    for (auto& e : cg.edges)
        callees[e.caller].insert(e.callee);
    for (auto& [id, d] : cg.depths) {
        auto& set = out[id];
        for (const auto& instr : ir.cfgs.at(id).instructions)
            if (instr.target && (instr.target->kind == StateElement::Kind::Field ||
                                 instr.target->kind == StateElement::Kind::Global))
                set.insert(*instr.target);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [caller, cs] : callees) {
            auto& dst = out[caller];
            size_t before = dst.size();
            for (auto& callee : cs) {
                auto it = out.find(callee);
                if (it != out.end())
                    dst.insert(it->second.begin(), it->second.end());
            }
            changed |= dst.size() != before;
        }
    }
    return out;
}

} // namespace msentinel
