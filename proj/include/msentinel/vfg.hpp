#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "msentinel/annotate.hpp"
#include "msentinel/callgraph.hpp"
#include "msentinel/dataflow.hpp"
#include "msentinel/ir.hpp"

namespace msentinel {

enum class VfgRole { Def, Use };

// The four binding kinds plus Transfer, which steps through an instruction
// from the values it reads to the value it produces. Without it a def-use
// edge would be a dead end: paths could never continue past an assignment,
// a return, or a call result.
enum class VfgEdgeKind { DefUse, Param, Return, Field, Transfer };

inline const char* vfg_edge_kind_name(VfgEdgeKind k) {
    switch (k) {
    case VfgEdgeKind::DefUse: return "defuse";
    case VfgEdgeKind::Param: return "param";
    case VfgEdgeKind::Return: return "return";
    case VfgEdgeKind::Field: return "field";
    case VfgEdgeKind::Transfer: return "transfer";
    }
    return "?";
}

struct VfgNode {
    int id = 0;
    int instr = 0;
    CallableId callable;
    int line = 0;
    VfgRole role = VfgRole::Use;
    StateElement element;
    ContributionTag tag; // effective tag, body propagation applied
};

struct VfgEdge {
    int from = 0;
    int to = 0;
    VfgEdgeKind kind = VfgEdgeKind::DefUse;
};

struct Vfg {
    std::vector<VfgNode> nodes; // node id == index
    std::vector<VfgEdge> edges; // sorted by (from, to, kind)
    std::map<int, std::vector<int>> succ;

    const VfgNode& node(int id) const { return nodes[static_cast<size_t>(id)]; }
    const std::vector<int>& successors(int id) const {
        static const std::vector<int> none;
        auto it = succ.find(id);
        return it == succ.end() ? none : it->second;
    }
};

enum class TagQuery { Left, Right, Base };

inline bool tag_matches(const ContributionTag& tag, TagQuery q) {
    switch (q) {
    case TagQuery::Left: return tag.left;
    case TagQuery::Right: return tag.right;
    case TagQuery::Base: return tag.is_base();
    }
    return false;
}

struct WitnessPath {
    std::vector<int> nodes; // node ids, source first
    TagQuery source_tag = TagQuery::Left;
    TagQuery sink_tag = TagQuery::Right;
};

// A call site tagged LEFT or RIGHT marks the whole body of its in-scope
// callee with that tag, transitively through nested calls. Returns the
// effective tag per instruction; instructions with an empty effective tag
// are absent.
inline std::map<int, ContributionTag>
propagated_body_tags(const AnnotatedProgram& program, const CallGraph& cg) {
    std::map<CallableId, ContributionTag> body;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : cg.edges) {
            ContributionTag call_tag = program.tag_of(e.call_instr);
            auto cb = body.find(e.caller);
            if (cb != body.end()) {
                call_tag.left = call_tag.left || cb->second.left;
                call_tag.right = call_tag.right || cb->second.right;
            }
            if (!call_tag.left && !call_tag.right)
                continue;
            ContributionTag& dst = body[e.callee];
            ContributionTag merged{dst.left || call_tag.left,
                                   dst.right || call_tag.right};
            if (merged != dst) {
                dst = merged;
                changed = true;
            }
        }
    }
    std::map<int, ContributionTag> out;
    for (const auto& [id, depth] : cg.depths) {
        const Cfg& cfg = program.ir.cfgs.at(id);
        auto cb = body.find(id);
        for (const auto& instr : cfg.instructions) {
            ContributionTag t = program.tag_of(instr.id);
            if (cb != body.end()) {
                t.left = t.left || cb->second.left;
                t.right = t.right || cb->second.right;
            }
            if (t.left || t.right)
                out[instr.id] = t;
        }
    }
    return out;
}

// Call-site kill predicate for reaching definitions: a call clobbers a field
// or global only when its in-scope callee (or anything the callee reaches)
// writes that element. Unresolved and out-of-scope callees clobber nothing.
inline CallKillFn make_call_kill(const ProgramIr& ir, const CallGraph& cg) {
    auto writes = std::make_shared<std::map<CallableId, std::set<StateElement>>>(
        transitive_writes(ir, cg));
    return [writes, &cg](const Instruction& call, const StateElement& e) {
        if (!call.callee_resolved || !cg.in_scope(*call.callee_resolved))
            return false;
        auto it = writes->find(*call.callee_resolved);
        return it != writes->end() && it->second.count(e) != 0;
    };
}

inline Vfg build_vfg(const AnnotatedProgram& program, const CallGraph& cg) {
    const ProgramIr& ir = program.ir;
    Vfg g;
    std::map<int, ContributionTag> tags = propagated_body_tags(program, cg);
    auto tag_of = [&](int instr_id) {
        auto it = tags.find(instr_id);
        return it == tags.end() ? ContributionTag{} : it->second;
    };

    // (instr, role, element) -> node id
    std::map<std::tuple<int, VfgRole, StateElement>, int> index;
    auto add_node = [&](int instr_id, const CallableId& callable, int line,
                        VfgRole role, const StateElement& e) {
        auto key = std::make_tuple(instr_id, role, e);
        auto it = index.find(key);
        if (it != index.end())
            return it->second;
        int id = static_cast<int>(g.nodes.size());
        g.nodes.push_back({id, instr_id, callable, line, role, e, tag_of(instr_id)});
        index.emplace(key, id);
        return id;
    };
    auto find_node = [&](int instr_id, VfgRole role,
                         const StateElement& e) -> std::optional<int> {
        auto it = index.find(std::make_tuple(instr_id, role, e));
        if (it == index.end())
            return std::nullopt;
        return it->second;
    };

    std::vector<CallableId> order = reachable_callables(cg);
    CallKillFn kill = make_call_kill(ir, cg);
    std::map<CallableId, std::vector<ReachingDef>> reach;
    for (const auto& id : order)
        reach[id] = reaching_defs(ir.cfgs.at(id), kill);

    auto rs_use_element = [&](const Instruction& instr) -> std::optional<StateElement> {
        if (instr.kind != Instruction::Kind::Call || !instr.target ||
            !instr.callee_resolved || !cg.in_scope(*instr.callee_resolved))
            return std::nullopt;
        return StateElement::return_slot(*instr.callee_resolved);
    };

    std::set<std::tuple<int, int, VfgEdgeKind>> edge_set;
    auto add_edge = [&](int from, int to, VfgEdgeKind kind) {
        edge_set.insert({from, to, kind});
    };

    // nodes, plus the intra-instruction transfer edges
    for (const auto& cid : order) {
        const Cfg& cfg = ir.cfgs.at(cid);
        for (const auto& instr : cfg.instructions) {
            std::vector<int> use_nodes;
            std::set<StateElement> seen;
            for (const auto& u : instr.uses)
                if (seen.insert(u).second)
                    use_nodes.push_back(
                        add_node(instr.id, cid, instr.line, VfgRole::Use, u));
            std::optional<int> rs_use;
            if (auto rs = rs_use_element(instr))
                rs_use = add_node(instr.id, cid, instr.line, VfgRole::Use, *rs);
            std::optional<int> def;
            if (instr.target)
                def = add_node(instr.id, cid, instr.line, VfgRole::Def, *instr.target);
            if (!def)
                continue;
            switch (instr.kind) {
            case Instruction::Kind::Assign:
            case Instruction::Kind::Return:
                for (int u : use_nodes)
                    add_edge(u, *def, VfgEdgeKind::Transfer);
                break;
            case Instruction::Kind::Call:
                // only the callee's returned value feeds the result
                if (rs_use)
                    add_edge(*rs_use, *def, VfgEdgeKind::Transfer);
                break;
            default:
                break;
            }
        }
    }

    // def-use edges from kill-aware reaching definitions
    for (const auto& cid : order) {
        const Cfg& cfg = ir.cfgs.at(cid);
        for (const auto& rd : reach[cid]) {
            if (rd.def_instr == cfg.entry_id)
                continue; // formal seeds are the targets of Param edges
            auto d = find_node(rd.def_instr, VfgRole::Def, rd.element);
            auto u = find_node(rd.use_instr, VfgRole::Use, rd.element);
            if (d && u)
                add_edge(*d, *u, VfgEdgeKind::DefUse);
        }
    }

    // return-value edges
    for (const auto& e : cg.edges) {
        const Cfg& caller = ir.cfgs.at(e.caller);
        const Instruction& call = caller.instr(e.call_instr);
        auto rs = rs_use_element(call);
        if (!rs)
            continue;
        auto u = find_node(call.id, VfgRole::Use, *rs);
        const Cfg& callee = ir.cfgs.at(e.callee);
        for (const auto& instr : callee.instructions)
            if (instr.kind == Instruction::Kind::Return && instr.target)
                if (auto d = find_node(instr.id, VfgRole::Def, *instr.target))
                    add_edge(*d, *u, VfgEdgeKind::Return);
    }

    // parameter binding: definitions of the actual feed the uses of the
    // formal that the callee's entry reaches. When the actual is itself a
    // formal of the caller, sources are inherited through the chain.
    using FormalKey = std::pair<CallableId, std::string>;
    std::map<FormalKey, std::set<int>> formal_sources;
    std::set<std::pair<FormalKey, FormalKey>> links;
    for (const auto& e : cg.edges) {
        const Cfg& caller = ir.cfgs.at(e.caller);
        const Cfg& callee = ir.cfgs.at(e.callee);
        const Instruction& call = caller.instr(e.call_instr);
        size_t n = std::min(call.args.size(), callee.params.size());
        for (size_t i = 0; i < n; ++i) {
            if (!call.args[i])
                continue;
            const StateElement& actual = *call.args[i];
            FormalKey formal{e.callee, callee.params[i]};
            for (const auto& rd : reach[e.caller]) {
                if (rd.use_instr != call.id || rd.element != actual)
                    continue;
                if (rd.def_instr == caller.entry_id) {
                    if (actual.kind == StateElement::Kind::Local)
                        links.insert({{e.caller, actual.name}, formal});
                } else if (auto d =
                               find_node(rd.def_instr, VfgRole::Def, actual)) {
                    formal_sources[formal].insert(*d);
                }
            }
        }
    }
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [from, to] : links) {
            auto src = formal_sources.find(from);
            if (src == formal_sources.end())
                continue;
            auto& dst = formal_sources[to];
            size_t before = dst.size();
            dst.insert(src->second.begin(), src->second.end());
            grew |= dst.size() != before;
        }
    }
    for (const auto& [formal, defs] : formal_sources) {
        const Cfg& callee = ir.cfgs.at(formal.first);
        StateElement elem = StateElement::local(formal.first, formal.second);
        for (const auto& rd : reach[formal.first]) {
            if (rd.def_instr != callee.entry_id || rd.element != elem)
                continue;
            if (auto u = find_node(rd.use_instr, VfgRole::Use, elem))
                for (int d : defs)
                    add_edge(d, *u, VfgEdgeKind::Param);
        }
    }

    // field and global stores feed loads of the same element across
    // callable boundaries, ignoring order
    std::map<StateElement, std::vector<int>> stores, loads;
    for (const auto& n : g.nodes) {
        if (n.element.kind != StateElement::Kind::Field &&
            n.element.kind != StateElement::Kind::Global)
            continue;
        (n.role == VfgRole::Def ? stores : loads)[n.element].push_back(n.id);
    }
    for (const auto& [elem, defs] : stores) {
        auto it = loads.find(elem);
        if (it == loads.end())
            continue;
        for (int d : defs)
            for (int u : it->second)
                if (g.node(d).callable != g.node(u).callable)
                    add_edge(d, u, VfgEdgeKind::Field);
    }

    for (const auto& [from, to, kind] : edge_set) {
        g.edges.push_back({from, to, kind});
        g.succ[from].push_back(to);
    }
    for (auto& [n, next] : g.succ) {
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
    }
    return g;
}

// One shortest path per (source, sink) pair, sources being DEF nodes tagged
// `source` and sinks USE nodes tagged `sink`. Results ordered by source node
// id, then sink node id.
inline std::vector<WitnessPath>
reachable_witnesses(const Vfg& g, TagQuery source, TagQuery sink) {
    std::vector<WitnessPath> out;
    for (const auto& s : g.nodes) {
        if (s.role != VfgRole::Def || !tag_matches(s.tag, source))
            continue;
        std::map<int, int> parent;
        std::deque<int> work{s.id};
        parent[s.id] = s.id;
        while (!work.empty()) {
            int n = work.front();
            work.pop_front();
            for (int m : g.successors(n))
                if (parent.emplace(m, n).second)
                    work.push_back(m);
        }
        for (const auto& t : g.nodes) {
            if (t.role != VfgRole::Use || !tag_matches(t.tag, sink))
                continue;
            auto it = parent.find(t.id);
            if (it == parent.end())
                continue;
            WitnessPath w;
            w.source_tag = source;
            w.sink_tag = sink;
            for (int n = t.id; n != s.id; n = parent.at(n))
                w.nodes.push_back(n);
            w.nodes.push_back(s.id);
            std::reverse(w.nodes.begin(), w.nodes.end());
            out.push_back(std::move(w));
        }
    }
    return out;
}

} // namespace msentinel
