#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msentinel/analysis.hpp"
#include "msentinel/annotate.hpp"
#include "msentinel/callgraph.hpp"
#include "msentinel/vfg.hpp"

namespace msentinel {

namespace detail {

inline PathWitness witness_from_path(const Vfg& g, const WitnessPath& p) {
    PathWitness out;
    for (int id : p.nodes) {
        const VfgNode& n = g.node(id);
        out.push_back({n.callable, n.line, n.tag.to_string(),
                       n.element.to_string()});
    }
    return out;
}

inline void append_capped(std::vector<PathWitness>& dst, const Vfg& g,
                          const std::vector<WitnessPath>& paths) {
    for (size_t i = 0; i < paths.size() && i < kWitnessCap; ++i)
        dst.push_back(witness_from_path(g, paths[i]));
}

} // namespace detail

// Data-flow interference: a LEFT definition reaching a RIGHT use, or the
// reverse, anywhere in the value-flow graph.
inline AnalysisVerdict detect_df(const AnnotatedProgram& program,
                                 const CallGraph& cg) {
    AnalysisVerdict v;
    v.analysis = AnalysisKind::DF;
    Vfg g = build_vfg(program, cg);
    auto lr = reachable_witnesses(g, TagQuery::Left, TagQuery::Right);
    auto rl = reachable_witnesses(g, TagQuery::Right, TagQuery::Left);
    v.interference = !lr.empty() || !rl.empty();
    detail::append_capped(v.paths, g, lr);
    detail::append_capped(v.paths, g, rl);
    return v;
}

// Confluence: LEFT and RIGHT definitions flowing into one shared BASE use
// instruction. Witnesses arrive in pairs, the LEFT path then the RIGHT path
// for each common sink.
inline AnalysisVerdict detect_confluence(const AnnotatedProgram& program,
                                         const CallGraph& cg) {
    AnalysisVerdict v;
    v.analysis = AnalysisKind::CF;
    Vfg g = build_vfg(program, cg);
    auto from_left = reachable_witnesses(g, TagQuery::Left, TagQuery::Base);
    auto from_right = reachable_witnesses(g, TagQuery::Right, TagQuery::Base);

    auto by_sink = [&](const std::vector<WitnessPath>& paths) {
        std::map<int, const WitnessPath*> first; // sink instruction -> path
        for (const auto& p : paths) {
            int instr = g.node(p.nodes.back()).instr;
            first.emplace(instr, &p);
        }
        return first;
    };
    std::map<int, const WitnessPath*> left_sinks = by_sink(from_left);
    std::map<int, const WitnessPath*> right_sinks = by_sink(from_right);

    size_t pairs = 0;
    for (const auto& [instr, lpath] : left_sinks) {
        auto rt = right_sinks.find(instr);
        if (rt == right_sinks.end())
            continue;
        v.interference = true;
        if (pairs < kWitnessCap) {
            v.paths.push_back(detail::witness_from_path(g, *lpath));
            v.paths.push_back(detail::witness_from_path(g, *rt->second));
            ++pairs;
        }
    }
    return v;
}

namespace detail {

inline std::string access_path(const StateElement& e) {
    switch (e.kind) {
    case StateElement::Kind::Local:
    case StateElement::Kind::Global:
        return e.name;
    case StateElement::Kind::Field:
        return e.owner + "." + e.name;
    case StateElement::Kind::ReturnSlot:
        return "";
    }
    return "";
}

// outer `o` contains inner `o.a` (any access-path prefix).
inline bool path_contains(const StateElement& outer, const StateElement& inner) {
    std::string o = access_path(outer), i = access_path(inner);
    return !o.empty() && i.size() > o.size() && i.compare(0, o.size(), o) == 0 &&
           i[o.size()] == '.';
}

// Override-assignment state: per side, each recorded element and the lowest
// instruction id that defined it (for witness reporting).
struct OaSideState {
    std::map<StateElement, int> defs;

    bool operator==(const OaSideState&) const = default;

    void record(const StateElement& e, int instr) {
        auto [it, fresh] = defs.emplace(e, instr);
        if (!fresh && instr < it->second)
            it->second = instr;
    }
    void merge(const OaSideState& other) {
        for (const auto& [e, i] : other.defs)
            record(e, i);
    }
    void remove_overridden(const StateElement& e) {
        for (auto it = defs.begin(); it != defs.end();) {
            bool gone = it->first == e || path_contains(e, it->first) ||
                        path_contains(it->first, e);
            it = gone ? defs.erase(it) : ++it;
        }
    }
};

struct OaState {
    OaSideState l, r;
    bool operator==(const OaState&) const = default;

    void merge(const OaState& o) {
        l.merge(o.l);
        r.merge(o.r);
    }
};

struct OaRawConflict {
    int first_instr;
    StateElement first_element;
    ContributionTag first_side;
    int second_instr;
    StateElement second_element;
    ContributionTag second_side;
    OaRelation relation;

    auto operator<=>(const OaRawConflict&) const = default;
};

// Runs the forward set machine over one callable, inlining in-scope callees
// at their call sites with the call's tag as context, then inspects each
// tagged definition against the other side's incoming set.
class OaTraversal {
public:
    OaTraversal(const AnnotatedProgram& program, const CallGraph& cg)
        : program_(program), cg_(cg) {}

    void run() { process(cg_.root, ContributionTag{}, OaState{}); }

    std::set<OaRawConflict> conflicts;

private:
    const AnnotatedProgram& program_;
    const CallGraph& cg_;
    std::vector<CallableId> stack_;

    static bool trackable(const StateElement& e) {
        return e.kind != StateElement::Kind::ReturnSlot;
    }

    ContributionTag effective(const Instruction& instr, ContributionTag ctx) const {
        ContributionTag t = program_.tag_of(instr.id);
        t.left = t.left || ctx.left;
        t.right = t.right || ctx.right;
        return t;
    }

    void check(const StateElement& e, int instr, ContributionTag tag,
               const OaState& pre) {
        auto scan = [&](const OaSideState& other, ContributionTag first_side,
                        ContributionTag second_side) {
            for (const auto& [o, oi] : other.defs) {
                if (o == e) {
                    if (oi != instr)
                        conflicts.insert({oi, o, first_side, instr, e, second_side,
                                          OaRelation::Equal});
                } else if (path_contains(o, e) || path_contains(e, o)) {
                    conflicts.insert({oi, o, first_side, instr, e, second_side,
                                      OaRelation::Contains});
                }
            }
        };
        if (tag.left)
            scan(pre.r, ContributionTag{false, true}, ContributionTag{true, false});
        if (tag.right)
            scan(pre.l, ContributionTag{true, false}, ContributionTag{false, true});
    }

    // callee body effects of a call site; identity for anything else
    OaState apply_body(const Instruction& instr, ContributionTag ctx, OaState state) {
        if (instr.kind == Instruction::Kind::Call && instr.callee_resolved &&
            cg_.in_scope(*instr.callee_resolved) &&
            std::find(stack_.begin(), stack_.end(), *instr.callee_resolved) ==
                stack_.end())
            state = process(*instr.callee_resolved, effective(instr, ctx),
                            std::move(state));
        return state;
    }

    // the instruction's own definition, applied after any body effects
    OaState apply_def(const Instruction& instr, ContributionTag ctx, OaState state) {
        if (instr.target && trackable(*instr.target)) {
            ContributionTag tag = effective(instr, ctx);
            if (tag.left)
                state.l.record(*instr.target, instr.id);
            if (tag.right)
                state.r.record(*instr.target, instr.id);
            if (tag.is_base()) {
                state.l.remove_overridden(*instr.target);
                state.r.remove_overridden(*instr.target);
            }
        }
        return state;
    }

    OaState process(const CallableId& id, ContributionTag ctx, OaState entry_state) {
        const Cfg& cfg = program_.ir.cfgs.at(id);
        stack_.push_back(id);
        std::map<int, OaState> in, out;
        std::deque<int> work;
        std::set<int> queued;
        for (const auto& instr : cfg.instructions) {
            work.push_back(instr.id);
            queued.insert(instr.id);
        }
        while (!work.empty()) {
            int n = work.front();
            work.pop_front();
            queued.erase(n);
            OaState inset;
            if (n == cfg.entry_id)
                inset = entry_state;
            for (int p : cfg.predecessors(n))
                inset.merge(out[p]);
            in[n] = inset;
            const Instruction& instr = cfg.instr(n);
            OaState outset =
                apply_def(instr, ctx, apply_body(instr, ctx, std::move(inset)));
            if (!(outset == out[n])) {
                out[n] = std::move(outset);
                for (int s : cfg.successors(n))
                    if (queued.insert(s).second)
                        work.push_back(s);
            }
        }
        // reporting sweep against the converged states; a call's result is
        // checked against the state after its body ran
        for (const auto& instr : cfg.instructions) {
            if (!instr.target || !trackable(*instr.target))
                continue;
            ContributionTag tag = effective(instr, ctx);
            if (tag.is_base())
                continue;
            check(*instr.target, instr.id, tag,
                  apply_body(instr, ctx, in[instr.id]));
        }
        stack_.pop_back();
        return in[cfg.exit_id];
    }
};

} // namespace detail

// Override assignment: one side's definition of an element lands while the
// other side's definition of the same (or containing/contained) element is
// still standing, with no base redefinition in between.
inline AnalysisVerdict detect_oa(const AnnotatedProgram& program,
                                 const CallGraph& cg) {
    AnalysisVerdict v;
    v.analysis = AnalysisKind::OA;
    detail::OaTraversal t(program, cg);
    t.run();
    v.interference = !t.conflicts.empty();

    auto where = [&](int instr_id) -> std::pair<CallableId, int> {
        const Cfg* cfg = program.ir.cfg_of_instr(instr_id);
        return {cfg->callable, cfg->instr(instr_id).line};
    };
    size_t kept = 0;
    for (const auto& c : t.conflicts) {
        if (kept >= kWitnessCap)
            break;
        auto [fc, fl] = where(c.first_instr);
        auto [sc, sl] = where(c.second_instr);
        OaWitness w;
        w.first = {fc, fl, c.first_element.to_string(), c.first_side.to_string()};
        w.second = {sc, sl, c.second_element.to_string(), c.second_side.to_string()};
        w.relation = c.relation;
        v.conflicts.push_back(std::move(w));
        ++kept;
    }
    return v;
}

} // namespace msentinel
