#pragma once

#include <deque>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "msentinel/ir.hpp"

namespace msentinel {

struct ReachingDef {
    int def_instr;
    int use_instr;
    StateElement element;

    auto operator<=>(const ReachingDef&) const = default;
};

// Decides whether a call instruction clobbers an element. Used to model the
// side effects of callees without inlining them.
using CallKillFn = std::function<bool(const Instruction&, const StateElement&)>;

// Classic forward may reaching-definitions over one cfg. The entry
// instruction seeds a definition per formal parameter. A definition of an
// element kills prior definitions of exactly that element; an optional
// call-kill predicate additionally retires field/global definitions at call
// sites. Returns one triple per (definition, use) pair, ordered by use then
// definition.
inline std::vector<ReachingDef> reaching_defs(const Cfg& cfg,
                                              const CallKillFn& call_kills = {}) {
    using Fact = std::pair<int, StateElement>; // def instr, element
    std::map<int, std::set<Fact>> in, out;

    auto transfer = [&](const Instruction& instr, std::set<Fact> state) {
        if (instr.kind == Instruction::Kind::Entry) {
            for (const auto& p : cfg.params)
                state.insert({instr.id, StateElement::local(cfg.callable, p)});
            return state;
        }
        if (instr.kind == Instruction::Kind::Call && call_kills) {
            for (auto it = state.begin(); it != state.end();) {
                const StateElement& e = it->second;
                bool clobbered = (e.kind == StateElement::Kind::Field ||
                                  e.kind == StateElement::Kind::Global) &&
                                 call_kills(instr, e);
                it = clobbered ? state.erase(it) : ++it;
            }
        }
        if (instr.target) {
            for (auto it = state.begin(); it != state.end();)
                it = it->second == *instr.target ? state.erase(it) : ++it;
            state.insert({instr.id, *instr.target});
        }
        return state;
    };

    std::deque<int> work;
    for (const auto& instr : cfg.instructions)
        work.push_back(instr.id);
    std::set<int> queued(work.begin(), work.end());
    while (!work.empty()) {
        int id = work.front();
        work.pop_front();
        queued.erase(id);
        std::set<Fact> inset;
        for (int p : cfg.predecessors(id))
            inset.insert(out[p].begin(), out[p].end());
        in[id] = inset;
        std::set<Fact> outset = transfer(cfg.instr(id), std::move(inset));
        if (outset != out[id]) {
            out[id] = std::move(outset);
            for (int s : cfg.successors(id))
                if (queued.insert(s).second)
                    work.push_back(s);
        }
    }

    std::vector<ReachingDef> result;
    for (const auto& instr : cfg.instructions) {
        const auto& state = in[instr.id];
        for (const auto& use : instr.uses)
            for (const auto& [def, elem] : state)
                if (elem == use)
                    result.push_back({def, instr.id, use});
    }
    std::sort(result.begin(), result.end(),
              [](const ReachingDef& a, const ReachingDef& b) {
                  if (a.use_instr != b.use_instr) return a.use_instr < b.use_instr;
                  if (a.def_instr != b.def_instr) return a.def_instr < b.def_instr;
                  return a.element < b.element;
              });
    result.erase(std::unique(result.begin(), result.end(),
                             [](const ReachingDef& a, const ReachingDef& b) {
                                 return a.def_instr == b.def_instr &&
                                        a.use_instr == b.use_instr &&
                                        a.element == b.element;
                             }),
                 result.end());
    return result;
}

} // namespace msentinel
