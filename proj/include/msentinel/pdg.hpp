#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "msentinel/analysis.hpp"
#include "msentinel/annotate.hpp"
#include "msentinel/callgraph.hpp"
#include "msentinel/dataflow.hpp"
#include "msentinel/ir.hpp"

namespace msentinel {

struct PostDominatorTree {
    CallableId callable;
    std::map<int, int> ipdom; // Exit maps to itself
};

// Iterative set-intersection post-dominance over the reversed CFG. Every
// node reaches Exit by construction, so the sets converge to the usual
// chain-structured solution.
inline PostDominatorTree post_dominators(const Cfg& cfg) {
    std::set<int> all;
    for (const auto& i : cfg.instructions)
        all.insert(i.id);
    std::map<int, std::set<int>> pdom;
    for (int n : all)
        pdom[n] = n == cfg.exit_id ? std::set<int>{n} : all;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = cfg.instructions.rbegin(); it != cfg.instructions.rend();
             ++it) {
            int n = it->id;
            if (n == cfg.exit_id)
                continue;
            std::set<int> next;
            bool first = true;
            for (int s : cfg.successors(n)) {
                if (first) {
                    next = pdom[s];
                    first = false;
                } else {
                    std::set<int> inter;
                    for (int x : next)
                        if (pdom[s].count(x))
                            inter.insert(x);
                    next = std::move(inter);
                }
            }
            next.insert(n);
            if (next != pdom[n]) {
                pdom[n] = std::move(next);
                changed = true;
            }
        }
    }
    PostDominatorTree tree;
    tree.callable = cfg.callable;
    tree.ipdom[cfg.exit_id] = cfg.exit_id;
    for (int n : all) {
        if (n == cfg.exit_id)
            continue;
        std::set<int> strict = pdom[n];
        strict.erase(n);
        for (int p : strict)
            if (pdom[p].size() == strict.size()) {
                tree.ipdom[n] = p;
                break;
            }
    }
    return tree;
}

struct PdgEdge {
    int from = 0;
    int to = 0;
    enum class Kind { Control, Data } kind = Kind::Control;
    std::optional<StateElement> element; // Data edges carry their element

    auto operator<=>(const PdgEdge&) const = default;
};

// Classical branch criterion: n is control-dependent on b when some
// successor of b is post-dominated by n but b itself is not. Implemented by
// walking the post-dominator chain from each edge target. The entry node is
// treated as a pseudo-branch (as if it also jumped straight to Exit), which
// hangs top-level straight-line code off Entry.
inline std::vector<PdgEdge> control_deps(const Cfg& cfg,
                                         const PostDominatorTree& tree) {
    auto ipdom = [&](int n) { return tree.ipdom.at(n); };
    auto pdominates = [&](int p, int n) {
        for (int cur = n;; cur = ipdom(cur)) {
            if (cur == p)
                return true;
            if (cur == cfg.exit_id)
                return false;
        }
    };
    std::set<std::pair<int, int>> seen;
    std::vector<PdgEdge> out;
    auto add = [&](int from, int to) {
        if (seen.insert({from, to}).second)
            out.push_back({from, to, PdgEdge::Kind::Control, std::nullopt});
    };
    for (auto [a, b] : cfg.edges) {
        if (a == cfg.entry_id || (b != a && pdominates(b, a)))
            continue;
        int stop = ipdom(a);
        for (int n = b; n != stop; n = ipdom(n)) {
            add(a, n);
            if (n == cfg.exit_id)
                break;
        }
    }
    for (int n : cfg.successors(cfg.entry_id))
        for (int cur = n; cur != cfg.exit_id; cur = ipdom(cur))
            add(cfg.entry_id, cur);
    return out;
}

struct Pdg {
    CallableId callable;
    std::vector<int> nodes; // instruction ids
    std::vector<PdgEdge> edges;
    std::map<int, std::vector<int>> succ;

    const std::vector<int>& successors(int id) const {
        static const std::vector<int> none;
        auto it = succ.find(id);
        return it == succ.end() ? none : it->second;
    }
};

inline Pdg build_pdg(const Cfg& cfg) {
    Pdg pdg;
    pdg.callable = cfg.callable;
    for (const auto& i : cfg.instructions)
        pdg.nodes.push_back(i.id);
    pdg.edges = control_deps(cfg, post_dominators(cfg));
    for (const auto& rd : reaching_defs(cfg))
        pdg.edges.push_back(
            {rd.def_instr, rd.use_instr, PdgEdge::Kind::Data, rd.element});
    std::sort(pdg.edges.begin(), pdg.edges.end());
    pdg.edges.erase(std::unique(pdg.edges.begin(), pdg.edges.end()),
                    pdg.edges.end());
    for (const auto& e : pdg.edges)
        pdg.succ[e.from].push_back(e.to);
    for (auto& [n, next] : pdg.succ) {
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
    }
    return pdg;
}

// Dependence-path interference: within a single callable's PDG, a directed
// path over control or data edges from a LEFT instruction to a RIGHT one (or
// the reverse). Tags here are the raw line tags; callee bodies do not
// inherit their call site's tag in this detector.
inline AnalysisVerdict detect_pdg(const AnnotatedProgram& program,
                                  const CallGraph& cg) {
    AnalysisVerdict v;
    v.analysis = AnalysisKind::PDG;

    std::vector<CallableId> scope;
    for (const auto& id : reachable_callables(cg)) {
        bool tagged = false;
        for (const auto& instr : program.ir.cfgs.at(id).instructions) {
            ContributionTag t = program.tag_of(instr.id);
            tagged |= t.left || t.right;
        }
        if (id == cg.root || tagged)
            scope.push_back(id);
    }

    auto step_of = [&](const Cfg& cfg, int instr_id) {
        return WitnessStep{cfg.callable, cfg.instr(instr_id).line,
                           program.tag_of(instr_id).to_string(), std::nullopt};
    };

    size_t found_lr = 0, found_rl = 0;
    std::vector<PathWitness> lr, rl;
    for (const auto& id : scope) {
        const Cfg& cfg = program.ir.cfgs.at(id);
        Pdg pdg = build_pdg(cfg);
        for (int dir = 0; dir < 2; ++dir) {
            auto src_match = [&](ContributionTag t) {
                return dir == 0 ? t.left : t.right;
            };
            auto dst_match = [&](ContributionTag t) {
                return dir == 0 ? t.right : t.left;
            };
            for (int s : pdg.nodes) {
                if (!src_match(program.tag_of(s)))
                    continue;
                std::map<int, int> parent;
                std::deque<int> work{s};
                parent[s] = s;
                while (!work.empty()) {
                    int n = work.front();
                    work.pop_front();
                    for (int m : pdg.successors(n))
                        if (parent.emplace(m, n).second)
                            work.push_back(m);
                }
                for (int t : pdg.nodes) {
                    if (t == s || !dst_match(program.tag_of(t)) || !parent.count(t))
                        continue;
                    v.interference = true;
                    auto& count = dir == 0 ? found_lr : found_rl;
                    if (count >= kWitnessCap)
                        continue;
                    ++count;
                    PathWitness w;
                    for (int n = t; n != s; n = parent.at(n))
                        w.push_back(step_of(cfg, n));
                    w.push_back(step_of(cfg, s));
                    std::reverse(w.begin(), w.end());
                    (dir == 0 ? lr : rl).push_back(std::move(w));
                }
            }
        }
    }
    v.paths.insert(v.paths.end(), lr.begin(), lr.end());
    v.paths.insert(v.paths.end(), rl.begin(), rl.end());
    return v;
}

} // namespace msentinel
