#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "msentinel/callgraph.hpp"
#include "msentinel/lower.hpp"
#include "msentinel/pdg.hpp"
#include "oracles.hpp"

using namespace msentinel;

namespace {

ProgramIr lower_text(const std::string& text) {
    return lower_sources({SourceFile::from_text("t.ml", text)});
}

// ids of f's instructions by position, for readable assertions
std::vector<int> ids_of(const Cfg& cfg) {
    std::vector<int> out;
    for (const auto& i : cfg.instructions)
        out.push_back(i.id);
    return out;
}

std::set<std::pair<int, int>> control_pairs(const Cfg& cfg) {
    std::set<std::pair<int, int>> out;
    for (const auto& e : control_deps(cfg, post_dominators(cfg)))
        out.insert({e.from, e.to});
    return out;
}

const std::string kChain = R"(func main() { a(); }
func a() { b(); }
func b() { c(); }
func c() { d(); }
func d() { e(); }
func e() { f(); }
func f() { g(); }
func g() { return 0; }
)";

} // namespace

TEST_CASE("call graph walks breadth-first to the depth limit") {
    ProgramIr ir = lower_text(kChain);
    CallGraph cg = build_call_graph(ir, "main", 5);
    CHECK(cg.root == "main");
    CHECK(cg.depths.size() == 6); // main..e
    CHECK(cg.depths.at("main") == 0);
    CHECK(cg.depths.at("e") == 5);
    CHECK_FALSE(cg.in_scope("f"));
    // calls out of the frontier are not edges
    CHECK(cg.edges.size() == 5);
    for (const auto& e : cg.edges) {
        CHECK(cg.in_scope(e.caller));
        CHECK(cg.in_scope(e.callee));
        CHECK(ir.cfg_of_instr(e.call_instr)->callable == e.caller);
    }
}

TEST_CASE("depth zero keeps only the entry") {
    ProgramIr ir = lower_text(kChain);
    CallGraph cg = build_call_graph(ir, "main", 0);
    CHECK(cg.depths.size() == 1);
    CHECK(cg.edges.empty());
}

TEST_CASE("recursion does not loop the builder") {
    ProgramIr ir = lower_text(R"(func a() { b(); }
func b() { a(); }
)");
    CallGraph cg = build_call_graph(ir, "a", 10);
    CHECK(cg.depths.size() == 2);
    CHECK(cg.edges.size() == 2); // a->b and the back call b->a
}

TEST_CASE("an unknown entry is an input error") {
    ProgramIr ir = lower_text("func a() { return 0; }\n");
    CHECK_THROWS_AS(build_call_graph(ir, "nope", 5), InputError);
}

TEST_CASE("reachable callables sort by depth then name") {
    ProgramIr ir = lower_text(R"(func main() {
    zeta();
    alpha();
}
func zeta() { return 1; }
func alpha() { return 2; }
)");
    CallGraph cg = build_call_graph(ir, "main", 5);
    CHECK(reachable_callables(cg) ==
          std::vector<CallableId>{"main", "alpha", "zeta"});
}

TEST_CASE("transitive writes fold callee effects into callers") {
    ProgramIr ir = lower_text(R"(var g;
class K {
    field f;
    method m() {
        this.f = 1;
    }
}
func main() {
    helper();
    K.m();
}
func helper() {
    g = 1;
    var local = 2;
    return local;
}
)");
    CallGraph cg = build_call_graph(ir, "main", 5);
    auto writes = transitive_writes(ir, cg);
    CHECK(writes.at("helper") == std::set<StateElement>{StateElement::global("g")});
    CHECK(writes.at("main") ==
          std::set<StateElement>{StateElement::global("g"),
                                 StateElement::field("K", "f")});
    // locals and return slots never appear
    for (auto& [id, set] : writes)
        for (auto& el : set)
            CHECK((el.kind == StateElement::Kind::Field ||
                   el.kind == StateElement::Kind::Global));
}

TEST_CASE("out-of-scope callees do not contribute writes") {
    ProgramIr ir = lower_text(R"(var g;
func main() { mid(); }
func mid() { leaf(); }
func leaf() { g = 1; }
)");
    CallGraph shallow = build_call_graph(ir, "main", 1);
    auto writes = transitive_writes(ir, shallow);
    CHECK(writes.at("main").empty());
    CallGraph deep = build_call_graph(ir, "main", 2);
    CHECK(transitive_writes(ir, deep).at("main") ==
          std::set<StateElement>{StateElement::global("g")});
}

TEST_CASE("post-dominators of an if/else form the expected chain") {
    ProgramIr ir = lower_text(R"(var g;
func f(c) {
    if (c) {
        g = 1;
    } else {
        g = 2;
    }
    g = 3;
}
)");
    const Cfg& f = *ir.find_cfg("f");
    auto ids = ids_of(f); // entry, branch, then, else, join, exit
    PostDominatorTree t = post_dominators(f);
    CHECK(t.ipdom.at(ids[0]) == ids[1]); // entry -> branch
    CHECK(t.ipdom.at(ids[1]) == ids[4]); // branch -> join
    CHECK(t.ipdom.at(ids[2]) == ids[4]);
    CHECK(t.ipdom.at(ids[3]) == ids[4]);
    CHECK(t.ipdom.at(ids[4]) == ids[5]);
    CHECK(t.ipdom.at(ids[5]) == ids[5]); // exit is its own
}

TEST_CASE("branch arms are control-dependent on the branch") {
    ProgramIr ir = lower_text(R"(var g;
func f(c) {
    if (c) {
        g = 1;
    } else {
        g = 2;
    }
    g = 3;
}
)");
    const Cfg& f = *ir.find_cfg("f");
    auto ids = ids_of(f);
    auto deps = control_pairs(f);
    CHECK(deps.count({ids[1], ids[2]}));
    CHECK(deps.count({ids[1], ids[3]}));
    // the join runs either way, so it hangs off entry instead
    CHECK_FALSE(deps.count({ids[1], ids[4]}));
    CHECK(deps.count({ids[0], ids[4]}));
    CHECK(deps.count({ids[0], ids[1]}));
}

TEST_CASE("loop bodies and the loop head depend on the head") {
    ProgramIr ir = lower_text(R"(func f(n) {
    while (n > 0) {
        n = n - 1;
    }
    return n;
}
)");
    const Cfg& f = *ir.find_cfg("f");
    auto ids = ids_of(f); // entry, head, body, return, exit
    auto deps = control_pairs(f);
    CHECK(deps.count({ids[1], ids[2]})); // body
    CHECK(deps.count({ids[1], ids[1]})); // head re-runs while the loop spins
    CHECK_FALSE(deps.count({ids[1], ids[3]}));
}

TEST_CASE("an empty loop still depends on itself") {
    ProgramIr ir = lower_text("func f(c) { while (c) { } }\n");
    const Cfg& f = *ir.find_cfg("f");
    auto ids = ids_of(f); // entry, head, exit
    REQUIRE(ids.size() == 3);
    auto deps = control_pairs(f);
    CHECK(deps.count({ids[1], ids[1]}));
}

TEST_CASE("straight-line code is controlled by entry alone") {
    ProgramIr ir = lower_text("var g;\nfunc f() {\n    g = 1;\n    g = 2;\n}\n");
    const Cfg& f = *ir.find_cfg("f");
    auto ids = ids_of(f);
    auto deps = control_pairs(f);
    CHECK(deps == std::set<std::pair<int, int>>{{ids[0], ids[1]},
                                                {ids[0], ids[2]}});
}

TEST_CASE("post-dominators match removal reachability on random graphs") {
    std::mt19937 rng(424242);
    int checked = 0;
    for (int t = 0; t < 600; ++t) {
        oracle::TestGraph g = oracle::random_graph(rng, 8);
        Cfg cfg = oracle::graph_to_cfg(g);
        PostDominatorTree tree = post_dominators(cfg);
        auto expect = oracle::pdom_oracle(g);
        auto pdominates = [&](int p, int n) {
            for (int cur = n;; cur = tree.ipdom.at(cur)) {
                if (cur == p)
                    return true;
                if (cur == g.n - 1)
                    return false;
            }
        };
        for (int n = 0; n < g.n; ++n)
            for (int p = 0; p < g.n; ++p) {
                bool got = pdominates(p, n);
                bool want = expect[n].count(p) != 0;
                if (got != want) {
                    CAPTURE(t, n, p);
                    REQUIRE(got == want);
                }
                ++checked;
            }
    }
    CHECK(checked > 0);
}

TEST_CASE("control dependences match the branch criterion on random graphs") {
    std::mt19937 rng(57);
    for (int t = 0; t < 600; ++t) {
        oracle::TestGraph g = oracle::random_graph(rng, 8);
        Cfg cfg = oracle::graph_to_cfg(g);
        auto got_edges = control_deps(cfg, post_dominators(cfg));
        std::set<std::pair<int, int>> got;
        for (const auto& e : got_edges)
            got.insert({e.from, e.to});
        auto want = oracle::control_dep_oracle(g);
        if (got != want) {
            CAPTURE(t, g.n);
            REQUIRE(got == want);
        }
    }
    SUCCEED("600 random graphs agreed with the branch-criterion oracle");
}
