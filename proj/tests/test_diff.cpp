#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "msentinel/diff.hpp"
#include "oracles.hpp"

using namespace msentinel;

namespace {

EditOp keep(int o, int n, std::string t) {
    return {EditOp::Kind::Keep, o, n, std::move(t)};
}
EditOp ins(int n, std::string t) {
    return {EditOp::Kind::Insert, 0, n, std::move(t)};
}
EditOp del(int o, std::string t) {
    return {EditOp::Kind::Delete, o, 0, std::move(t)};
}

} // namespace

TEST_CASE("line_diff handles trivial inputs") {
    CHECK(line_diff({}, {}).empty());
    CHECK(line_diff({"a", "b"}, {"a", "b"}) ==
          EditScript{keep(1, 1, "a"), keep(2, 2, "b")});
    CHECK(line_diff({}, {"a", "b"}) == EditScript{ins(1, "a"), ins(2, "b")});
    CHECK(line_diff({"a", "b"}, {}) == EditScript{del(1, "a"), del(2, "b")});
}

TEST_CASE("line_diff produces the expected scripts for known cases") {
    CHECK(line_diff({"a", "b", "c"}, {"c", "b", "a"}) ==
          EditScript{ins(1, "c"), ins(2, "b"), keep(1, 3, "a"), del(2, "b"),
                     del(3, "c")});
    CHECK(line_diff({"a", "b"}, {"a", "x", "b"}) ==
          EditScript{keep(1, 1, "a"), ins(2, "x"), keep(2, 3, "b")});
    // on a tie the insert comes before the delete
    CHECK(line_diff({"x"}, {"y"}) == EditScript{ins(1, "y"), del(1, "x")});
}

TEST_CASE("changed_lines collects inserted positions only") {
    EditScript s = line_diff({"a", "b", "c"}, {"a", "x", "c", "y"});
    CHECK(changed_lines(s) == std::set<int>{2, 4});
    // pure deletions leave nothing behind
    CHECK(changed_lines(line_diff({"a", "b"}, {"a"})).empty());
}

TEST_CASE("keep_mapping pairs surviving lines") {
    EditScript s = line_diff({"a", "b", "c"}, {"b", "c", "d"});
    CHECK(keep_mapping(s) == std::map<int, int>{{2, 1}, {3, 2}});
}

TEST_CASE("apply_edit_script validates scripts strictly") {
    std::vector<std::string> old{"a", "b"};
    EditScript good = line_diff(old, {"a", "c"});
    CHECK(apply_edit_script(old, good) == std::vector<std::string>{"a", "c"});

    EditScript wrong_text{keep(1, 1, "zzz"), keep(2, 2, "b")};
    CHECK_THROWS_AS(apply_edit_script(old, wrong_text), std::invalid_argument);
    EditScript skips_old{keep(1, 1, "a")};
    CHECK_THROWS_AS(apply_edit_script(old, skips_old), std::invalid_argument);
    EditScript bad_insert{keep(1, 1, "a"), keep(2, 2, "b"), ins(9, "x")};
    CHECK_THROWS_AS(apply_edit_script(old, bad_insert), std::invalid_argument);
}

TEST_CASE("line_diff round-trips on random pairs") {
    std::mt19937 rng(20260814);
    for (int t = 0; t < 1200; ++t) {
        std::vector<std::string> a = oracle::random_lines(rng, 30, 4);
        std::vector<std::string> b = oracle::random_lines(rng, 30, 4);
        EditScript s = line_diff(a, b);
        REQUIRE(apply_edit_script(a, s) == b);
    }
}

TEST_CASE("line_diff keeps a longest common subsequence") {
    std::mt19937 rng(7);
    for (int t = 0; t < 600; ++t) {
        std::vector<std::string> a = oracle::random_lines(rng, 8, 3);
        std::vector<std::string> b = oracle::random_lines(rng, 8, 3);
        EditScript s = line_diff(a, b);
        REQUIRE(oracle::keep_count(s) == oracle::lcs_exhaustive(a, b));
    }
}

TEST_CASE("edit scripts are deterministic") {
    std::vector<std::string> a{"m", "n", "m", "o"};
    std::vector<std::string> b{"o", "m", "n"};
    EditScript first = line_diff(a, b);
    for (int i = 0; i < 5; ++i)
        CHECK(line_diff(a, b) == first);
}
