#include <catch2/catch_amalgamated.hpp>

#include "msentinel/annotate.hpp"
#include "msentinel/lower.hpp"

using namespace msentinel;

namespace {

std::vector<SourceFile> one(const std::string& path, const std::string& text) {
    return {SourceFile::from_text(path, text)};
}

} // namespace

TEST_CASE("contribution tags render all four states") {
    CHECK(ContributionTag{}.to_string() == "base");
    CHECK(ContributionTag{true, false}.to_string() == "left");
    CHECK(ContributionTag{false, true}.to_string() == "right");
    CHECK(ContributionTag{true, true}.to_string() == "both");
    CHECK(ContributionTag{}.is_base());
    CHECK_FALSE(ContributionTag{true, false}.is_base());
}

TEST_CASE("changed lines come from each parent and land in merge coordinates") {
    auto base = one("m.ml", "a\nb\nc\n");
    auto left = one("m.ml", "a\nB\nc\n");       // rewrote line 2
    auto right = one("m.ml", "a\nb\nc\nd\n");   // appended a line
    auto merge = one("m.ml", "a\nB\nc\nd\n");
    ChangedLineSets cs = compute_changed_lines(base, left, right, merge);
    CHECK(cs.left.at("m.ml") == std::set<int>{2});
    CHECK(cs.right.at("m.ml") == std::set<int>{4});
}

TEST_CASE("a parent's insertion shifts through the merge diff") {
    auto base = one("m.ml", "a\nb\n");
    auto left = one("m.ml", "x\na\nb\n");  // inserted at top
    auto right = one("m.ml", "a\nb\ny\n"); // appended
    auto merge = one("m.ml", "x\na\nb\ny\n");
    ChangedLineSets cs = compute_changed_lines(base, left, right, merge);
    CHECK(cs.left.at("m.ml") == std::set<int>{1});
    CHECK(cs.right.at("m.ml") == std::set<int>{4});
}

TEST_CASE("a parent change that does not survive the merge drops out") {
    auto base = one("m.ml", "a\nb\n");
    auto left = one("m.ml", "a\nB\n");
    auto right = one("m.ml", "a\nb\n");
    auto merge = one("m.ml", "a\nb\n"); // merge kept the base text
    ChangedLineSets cs = compute_changed_lines(base, left, right, merge);
    CHECK(cs.left.at("m.ml").empty());
    CHECK(cs.right.at("m.ml").empty());
}

TEST_CASE("deletion-only edits leave no changed lines") {
    auto base = one("m.ml", "a\nb\nc\n");
    auto left = one("m.ml", "a\nc\n");
    auto right = one("m.ml", "a\nb\n");
    auto merge = one("m.ml", "a\n");
    ChangedLineSets cs = compute_changed_lines(base, left, right, merge);
    CHECK(cs.left.at("m.ml").empty());
    CHECK(cs.right.at("m.ml").empty());
}

TEST_CASE("multi-file corpora are diffed per file") {
    std::vector<SourceFile> base{SourceFile::from_text("a.ml", "1\n"),
                                 SourceFile::from_text("b.ml", "2\n")};
    std::vector<SourceFile> left{SourceFile::from_text("a.ml", "1\n1L\n"),
                                 SourceFile::from_text("b.ml", "2\n")};
    std::vector<SourceFile> right{SourceFile::from_text("a.ml", "1\n"),
                                  SourceFile::from_text("b.ml", "2R\n")};
    std::vector<SourceFile> merge{SourceFile::from_text("a.ml", "1\n1L\n"),
                                  SourceFile::from_text("b.ml", "2R\n")};
    ChangedLineSets cs = compute_changed_lines(base, left, right, merge);
    CHECK(cs.left.at("a.ml") == std::set<int>{2});
    CHECK(cs.left.at("b.ml").empty());
    CHECK(cs.right.at("a.ml").empty());
    CHECK(cs.right.at("b.ml") == std::set<int>{1});
}

TEST_CASE("a file new in the merge is wholly attributed to its parent") {
    std::vector<SourceFile> base;
    auto left = one("n.ml", "var g;\n");
    std::vector<SourceFile> right;
    auto merge = one("n.ml", "var g;\n");
    ChangedLineSets cs = compute_changed_lines(base, left, right, merge);
    CHECK(cs.left.at("n.ml") == std::set<int>{1});
    CHECK(cs.right.at("n.ml").empty());
}

TEST_CASE("annotate tags instructions by line membership") {
    ProgramIr ir = lower_sources(one("m.ml", R"(var g;
func f() {
    g = 1;
    g = 2;
    g = 3;
}
)"));
    AnnotatedProgram ap =
        annotate(std::move(ir),
                 ChangedLineSets::single_file("m.ml", {3}, {5}));
    const Cfg& f = *ap.ir.find_cfg("f");
    CHECK(ap.tag_of(f.instructions[1].id).to_string() == "left");
    CHECK(ap.tag_of(f.instructions[2].id).to_string() == "base");
    CHECK(ap.tag_of(f.instructions[3].id).to_string() == "right");
    CHECK(ap.tag_of(f.entry_id).is_base());
    CHECK(ap.warnings.empty());
    // base instructions are not stored explicitly
    CHECK(ap.tags.size() == 2);
}

TEST_CASE("annotate keeps lowering warnings and adds its own") {
    ProgramIr ir = lower_sources(one("m.ml", "func f() { missing(); }\n"));
    REQUIRE(ir.warnings.size() == 1);
    AnnotatedProgram ap = annotate(std::move(ir),
                                   ChangedLineSets::single_file("m.ml", {}, {}));
    CHECK(ap.warnings.size() == 1);
}

TEST_CASE("annotate reports lines claimed by both parents") {
    ProgramIr ir = lower_sources(one("m.ml", "var g;\nfunc f() {\n    g = 1;\n}\n"));
    AnnotatedProgram ap =
        annotate(std::move(ir), ChangedLineSets::single_file("m.ml", {3}, {3}));
    const Cfg& f = *ap.ir.find_cfg("f");
    CHECK(ap.tag_of(f.instructions[1].id).to_string() == "both");
    REQUIRE(ap.warnings.size() == 1);
    CHECK(ap.warnings[0].find("both parents") != std::string::npos);
}

TEST_CASE("annotate reports out-of-range lines and unknown files") {
    ProgramIr ir = lower_sources(one("m.ml", "var g;\n"));
    ChangedLineSets cs;
    cs.left["m.ml"] = {99};
    cs.right["ghost.ml"] = {1};
    AnnotatedProgram ap = annotate(std::move(ir), cs);
    REQUIRE(ap.warnings.size() == 2);
    CHECK(ap.warnings[0].find("outside the file") != std::string::npos);
    CHECK(ap.warnings[1].find("unknown file") != std::string::npos);
}

TEST_CASE("annotate reports tagged lines holding several statements") {
    ProgramIr ir = lower_sources(one("m.ml", "var g;\nfunc f() { g = 1; g = 2; }\n"));
    AnnotatedProgram ap =
        annotate(std::move(ir), ChangedLineSets::single_file("m.ml", {2}, {}));
    REQUIRE(ap.warnings.size() == 1);
    CHECK(ap.warnings[0].find("several statements") != std::string::npos);
    // both statements on the line are still tagged left
    const Cfg& f = *ap.ir.find_cfg("f");
    CHECK(ap.tag_of(f.instructions[1].id).to_string() == "left");
    CHECK(ap.tag_of(f.instructions[2].id).to_string() == "left");
}
