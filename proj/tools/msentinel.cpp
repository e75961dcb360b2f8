#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "msentinel/msentinel.hpp"

namespace {

using namespace msentinel;

AnalysisConfig make_config(int depth, const std::string& analyses, bool lazy) {
    AnalysisConfig config;
    config.depth_limit = depth;
    config.lazy = lazy;
    if (!analyses.empty()) {
        config.enabled.clear();
        std::stringstream ss(analyses);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::optional<AnalysisKind> kind = parse_analysis_kind(item);
            if (!kind)
                throw InputError("unknown analysis '" + item + "'");
            config.enabled.insert(*kind);
        }
        if (config.enabled.empty())
            throw InputError("--analyses selects nothing");
    }
    return config;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path);
    out << text;
}

void dump_vfg(const AnnotatedProgram& program, const CallableId& entry,
              const AnalysisConfig& config, const std::string& path) {
    CallGraph cg = build_call_graph(program.ir, entry, config.depth_limit);
    Vfg g = build_vfg(program, cg);
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : g.nodes) {
        nlohmann::ordered_json nj;
        nj["id"] = n.id;
        nj["instr"] = n.instr;
        nj["role"] = n.role == VfgRole::Def ? "def" : "use";
        nj["element"] = n.element.to_string();
        nj["tags"] = n.tag.to_string();
        j["nodes"].push_back(std::move(nj));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({{"from", e.from},
                              {"to", e.to},
                              {"kind", vfg_edge_kind_name(e.kind)}});
    write_file(path, j.dump(2) + "\n");
}

void dump_pdg(const AnnotatedProgram& program, const CallableId& callable,
              const std::string& path) {
    const Cfg* cfg = program.ir.find_cfg(callable);
    if (!cfg)
        throw InputError("unknown callable '" + callable + "'");
    Pdg pdg = build_pdg(*cfg);
    nlohmann::ordered_json j;
    j["callable"] = callable;
    j["nodes"] = nlohmann::ordered_json::array();
    for (int id : pdg.nodes) {
        const Instruction& instr = cfg->instr(id);
        j["nodes"].push_back({{"id", id},
                              {"kind", instruction_kind_name(instr.kind)},
                              {"line", instr.line}});
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : pdg.edges) {
        nlohmann::ordered_json ej;
        ej["from"] = e.from;
        ej["to"] = e.to;
        ej["kind"] = e.kind == PdgEdge::Kind::Control ? "control" : "data";
        if (e.element)
            ej["element"] = e.element->to_string();
        j["edges"].push_back(std::move(ej));
    }
    write_file(path, j.dump(2) + "\n");
}

int run_analyze(const std::string& dir, const std::string& entry_override,
                int depth, const std::string& analyses, bool lazy,
                const std::string& format, const std::string& vfg_path,
                const std::vector<std::string>& pdg_args) {
    AnalysisConfig config = make_config(depth, analyses, lazy);
    MergeScenario scn = load_scenario(dir);
    if (!entry_override.empty())
        scn.entry = entry_override;
    AnnotatedProgram program = prepare_scenario(scn);
    InterferenceReport report = run_all(program, scn.entry, config, scn.id);
    if (!vfg_path.empty())
        dump_vfg(program, scn.entry, config, vfg_path);
    if (!pdg_args.empty())
        dump_pdg(program, pdg_args[0], pdg_args[1]);
    OutputFormat fmt =
        format == "json" ? OutputFormat::Json : OutputFormat::Text;
    std::cout << serialize_report(report, fmt);
    return report.combined ? 2 : 0;
}

int run_eval(const std::string& corpus, int depth, int repetitions, int jobs,
             const std::string& out_path) {
    AnalysisConfig config;
    config.depth_limit = depth;
    CorpusEvaluation eval =
        evaluate_corpus(corpus, config, repetitions, jobs);
    std::cout << format_corpus_text(eval);
    if (!out_path.empty())
        write_file(out_path, corpus_json(eval).dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic interference detector for three-way merges"};
    app.require_subcommand(1);

    std::string dir, entry, analyses, format = "text", vfg_path;
    std::vector<std::string> pdg_args;
    int depth = 5;
    bool lazy = false;
    CLI::App* analyze = app.add_subcommand("analyze", "analyze one scenario");
    analyze->add_option("dir", dir, "scenario directory")->required();
    analyze->add_option("--entry", entry, "entry callable, overrides manifest");
    analyze->add_option("--depth", depth, "call graph depth limit");
    analyze->add_option("--analyses", analyses,
                        "comma list out of df,cf,oa,pdg");
    analyze->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    analyze->add_flag("--lazy", lazy, "stop after the first interference");
    analyze->add_option("--dump-vfg", vfg_path, "write the value flow graph");
    analyze->add_option("--dump-pdg", pdg_args,
                        "callable and output path for its dependence graph")
        ->expected(2);

    std::string corpus, out_path;
    int repetitions = 1, jobs = 1;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a scenario corpus");
    eval->add_option("corpus", corpus, "corpus directory")->required();
    eval->add_option("--depth", depth, "call graph depth limit");
    eval->add_option("--repetitions", repetitions, "runs per scenario");
    eval->add_option("--jobs", jobs, "parallel scenario workers");
    eval->add_option("--out", out_path, "write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // keep --help at 0, any usage error is 1
    }
    try {
        if (analyze->parsed())
            return run_analyze(dir, entry, depth, analyses, lazy, format,
                               vfg_path, pdg_args);
        return run_eval(corpus, depth, repetitions, jobs, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
