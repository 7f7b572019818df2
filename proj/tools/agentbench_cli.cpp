// agentbench: transform conversations, run benchmark suites, render reports.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "agentbench/agent_runtime.hpp"
#include "agentbench/bench_runner.hpp"
#include "agentbench/dataset_forge.hpp"
#include "agentbench/errors.hpp"
#include "agentbench/model_gateway.hpp"
#include "agentbench/report.hpp"
#include "agentbench/tooleval.hpp"
#include "agentbench/toolbox.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace agentbench;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    auto doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ValidationError(path + " is not valid JSON");
    return doc;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out.flush()) throw IoError("write failed for " + path);
}

struct TransformArgs {
    std::string in, out, delimiters, config_out;
    std::size_t max_seq_len = 8192;
};

int cmd_transform(const TransformArgs& a) {
    CorpusOptions options;
    options.max_seq_len = a.max_seq_len;
    if (!a.delimiters.empty()) options.delimiters = DelimiterMap::from_json(read_json(a.delimiters));

    std::ifstream in(a.in);
    if (!in) throw IoError("cannot open " + a.in);
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + a.out);

    const auto summary = transform_corpus(in, out, options);
    out.flush();
    if (!out) throw IoError("write failed for " + a.out);

    for (const auto& s : summary.skip_log) {
        std::cerr << "skipped line " << s.line << ": " << s.reason << '\n';
    }
    std::cerr << "records " << summary.records_read << ", examples " << summary.examples_written
              << ", skipped " << summary.skipped << ", over max_seq_len " << summary.over_length
              << '\n';

    if (!a.config_out.empty()) {
        TrainingConfig config;
        config.max_seq_len = a.max_seq_len;
        write_file(a.config_out, to_json(config).dump(2) + "\n");
        auto steps = compute_training_steps(summary.examples_written, config.effective_batch,
                                            config.epochs);
        std::cerr << "optimizer steps at effective batch " << config.effective_batch << ": "
                  << (steps ? *steps : 0) << '\n';
    }
    return 0;
}

struct RunArgs {
    std::string suite, registry, backend, judge = "rule", out, model = "agent-under-test", params,
                                              baselines;
    std::size_t workers = 4;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 10;
    std::size_t vote_min = 5;
    std::size_t vote_max = 7;
    double temperature = 0.1;
};

int cmd_run(const RunArgs& a) {
    const auto suite = BenchmarkSuite::load(a.suite);
    const auto registry = ToolRegistry::load(a.registry);

    RunOptions options;
    options.workers = a.workers;
    options.seed = a.seed;
    options.model = a.model;
    options.params = a.params;
    options.agent.max_iterations = a.max_iterations;
    options.agent.params.temperature = a.temperature;
    options.votes = {a.vote_min, a.vote_max};
    options.out_dir = fs::path(a.out);
    if (!a.baselines.empty()) options.baselines = BaselineTable::load(a.baselines);
    if (a.vote_min == 0 || a.vote_max < a.vote_min) {
        throw ValidationError("vote rounds need 1 <= --vote-min <= --vote-max");
    }

    BackendFactory backends;
    if (a.backend.starts_with("replay:")) {
        auto library = std::make_shared<ReplayLibrary>(ReplayLibrary::load(a.backend.substr(7)));
        options.backend_identity = "replay:" + fs::path(a.backend.substr(7)).filename().string();
        backends = [library](const BenchmarkQuery& q) -> std::shared_ptr<CompletionBackend> {
            return library->backend_for(q.id);
        };
    } else {
        auto http = std::make_shared<HttpCompletionBackend>(HttpBackendOptions{a.backend});
        options.backend_identity = a.backend;
        backends = [http](const BenchmarkQuery&) -> std::shared_ptr<CompletionBackend> { return http; };
    }

    std::unique_ptr<HttpCompletionBackend> judge_backend;
    std::unique_ptr<PassJudge> judge;
    if (a.judge == "rule") {
        judge = std::make_unique<RuleJudge>();
    } else {
        judge_backend = std::make_unique<HttpCompletionBackend>(HttpBackendOptions{a.judge});
        judge = std::make_unique<ModelJudge>(*judge_backend);
    }

    const auto result = run_suite(suite, registry, backends, *judge, options);
    std::cout << "overall pass rate " << format_2dp(result.report.overall) << "% over "
              << result.paths.size() << " queries; logs in " << a.out << '\n';
    return 0;
}

RunReport load_run_report(const std::string& dir) {
    return report_from_json(read_json((fs::path(dir) / "report.json").string()));
}

int cmd_report(const std::string& run_dir, const std::string& format_name) {
    auto format = report_format_from_string(format_name);
    if (!format) throw ValidationError("unknown report format " + format_name);
    std::cout << emit_report(load_run_report(run_dir), *format);
    return 0;
}

int cmd_radar(const std::vector<std::string>& runs, const std::string& out, bool with_baselines) {
    std::vector<RunReport> reports;
    for (const auto& dir : runs) reports.push_back(load_run_report(dir));
    if (with_baselines) {
        for (const auto& e : BaselineTable::bundled().entries) reports.push_back(report_from_baseline(e));
    }
    write_file(out, emit_radar_data(reports));
    return 0;
}

struct CompareArgs {
    std::string suite, run_a, run_b, judge = "rule", out;
    std::uint64_t seed = 0;
};

int cmd_compare(const CompareArgs& a) {
    const auto suite = BenchmarkSuite::load(a.suite);
    const auto report_a = load_run_report(a.run_a);
    const auto report_b = load_run_report(a.run_b);
    const auto paths_a = load_paths((fs::path(a.run_a) / "paths.jsonl").string());
    const auto paths_b = load_paths((fs::path(a.run_b) / "paths.jsonl").string());

    std::unique_ptr<HttpCompletionBackend> judge_backend;
    if (a.judge != "rule") {
        judge_backend = std::make_unique<HttpCompletionBackend>(HttpBackendOptions{a.judge});
    }
    const auto result = compare_runs(suite, report_a.model, paths_a, report_b.model, paths_b,
                                     judge_backend.get(), a.seed);
    if (!a.out.empty()) {
        std::string lines;
        for (const auto& row : result.log) lines += row.dump() + "\n";
        write_file(a.out, lines);
    }
    const auto& s = result.summary;
    std::cout << s.model_a << " vs " << s.model_b << ": wins " << s.wins_a << ", losses "
              << s.wins_b << ", ties " << s.ties << ", win rate " << format_2dp(s.win_rate_a)
              << "%\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tool-use agent runtime and pass-rate benchmark harness"};
    app.require_subcommand(1);

    TransformArgs transform;
    auto* t = app.add_subcommand("transform", "Convert conversation JSONL to training JSONL");
    t->add_option("--in", transform.in, "Input conversations (JSON lines)")->required();
    t->add_option("--out", transform.out, "Output examples (JSON lines)")->required();
    t->add_option("--delimiters", transform.delimiters, "Role tag map (JSON)");
    t->add_option("--config-out", transform.config_out, "Also write the training config JSON here");
    t->add_option("--max-seq-len", transform.max_seq_len, "Length flag threshold in tokens");

    RunArgs run;
    auto* r = app.add_subcommand("run", "Run a benchmark suite");
    r->add_option("--suite", run.suite, "Suite JSON")->required();
    r->add_option("--registry", run.registry, "Tool registry JSON")->required();
    r->add_option("--backend", run.backend, "Model endpoint URL or replay:<file>")->required();
    r->add_option("--judge", run.judge, "rule, or a judge model endpoint URL");
    r->add_option("--workers", run.workers, "Concurrent queries")->check(CLI::PositiveNumber);
    r->add_option("--seed", run.seed, "Run seed");
    r->add_option("--out", run.out, "Output directory")->required();
    r->add_option("--model", run.model, "Model name used in the report");
    r->add_option("--params", run.params, "Parameter count label, e.g. 350M");
    r->add_option("--baselines", run.baselines, "Baseline table JSON (default: bundled)");
    r->add_option("--max-iterations", run.max_iterations, "Reasoning iterations per query")
        ->check(CLI::PositiveNumber);
    r->add_option("--vote-min", run.vote_min, "Minimum judge rounds");
    r->add_option("--vote-max", run.vote_max, "Maximum judge rounds on ties");
    r->add_option("--temperature", run.temperature, "Sampling temperature");

    std::string report_dir, report_format = "md";
    auto* rep = app.add_subcommand("report", "Render a run report");
    rep->add_option("--run", report_dir, "Run directory")->required();
    rep->add_option("--format", report_format, "md, csv or json");

    std::vector<std::string> radar_runs;
    std::string radar_out;
    bool radar_baselines = false;
    auto* rad = app.add_subcommand("radar", "Per-category rates for radar plots (CSV)");
    rad->add_option("--runs", radar_runs, "Run directories");
    rad->add_option("--out", radar_out, "Output CSV")->required();
    rad->add_flag("--with-baselines", radar_baselines, "Append the bundled baseline models");

    CompareArgs compare;
    auto* cmp = app.add_subcommand("compare", "Head-to-head win rate of two runs");
    cmp->add_option("--suite", compare.suite, "Suite JSON")->required();
    cmp->add_option("--run-a", compare.run_a, "First run directory")->required();
    cmp->add_option("--run-b", compare.run_b, "Second run directory")->required();
    cmp->add_option("--judge", compare.judge, "rule, or a judge model endpoint URL");
    cmp->add_option("--seed", compare.seed, "Seed for presentation order");
    cmp->add_option("--out", compare.out, "Comparison log (JSON lines)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*t) return cmd_transform(transform);
        if (*r) return cmd_run(run);
        if (*rep) return cmd_report(report_dir, report_format);
        if (*rad) {
            if (radar_runs.empty() && !radar_baselines) {
                throw ValidationError("radar needs --runs or --with-baselines");
            }
            return cmd_radar(radar_runs, radar_out, radar_baselines);
        }
        if (*cmp) return cmd_compare(compare);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
