#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "agentbench/agent_runtime.hpp"
#include "agentbench/model_gateway.hpp"
#include "agentbench/tooleval.hpp"
#include "agentbench/toolbox.hpp"

namespace agentbench {

struct CategorySpec {
    Category category = Category::G1Instruction;
    std::vector<BenchmarkQuery> queries;
};

struct BenchmarkSuite {
    std::string label;
    std::vector<CategorySpec> categories;

    std::size_t query_count() const;
    /// Queries in suite order (category order, then file order).
    std::vector<const BenchmarkQuery*> flatten() const;

    /// Throws ValidationError on structural problems. Does not check tools.
    static BenchmarkSuite from_json(const nlohmann::json& doc);
    static BenchmarkSuite load(const std::string& path);
    nlohmann::json to_json() const;
};

/// All six categories present exactly once and non-empty, unique query ids,
/// every relevant and expected tool registered. Throws ValidationError.
void validate_suite(const BenchmarkSuite& suite, const ToolRegistry& registry);

/// Published per-category rates of an external model.
struct BaselineEntry {
    std::string model;
    std::string params;
    std::map<Category, double> rates;
    bool fine_tuned = false;  // the fine-tuned model itself rather than a baseline

    /// Weighted by the full-suite query counts.
    double overall() const;
};

struct BaselineTable {
    std::vector<BaselineEntry> entries;  // sorted by overall rate, highest first

    const BaselineEntry* find(const std::string& model) const;
    static BaselineTable from_json(const nlohmann::json& doc);
    static BaselineTable load(const std::string& path);
    /// The table compiled into the library.
    static const BaselineTable& bundled();
};

std::string bundled_baselines_json();

struct BaselineRow {
    std::string model;
    std::string params;
    std::map<Category, double> rates;
    double overall = 0;
    std::int64_t gap_hundredths = 0;  // baseline - this run, both rounded to 2dp

    bool operator==(const BaselineRow&) const = default;
};

struct RunMetadata {
    std::string backend;
    std::string judge_mode;
    std::uint64_t seed = 0;
    VotePolicy votes;
    std::size_t max_iterations = 10;
    double temperature = 0.1;

    bool operator==(const RunMetadata& o) const {
        return backend == o.backend && judge_mode == o.judge_mode && seed == o.seed &&
               votes.min_rounds == o.votes.min_rounds && votes.max_rounds == o.votes.max_rounds &&
               max_iterations == o.max_iterations && temperature == o.temperature;
    }
};

struct RunReport {
    std::string label;
    std::string model;
    std::string params;
    std::vector<CategoryStats> categories;  // canonical category order
    double overall = 0;
    std::vector<BaselineRow> baselines;
    RunMetadata metadata;

    const CategoryStats* find(Category c) const;
    bool operator==(const RunReport&) const = default;
};

/// Computes the overall rate and the gap of every baseline not named `model`.
RunReport assemble_report(std::string label, std::string model, std::string params,
                          std::vector<CategoryStats> categories, const BaselineTable& baselines,
                          RunMetadata metadata);

/// Category counts implied by a baseline's published rates on the full suite,
/// with gaps against `others` (the entry itself is skipped).
RunReport report_from_baseline(const BaselineEntry& entry, const BaselineTable& others = {});

using BackendFactory = std::function<std::shared_ptr<CompletionBackend>(const BenchmarkQuery&)>;

struct RunOptions {
    AgentConfig agent;
    VotePolicy votes;
    std::size_t workers = 4;
    std::uint64_t seed = 0;
    std::string model = "agent-under-test";
    std::string params;
    std::string backend_identity;
    BaselineTable baselines = BaselineTable::bundled();
    std::optional<std::filesystem::path> out_dir;
};

struct RunResult {
    RunReport report;
    std::vector<SolutionPath> paths;  // suite order
    std::vector<Verdict> verdicts;    // suite order
    std::vector<TraceRecord> trace;   // suite order, per-query blocks
};

/// Per-query seed derived from the run seed, independent of scheduling.
std::uint64_t derive_query_seed(std::uint64_t run_seed, std::string_view query_id);

/// Executes every query once across `workers` threads, judges each path and
/// assembles the report. When out_dir is set, writes report.json, paths.jsonl,
/// traces.jsonl, verdicts.jsonl and run_manifest.json before returning.
/// Throws ValidationError for an invalid suite (before running anything) and
/// IoError when logs cannot be written.
RunResult run_suite(const BenchmarkSuite& suite, const ToolRegistry& registry,
                    const BackendFactory& backends, PassJudge& judge, const RunOptions& options);

struct ComparisonResult {
    WinRateComparison summary;
    std::vector<nlohmann::json> log;
};

/// Head-to-head comparison of two runs over the same suite. With a backend the
/// model judge is used, otherwise the rule comparison.
ComparisonResult compare_runs(const BenchmarkSuite& suite, const std::string& model_a,
                              const std::vector<SolutionPath>& paths_a, const std::string& model_b,
                              const std::vector<SolutionPath>& paths_b,
                              CompletionBackend* judge_backend, std::uint64_t seed);

}  // namespace agentbench
