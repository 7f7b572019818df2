#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "agentbench/model_gateway.hpp"
#include "agentbench/react_trace.hpp"
#include "agentbench/toolbox.hpp"

namespace agentbench {

enum class Category {
    G1Instruction,
    G1Category,
    G1Tool,
    G2Instruction,
    G2Category,
    G3Instruction,
};

inline constexpr std::array<Category, 6> kAllCategories = {
    Category::G1Instruction, Category::G1Category,    Category::G1Tool,
    Category::G2Instruction, Category::G2Category,    Category::G3Instruction,
};

/// "G1_instruction", "G1_category", ...
std::string_view to_string(Category category);
std::optional<Category> category_from_string(std::string_view name);

/// Query counts of the full 1,100-query suite.
std::size_t full_suite_count(Category category);

struct BenchmarkQuery {
    std::string id;
    Category category = Category::G1Instruction;
    std::string instruction;
    std::vector<std::string> relevant_tools;
    // Answer key for the rule judge: tools a passing path must have called successfully.
    std::vector<std::string> expected_tools;
};

extern const char* const kDefaultSystemPrompt;

struct AgentConfig {
    std::size_t max_iterations = 10;
    GenerationParams params;
    std::size_t parse_retry_limit = 1;
    std::string system_prompt = kDefaultSystemPrompt;
};

/// One generate call as written to the per-query trace log.
struct TraceRecord {
    std::string query_id;
    std::size_t iteration = 0;
    std::size_t prompt_chars = 0;
    std::string raw_completion;
    bool parsed = false;
    std::string action;
    std::string observation_excerpt;

    bool operator==(const TraceRecord&) const = default;
};

nlohmann::json to_json(const TraceRecord& record);

struct QueryRun {
    SolutionPath path;
    std::vector<TraceRecord> trace;
};

/// Runs the ReAct loop for one query. Never throws for model or tool misbehavior;
/// the outcome is encoded in the path status.
QueryRun run_query(const BenchmarkQuery& query, const ToolRegistry& registry,
                   CompletionBackend& backend, const AgentConfig& config);

}  // namespace agentbench
