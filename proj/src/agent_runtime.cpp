#include "agentbench/agent_runtime.hpp"

#include <nlohmann/json.hpp>

#include "http_util.hpp"

namespace agentbench {

namespace {

// Trace-log observation excerpt, ellipsis included.
constexpr std::size_t kExcerptBytes = 200 - 3;

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
}

// The prompt ends with the "Thought:" cue, so a model usually continues
// without repeating the label. Scripted completions often carry it anyway.
std::string with_thought_cue(std::string_view completion) {
    if (completion.starts_with("Thought:") || completion.starts_with("Action:")) {
        return std::string(completion);
    }
    return "Thought:" + std::string(completion);
}

struct ParsedTurn {
    ReActStep step;
    std::optional<FinishPayload> finish;
};

std::optional<ParsedTurn> parse_turn(std::string_view completion) {
    auto step = parse_step(with_thought_cue(completion));
    if (!step) return std::nullopt;
    ParsedTurn turn{std::move(*step), std::nullopt};
    // The model does not get to supply its own observation.
    turn.step.observation.reset();
    if (turn.step.is_finish()) {
        auto payload = parse_finish(turn.step.action_input);
        if (!payload) return std::nullopt;
        turn.finish = std::move(*payload);
    }
    return turn;
}

}  // namespace

const char* const kDefaultSystemPrompt =
    "You are a tool-using assistant. Solve the query step by step. For every step write "
    "a \"Thought: \" line with your reasoning, an \"Action: \" line naming exactly one tool, "
    "and an \"Action Input: \" line holding the JSON arguments. When you are done, use the "
    "action Finish with input {\"return_type\": \"give_answer\", \"final_answer\": \"...\"}, "
    "or {\"return_type\": \"give_up_and_restart\"} if the query cannot be solved.";

std::string_view to_string(Category category) {
    switch (category) {
        case Category::G1Instruction: return "G1_instruction";
        case Category::G1Category: return "G1_category";
        case Category::G1Tool: return "G1_tool";
        case Category::G2Instruction: return "G2_instruction";
        case Category::G2Category: return "G2_category";
        case Category::G3Instruction: return "G3_instruction";
    }
    return "unknown";
}

std::optional<Category> category_from_string(std::string_view name) {
    for (auto c : kAllCategories) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

std::size_t full_suite_count(Category category) {
    return category == Category::G3Instruction ? 100 : 200;
}

nlohmann::json to_json(const TraceRecord& r) {
    return {{"query_id", r.query_id},
            {"iteration", r.iteration},
            {"prompt_chars", r.prompt_chars},
            {"raw_completion", r.raw_completion},
            {"parsed", r.parsed},
            {"action", r.action},
            {"observation_excerpt", r.observation_excerpt}};
}

QueryRun run_query(const BenchmarkQuery& query, const ToolRegistry& registry,
                   CompletionBackend& backend, const AgentConfig& config) {
    QueryRun run;
    auto& path = run.path;
    path.query_id = query.id;
    const auto tools = registry.summaries(query.relevant_tools);

    for (std::size_t iteration = 0; iteration < config.max_iterations; ++iteration) {
        const auto prompt = build_prompt(config.system_prompt, query.instruction, path.steps, tools);

        std::optional<ParsedTurn> turn;
        for (std::size_t attempt = 0; attempt <= config.parse_retry_limit && !turn; ++attempt) {
            auto completion = backend.generate(prompt, config.params);
            if (!completion || completion->finish_reason == FinishReason::BackendError) {
                path.status = PathStatus::BudgetExhausted;
                path.termination_note =
                    completion ? "backend_error from " + backend.identity()
                               : std::string(to_string(completion.error().kind)) + ": " +
                                     completion.error().message;
                return run;
            }
            turn = parse_turn(completion->text);

            TraceRecord record;
            record.query_id = query.id;
            record.iteration = iteration;
            record.prompt_chars = utf8_length(prompt);
            record.raw_completion = completion->text;
            record.parsed = turn.has_value();
            if (turn) record.action = turn->step.action;
            run.trace.push_back(std::move(record));
        }

        if (!turn) {
            path.status = path.steps.empty() ? PathStatus::ParseFailure : PathStatus::BudgetExhausted;
            path.termination_note = "unparseable completion after " +
                                    std::to_string(config.parse_retry_limit) + " retries";
            return run;
        }

        if (turn->finish) {
            path.steps.push_back(std::move(turn->step));
            if (turn->finish->return_type == ReturnType::GiveAnswer) {
                path.status = PathStatus::FinishedWithAnswer;
                path.final_answer = turn->finish->final_answer.value_or("");
            } else {
                path.status = PathStatus::GaveUp;
            }
            return run;
        }

        auto observation = dispatch(registry, turn->step, config.max_iterations - path.api_calls_used);
        ++path.api_calls_used;
        if (observation.ok()) path.successful_actions.push_back(turn->step.action);
        turn->step.observation = observation.observation_text();
        run.trace.back().observation_excerpt = detail::excerpt(*turn->step.observation, kExcerptBytes);
        path.steps.push_back(std::move(turn->step));
    }

    path.status = PathStatus::BudgetExhausted;
    path.termination_note = "reached " + std::to_string(config.max_iterations) + " iterations";
    return run;
}

}  // namespace agentbench
