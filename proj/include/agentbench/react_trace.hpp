#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentbench/expected.hpp"

namespace agentbench {

/// Reserved terminal action name.
inline constexpr std::string_view kFinishAction = "Finish";

/// One Thought / Action / Action Input turn, plus the tool response once dispatched.
struct ReActStep {
    std::string thought;
    std::string action;
    std::string action_input;
    std::optional<std::string> observation;

    bool is_finish() const { return action == kFinishAction; }
    bool operator==(const ReActStep&) const = default;
};

enum class StepParseErrorKind {
    MissingAction,
    MissingActionInput,
    InvalidAction,  // empty token or token containing whitespace
};

struct StepParseError {
    StepParseErrorKind kind;
    std::string message;
};

struct TraceParseError {
    std::size_t step_index;
    StepParseError error;
};

std::string_view to_string(StepParseErrorKind kind);

// Grammar: labels must start a line and are case-sensitive. After a label one
// optional space is dropped; the line break before the next label is not part
// of the preceding section. Thought is optional. Action Input runs until the
// next "Observation:" or "Thought:" label, or the end of text.
Expected<ReActStep, StepParseError> parse_step(std::string_view text);

// "Thought: {thought}\nAction: {action}\nAction Input: {input}" and, when the
// step carries one, "\nObservation: {observation}".
std::string render_step(const ReActStep& step);

// Rendered steps joined by single newlines.
std::string render_trace(const std::vector<ReActStep>& steps);

Expected<std::vector<ReActStep>, TraceParseError> parse_trace(std::string_view text);

/// True when no line of `text` begins with one of the reserved labels, i.e. the
/// text can sit inside a section without changing how a trace parses.
bool is_label_free(std::string_view text);

/// A step that parse_step(render_step(step)) reproduces exactly.
bool is_well_formed(const ReActStep& step);

enum class ReturnType { GiveAnswer, GiveUpAndRestart };

struct FinishPayload {
    ReturnType return_type;
    std::optional<std::string> final_answer;
};

/// Decodes the Action Input of a Finish step:
/// {"return_type": "give_answer"|"give_up_and_restart", "final_answer": optional string}.
Expected<FinishPayload, std::string> parse_finish(std::string_view action_input);

std::string make_finish_input(ReturnType type, const std::optional<std::string>& answer);

enum class PathStatus { FinishedWithAnswer, GaveUp, BudgetExhausted, ParseFailure };

std::string_view to_string(PathStatus status);
std::optional<PathStatus> path_status_from_string(std::string_view name);

/// Full trajectory for one query.
struct SolutionPath {
    std::string query_id;
    std::vector<ReActStep> steps;
    PathStatus status = PathStatus::ParseFailure;
    std::optional<std::string> final_answer;
    std::size_t api_calls_used = 0;
    // Actions whose dispatch returned an Ok observation, in call order.
    std::vector<std::string> successful_actions;
    // Why the loop stopped when it was not a Finish step (backend error, parse failure...).
    std::string termination_note;

    bool operator==(const SolutionPath&) const = default;
};

}  // namespace agentbench
