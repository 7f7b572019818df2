#include "agentbench/react_trace.hpp"

#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

namespace agentbench {
namespace {

constexpr std::string_view kThought = "Thought:";
constexpr std::string_view kAction = "Action:";
constexpr std::string_view kActionInput = "Action Input:";
constexpr std::string_view kObservation = "Observation:";
constexpr std::array<std::string_view, 4> kLabels = {kThought, kAction, kActionInput,
                                                     kObservation};

constexpr auto npos = std::string_view::npos;

bool label_at(std::string_view text, std::size_t pos, std::string_view label) {
    return (pos == 0 || text[pos - 1] == '\n') && text.substr(pos).starts_with(label);
}

// First line-start occurrence of `label` at or after `from`.
std::size_t find_label(std::string_view text, std::string_view label, std::size_t from) {
    std::size_t pos = from;
    while (pos < text.size()) {
        if (label_at(text, pos, label)) return pos;
        auto nl = text.find('\n', pos);
        if (nl == npos) return npos;
        pos = nl + 1;
    }
    return npos;
}

// Body of a section that starts right after a label and ends at `end` (a label
// position or npos for end of text).
std::string section(std::string_view text, std::size_t begin, std::size_t end) {
    auto body = text.substr(begin, end == npos ? npos : end - begin);
    if (body.starts_with(' ')) body.remove_prefix(1);
    if (end != npos && body.ends_with('\n')) body.remove_suffix(1);
    return std::string(body);
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view to_string(StepParseErrorKind kind) {
    switch (kind) {
        case StepParseErrorKind::MissingAction: return "MissingAction";
        case StepParseErrorKind::MissingActionInput: return "MissingActionInput";
        case StepParseErrorKind::InvalidAction: return "InvalidAction";
    }
    return "Unknown";
}

Expected<ReActStep, StepParseError> parse_step(std::string_view text) {
    const auto action_pos = find_label(text, kAction, 0);
    if (action_pos == npos) {
        return unexpected(StepParseError{StepParseErrorKind::MissingAction,
                                         "no line starting with \"Action:\""});
    }

    ReActStep step;
    const auto thought_pos = find_label(text, kThought, 0);
    if (thought_pos != npos && thought_pos < action_pos) {
        step.thought = section(text, thought_pos + kThought.size(), action_pos);
    }

    const auto action_begin = action_pos + kAction.size();
    const auto action_eol = text.find('\n', action_begin);
    const auto token = trim(text.substr(
        action_begin, action_eol == npos ? npos : action_eol - action_begin));
    if (token.empty()) {
        return unexpected(
            StepParseError{StepParseErrorKind::InvalidAction, "empty Action token"});
    }
    if (std::any_of(token.begin(), token.end(), is_space)) {
        return unexpected(StepParseError{StepParseErrorKind::InvalidAction,
                                         "Action token contains whitespace: " +
                                             std::string(token)});
    }
    step.action = std::string(token);

    const auto after_action = action_eol == npos ? text.size() : action_eol + 1;
    const auto input_pos = find_label(text, kActionInput, after_action);
    const auto next_thought = find_label(text, kThought, after_action);
    if (input_pos == npos || (next_thought != npos && next_thought < input_pos)) {
        return unexpected(StepParseError{StepParseErrorKind::MissingActionInput,
                                         "no \"Action Input:\" line after Action " +
                                             step.action});
    }

    const auto input_begin = input_pos + kActionInput.size();
    const auto obs_pos = find_label(text, kObservation, input_begin);
    const auto thought_after = find_label(text, kThought, input_begin);
    const auto input_end = std::min(obs_pos, thought_after);
    step.action_input = section(text, input_begin, input_end);

    if (obs_pos != npos && obs_pos == input_end) {
        const auto obs_begin = obs_pos + kObservation.size();
        step.observation = section(text, obs_begin, find_label(text, kThought, obs_begin));
    }
    return step;
}

std::string render_step(const ReActStep& step) {
    std::string out;
    out.reserve(step.thought.size() + step.action.size() + step.action_input.size() + 40);
    out += "Thought: ";
    out += step.thought;
    out += "\nAction: ";
    out += step.action;
    out += "\nAction Input: ";
    out += step.action_input;
    if (step.observation) {
        out += "\nObservation: ";
        out += *step.observation;
    }
    return out;
}

std::string render_trace(const std::vector<ReActStep>& steps) {
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i) out += '\n';
        out += render_step(steps[i]);
    }
    return out;
}

Expected<std::vector<ReActStep>, TraceParseError> parse_trace(std::string_view text) {
    std::vector<ReActStep> steps;
    if (trim(text).empty()) return steps;

    std::vector<std::size_t> starts{0};
    bool seen_thought = false;
    bool seen_action = false;
    for (std::size_t pos = 0; pos < text.size();) {
        if (label_at(text, pos, kThought)) {
            if ((seen_thought || seen_action) && pos > starts.back()) {
                starts.push_back(pos);
                seen_action = false;
            }
            seen_thought = true;
        } else if (label_at(text, pos, kAction)) {
            if (seen_action && pos > starts.back()) {
                starts.push_back(pos);
                seen_thought = false;
            }
            seen_action = true;
        }
        auto nl = text.find('\n', pos);
        if (nl == npos) break;
        pos = nl + 1;
    }

    for (std::size_t i = 0; i < starts.size(); ++i) {
        const bool last = i + 1 == starts.size();
        auto segment = text.substr(starts[i], last ? npos : starts[i + 1] - starts[i]);
        if (!last && segment.ends_with('\n')) segment.remove_suffix(1);
        auto step = parse_step(segment);
        if (!step) return unexpected(TraceParseError{i, step.error()});
        steps.push_back(std::move(*step));
    }
    return steps;
}

bool is_label_free(std::string_view text) {
    for (std::size_t pos = 0; pos <= text.size();) {
        for (auto label : kLabels) {
            if (text.substr(pos).starts_with(label)) return false;
        }
        auto nl = text.find('\n', pos);
        if (nl == npos) break;
        pos = nl + 1;
    }
    return true;
}

bool is_well_formed(const ReActStep& step) {
    if (step.action.empty() || std::any_of(step.action.begin(), step.action.end(), is_space)) {
        return false;
    }
    return is_label_free(step.thought) && is_label_free(step.action_input) &&
           (!step.observation || is_label_free(*step.observation));
}

Expected<FinishPayload, std::string> parse_finish(std::string_view action_input) {
    auto doc = nlohmann::json::parse(action_input, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        return unexpected(std::string("Finish input is not a JSON object"));
    }
    auto rt = doc.find("return_type");
    if (rt == doc.end() || !rt->is_string()) {
        return unexpected(std::string("Finish input lacks a string return_type"));
    }
    FinishPayload payload;
    const auto& name = rt->get_ref<const std::string&>();
    if (name == "give_answer") {
        payload.return_type = ReturnType::GiveAnswer;
    } else if (name == "give_up_and_restart") {
        payload.return_type = ReturnType::GiveUpAndRestart;
    } else {
        return unexpected("unknown return_type: " + name);
    }
    if (auto fa = doc.find("final_answer"); fa != doc.end() && !fa->is_null()) {
        if (!fa->is_string()) return unexpected(std::string("final_answer must be a string"));
        payload.final_answer = fa->get<std::string>();
    }
    return payload;
}

std::string make_finish_input(ReturnType type, const std::optional<std::string>& answer) {
    nlohmann::ordered_json doc;
    doc["return_type"] = type == ReturnType::GiveAnswer ? "give_answer" : "give_up_and_restart";
    if (answer) doc["final_answer"] = *answer;
    return doc.dump();
}

std::string_view to_string(PathStatus status) {
    switch (status) {
        case PathStatus::FinishedWithAnswer: return "FinishedWithAnswer";
        case PathStatus::GaveUp: return "GaveUp";
        case PathStatus::BudgetExhausted: return "BudgetExhausted";
        case PathStatus::ParseFailure: return "ParseFailure";
    }
    return "Unknown";
}

std::optional<PathStatus> path_status_from_string(std::string_view name) {
    for (auto s : {PathStatus::FinishedWithAnswer, PathStatus::GaveUp,
                   PathStatus::BudgetExhausted, PathStatus::ParseFailure}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

}  // namespace agentbench
