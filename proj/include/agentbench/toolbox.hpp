#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentbench/expected.hpp"
#include "agentbench/react_trace.hpp"

namespace agentbench {

enum class ParamKind { String, Number, Boolean, Object, Array };

std::string_view to_string(ParamKind kind);
std::optional<ParamKind> param_kind_from_string(std::string_view name);

struct ToolParameter {
    std::string name;
    ParamKind kind = ParamKind::String;
    bool required = false;
    std::string description;
};

// Deterministic response template. `{{arg}}` expands to the JSON encoding of
// the argument (null when absent); `{{arg|raw}}` inserts a string argument
// unquoted; `|upper`, `|lower` and `|len` transform strings.
struct SimulatedBackend {
    std::string response_template;
};

struct HttpBackend {
    std::string url;  // http://host:port/path
    std::string method = "POST";
    std::chrono::milliseconds timeout{5000};
};

struct ToolSpec {
    std::string name;
    std::string category;
    std::string description;
    std::vector<ToolParameter> parameters;
    std::variant<SimulatedBackend, HttpBackend> backend;

    const ToolParameter* find_parameter(std::string_view name) const;
    /// "city: string, units?: string"
    std::string signature() const;
};

enum class RegistryErrorKind { DuplicateTool, InvalidSpec };

struct RegistryError {
    RegistryErrorKind kind;
    std::string message;
};

enum class ArgErrorKind { NotJson, MissingRequired, WrongKind, UnknownKey };

struct ArgError {
    ArgErrorKind kind;
    std::string name;  // offending parameter, empty for NotJson
    std::string message;
};

std::string_view to_string(ArgErrorKind kind);

struct ValidatedArgs {
    nlohmann::json args;                // always an object
    std::vector<std::string> warnings;  // unknown keys in lenient mode
};

Expected<ValidatedArgs, ArgError> validate_args(const ToolSpec& spec, std::string_view action_input,
                                                bool strict);

enum class ObservationKind { Ok, ToolError, BudgetExceeded };

struct ObservationResult {
    ObservationKind kind = ObservationKind::ToolError;
    std::string text;
    std::chrono::microseconds latency{0};

    bool ok() const { return kind == ObservationKind::Ok; }
    /// Text the agent feeds back as the step's Observation.
    std::string observation_text() const;
};

/// Name, description and parameter signature shown to the model.
struct ToolSummary {
    std::string name;
    std::string description;
    std::string signature;
};

/// Set of callable tools. Build it with add(), then share it read-only.
class ToolRegistry {
public:
    explicit ToolRegistry(bool strict = false) : strict_(strict) {}

    Expected<void, RegistryError> add(ToolSpec spec);

    const ToolSpec* find(std::string_view name) const;
    bool strict() const { return strict_; }
    std::size_t size() const { return tools_.size(); }
    const std::vector<ToolSpec>& tools() const { return tools_; }

    /// Summaries of `names` that are registered, in registry order.
    std::vector<ToolSummary> summaries(const std::vector<std::string>& names) const;
    std::vector<ToolSummary> summaries() const;

    /// Parses the registry document. Throws ValidationError.
    static ToolRegistry from_json(const nlohmann::json& doc);
    static ToolRegistry load(const std::string& path);

private:
    bool strict_;
    std::vector<ToolSpec> tools_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Renders a simulated response. Pure in (template, args).
std::string render_simulated(const SimulatedBackend& backend, const nlohmann::json& args);

/// Executes one tool step. Never throws: every failure is a ToolError or
/// BudgetExceeded value. A zero budget is checked before anything else.
ObservationResult dispatch(const ToolRegistry& registry, const ReActStep& step,
                           std::size_t remaining_budget);

}  // namespace agentbench
