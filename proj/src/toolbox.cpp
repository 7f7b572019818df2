#include "agentbench/toolbox.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include <httplib.h>

#include "agentbench/errors.hpp"
#include "http_util.hpp"

namespace agentbench {

using json = nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

struct Placeholder {
    std::string name;
    std::string filter;
};

// Splits "{{name|filter}}" templates. Literal text segments have an empty name.
struct TemplatePiece {
    std::string literal;
    std::optional<Placeholder> placeholder;
};

std::vector<TemplatePiece> split_template(std::string_view tmpl) {
    std::vector<TemplatePiece> pieces;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        auto open = tmpl.find("{{", pos);
        auto close = open == std::string_view::npos ? open : tmpl.find("}}", open + 2);
        if (open == std::string_view::npos || close == std::string_view::npos) {
            pieces.push_back({std::string(tmpl.substr(pos)), std::nullopt});
            break;
        }
        if (open > pos) pieces.push_back({std::string(tmpl.substr(pos, open - pos)), std::nullopt});
        auto body = tmpl.substr(open + 2, close - open - 2);
        Placeholder ph;
        auto bar = body.find('|');
        ph.name = std::string(body.substr(0, bar));
        if (bar != std::string_view::npos) ph.filter = std::string(body.substr(bar + 1));
        pieces.push_back({{}, std::move(ph)});
        pos = close + 2;
    }
    return pieces;
}

constexpr std::string_view kFilters[] = {"", "raw", "upper", "lower", "len"};

bool known_filter(std::string_view f) {
    return std::find(std::begin(kFilters), std::end(kFilters), f) != std::end(kFilters);
}

std::string apply_filter(const json& value, const std::string& filter) {
    if (filter == "raw") return value.is_string() ? value.get<std::string>() : dump(value);
    if (filter == "upper" || filter == "lower") {
        if (!value.is_string()) return dump(value);
        auto s = value.get<std::string>();
        for (auto& c : s) {
            auto uc = static_cast<unsigned char>(c);
            c = static_cast<char>(filter == "upper" ? std::toupper(uc) : std::tolower(uc));
        }
        return dump(json(s));
    }
    if (filter == "len") {
        if (value.is_string()) return std::to_string(value.get_ref<const std::string&>().size());
        if (value.is_array() || value.is_object()) return std::to_string(value.size());
        return "0";
    }
    return dump(value);
}

bool matches_kind(const json& v, ParamKind kind) {
    switch (kind) {
        case ParamKind::String: return v.is_string();
        case ParamKind::Number: return v.is_number();
        case ParamKind::Boolean: return v.is_boolean();
        case ParamKind::Object: return v.is_object();
        case ParamKind::Array: return v.is_array();
    }
    return false;
}

bool has_whitespace(std::string_view s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

ObservationResult call_http(const HttpBackend& backend, const json& args) {
    ObservationResult result;
    auto target = detail::split_http_url(backend.url);
    if (!target) {
        result.text = "unsupported tool endpoint: " + backend.url;
        return result;
    }
    httplib::Client client(target->origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(backend.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(backend.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    auto res = client.Post(target->path, dump(args), "application/json");
    if (!res) {
        result.text = "transport error: " + httplib::to_string(res.error());
        return result;
    }
    if (res->status >= 200 && res->status < 300) {
        result.kind = ObservationKind::Ok;
        result.text = res->body;
    } else {
        result.text = "HTTP " + std::to_string(res->status) + ": " + detail::excerpt(res->body, 200);
    }
    return result;
}

}  // namespace

std::string_view to_string(ParamKind kind) {
    switch (kind) {
        case ParamKind::String: return "string";
        case ParamKind::Number: return "number";
        case ParamKind::Boolean: return "boolean";
        case ParamKind::Object: return "object";
        case ParamKind::Array: return "array";
    }
    return "unknown";
}

std::optional<ParamKind> param_kind_from_string(std::string_view name) {
    for (auto k : {ParamKind::String, ParamKind::Number, ParamKind::Boolean, ParamKind::Object,
                   ParamKind::Array}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::string_view to_string(ArgErrorKind kind) {
    switch (kind) {
        case ArgErrorKind::NotJson: return "NotJson";
        case ArgErrorKind::MissingRequired: return "MissingRequired";
        case ArgErrorKind::WrongKind: return "WrongKind";
        case ArgErrorKind::UnknownKey: return "UnknownKey";
    }
    return "Unknown";
}

const ToolParameter* ToolSpec::find_parameter(std::string_view pname) const {
    for (const auto& p : parameters) {
        if (p.name == pname) return &p;
    }
    return nullptr;
}

std::string ToolSpec::signature() const {
    std::string out;
    for (const auto& p : parameters) {
        if (!out.empty()) out += ", ";
        out += p.name;
        if (!p.required) out += '?';
        out += ": ";
        out += to_string(p.kind);
    }
    return out;
}

std::string ObservationResult::observation_text() const {
    switch (kind) {
        case ObservationKind::Ok: return text;
        case ObservationKind::ToolError: return "Error: " + text;
        case ObservationKind::BudgetExceeded: return "Error: API call budget exceeded";
    }
    return text;
}

Expected<ValidatedArgs, ArgError> validate_args(const ToolSpec& spec, std::string_view action_input,
                                                bool strict) {
    auto doc = json::parse(action_input, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        return unexpected(ArgError{ArgErrorKind::NotJson, "",
                                   "Action Input is not a JSON object"});
    }
    ValidatedArgs out;
    for (const auto& p : spec.parameters) {
        auto it = doc.find(p.name);
        if (it == doc.end()) {
            if (p.required) {
                return unexpected(ArgError{ArgErrorKind::MissingRequired, p.name,
                                           "missing required parameter " + p.name});
            }
            continue;
        }
        if (!matches_kind(*it, p.kind)) {
            return unexpected(ArgError{ArgErrorKind::WrongKind, p.name,
                                       "parameter " + p.name + " must be " +
                                           std::string(to_string(p.kind))});
        }
    }
    for (const auto& [key, value] : doc.items()) {
        if (spec.find_parameter(key)) continue;
        if (strict) {
            return unexpected(ArgError{ArgErrorKind::UnknownKey, key, "unknown parameter " + key});
        }
        out.warnings.push_back("ignored unknown parameter " + key);
    }
    out.args = std::move(doc);
    return out;
}

Expected<void, RegistryError> ToolRegistry::add(ToolSpec spec) {
    auto invalid = [](std::string msg) {
        return unexpected(RegistryError{RegistryErrorKind::InvalidSpec, std::move(msg)});
    };
    if (spec.name.empty() || has_whitespace(spec.name)) {
        return invalid("tool name must be a non-empty token without whitespace: '" + spec.name + "'");
    }
    if (spec.name == kFinishAction) return invalid("tool name Finish is reserved");
    std::unordered_set<std::string> seen;
    for (const auto& p : spec.parameters) {
        if (p.name.empty()) return invalid(spec.name + ": parameter with empty name");
        if (!seen.insert(p.name).second) {
            return invalid(spec.name + ": duplicate parameter " + p.name);
        }
    }
    if (const auto* sim = std::get_if<SimulatedBackend>(&spec.backend)) {
        for (const auto& piece : split_template(sim->response_template)) {
            if (!piece.placeholder) continue;
            if (!spec.find_parameter(piece.placeholder->name)) {
                return invalid(spec.name + ": template references undeclared parameter " +
                               piece.placeholder->name);
            }
            if (!known_filter(piece.placeholder->filter)) {
                return invalid(spec.name + ": unknown template filter " + piece.placeholder->filter);
            }
        }
    }
    if (index_.contains(spec.name)) {
        return unexpected(RegistryError{RegistryErrorKind::DuplicateTool,
                                        "duplicate tool " + spec.name});
    }
    index_.emplace(spec.name, tools_.size());
    tools_.push_back(std::move(spec));
    return {};
}

const ToolSpec* ToolRegistry::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &tools_[it->second];
}

std::vector<ToolSummary> ToolRegistry::summaries(const std::vector<std::string>& names) const {
    std::vector<ToolSummary> out;
    for (const auto& t : tools_) {
        if (std::find(names.begin(), names.end(), t.name) == names.end()) continue;
        out.push_back({t.name, t.description, t.signature()});
    }
    return out;
}

std::vector<ToolSummary> ToolRegistry::summaries() const {
    std::vector<ToolSummary> out;
    for (const auto& t : tools_) out.push_back({t.name, t.description, t.signature()});
    return out;
}

ToolRegistry ToolRegistry::from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("registry must be a JSON object");
    bool strict = doc.value("strict", false);
    auto tools = doc.find("tools");
    if (tools == doc.end() || !tools->is_array()) {
        throw ValidationError("registry lacks a \"tools\" array");
    }
    ToolRegistry registry(strict);
    for (const auto& t : *tools) {
        try {
            ToolSpec spec;
            spec.name = t.at("name").get<std::string>();
            spec.category = t.value("category", "");
            spec.description = t.value("description", "");
            for (const auto& p : t.value("parameters", json::array())) {
                ToolParameter param;
                param.name = p.at("name").get<std::string>();
                auto kind = param_kind_from_string(p.at("kind").get<std::string>());
                if (!kind) {
                    throw ValidationError(spec.name + ": unknown parameter kind for " + param.name);
                }
                param.kind = *kind;
                param.required = p.value("required", false);
                param.description = p.value("description", "");
                spec.parameters.push_back(std::move(param));
            }
            const auto& backend = t.at("backend");
            const auto type = backend.at("type").get<std::string>();
            if (type == "simulated") {
                const auto& rule = backend.at("rule");
                SimulatedBackend sim;
                sim.response_template = rule.is_string() ? rule.get<std::string>()
                                                         : rule.at("template").get<std::string>();
                spec.backend = std::move(sim);
            } else if (type == "http") {
                HttpBackend http;
                http.url = backend.at("url").get<std::string>();
                http.method = backend.value("method", "POST");
                if (http.method != "POST") {
                    throw ValidationError(spec.name + ": http backend supports POST only");
                }
                if (!detail::split_http_url(http.url)) {
                    throw ValidationError(spec.name + ": http backend url must be http://host[:port]/path");
                }
                http.timeout = std::chrono::milliseconds(backend.value("timeout_ms", 5000));
                spec.backend = std::move(http);
            } else {
                throw ValidationError(spec.name + ": unknown backend type " + type);
            }
            auto added = registry.add(std::move(spec));
            if (!added) throw ValidationError(added.error().message);
        } catch (const json::exception& e) {
            throw ValidationError(std::string("malformed tool entry: ") + e.what());
        }
    }
    return registry;
}

ToolRegistry ToolRegistry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open registry file " + path);
    auto doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ValidationError("registry file is not valid JSON: " + path);
    return from_json(doc);
}

std::string render_simulated(const SimulatedBackend& backend, const json& args) {
    std::string out;
    for (const auto& piece : split_template(backend.response_template)) {
        if (!piece.placeholder) {
            out += piece.literal;
            continue;
        }
        auto it = args.find(piece.placeholder->name);
        out += apply_filter(it == args.end() ? json(nullptr) : *it, piece.placeholder->filter);
    }
    return out;
}

ObservationResult dispatch(const ToolRegistry& registry, const ReActStep& step,
                           std::size_t remaining_budget) {
    const auto start = std::chrono::steady_clock::now();
    ObservationResult result;
    auto finish = [&](ObservationResult r) {
        r.latency = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - start);
        return r;
    };

    if (remaining_budget == 0) {
        result.kind = ObservationKind::BudgetExceeded;
        return finish(std::move(result));
    }
    if (step.is_finish()) {
        result.text = "Finish is not a dispatchable tool";
        return finish(std::move(result));
    }
    const auto* spec = registry.find(step.action);
    if (!spec) {
        result.text = "no such tool: " + step.action;
        return finish(std::move(result));
    }
    auto args = validate_args(*spec, step.action_input, registry.strict());
    if (!args) {
        result.text = args.error().message;
        return finish(std::move(result));
    }
    try {
        if (const auto* sim = std::get_if<SimulatedBackend>(&spec->backend)) {
            result.kind = ObservationKind::Ok;
            result.text = render_simulated(*sim, args->args);
        } else {
            result = call_http(std::get<HttpBackend>(spec->backend), args->args);
        }
    } catch (const std::exception& e) {
        result.kind = ObservationKind::ToolError;
        result.text = std::string("tool failed: ") + e.what();
    }
    return finish(std::move(result));
}

}  // namespace agentbench
