#include "agentbench/model_gateway.hpp"

#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "agentbench/errors.hpp"
#include "http_util.hpp"

namespace agentbench {

using json = nlohmann::json;

namespace {

Expected<void, GatewayError> check_request(std::string_view prompt, const GenerationParams& params,
                                           const TokenCounter& counter) {
    if (auto v = params.violations(); !v.empty()) {
        return unexpected(GatewayError{GatewayErrorKind::InvalidParams, v.front()});
    }
    const auto tokens = counter(prompt);
    if (tokens > params.max_seq_len) {
        return unexpected(GatewayError{GatewayErrorKind::PromptTooLong,
                                       "prompt is " + std::to_string(tokens) +
                                           " tokens, limit " + std::to_string(params.max_seq_len)});
    }
    return {};
}

}  // namespace

std::vector<std::string> GenerationParams::violations() const {
    std::vector<std::string> out;
    if (!(temperature >= 0)) out.push_back("temperature must be >= 0");
    if (max_new_tokens < 1) out.push_back("max_new_tokens must be >= 1");
    if (max_seq_len < max_new_tokens) out.push_back("max_seq_len must be >= max_new_tokens");
    return out;
}

std::string_view to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::Stop: return "stop";
        case FinishReason::Length: return "length";
        case FinishReason::BackendError: return "backend_error";
    }
    return "unknown";
}

std::string_view to_string(GatewayErrorKind kind) {
    switch (kind) {
        case GatewayErrorKind::PromptTooLong: return "PromptTooLong";
        case GatewayErrorKind::ScriptExhausted: return "ScriptExhausted";
        case GatewayErrorKind::InvalidParams: return "InvalidParams";
    }
    return "Unknown";
}

std::size_t approx_token_count(std::string_view text) { return (text.size() + 3) / 4; }

ReplayBackend::ReplayBackend(std::vector<std::string> script, std::string identity,
                             TokenCounter counter)
    : script_(std::move(script)), identity_(std::move(identity)), counter_(std::move(counter)) {}

Expected<Completion, GatewayError> ReplayBackend::generate(std::string_view prompt,
                                                           const GenerationParams& params) {
    if (auto ok = check_request(prompt, params, counter_); !ok) return unexpected(ok.error());
    const auto index = next_.fetch_add(1);
    if (index >= script_.size()) {
        return unexpected(GatewayError{GatewayErrorKind::ScriptExhausted,
                                       "replay script has " + std::to_string(script_.size()) +
                                           " completions, call " + std::to_string(index + 1) +
                                           " requested"});
    }
    return Completion{script_[index], FinishReason::Stop};
}

ReplayLibrary::ReplayLibrary(std::map<std::string, std::vector<std::string>> scripts,
                             std::string source)
    : scripts_(std::move(scripts)), source_(std::move(source)) {}

ReplayLibrary ReplayLibrary::from_json(const json& doc, std::string source) {
    if (!doc.is_object()) throw ValidationError("replay script must be a JSON object");
    std::map<std::string, std::vector<std::string>> scripts;
    for (const auto& [id, list] : doc.items()) {
        if (!list.is_array()) throw ValidationError("replay entry " + id + " must be an array");
        auto& script = scripts[id];
        for (const auto& c : list) {
            if (!c.is_string()) throw ValidationError("replay entry " + id + " holds a non-string");
            script.push_back(c.get<std::string>());
        }
    }
    return ReplayLibrary(std::move(scripts), std::move(source));
}

ReplayLibrary ReplayLibrary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open replay script " + path);
    auto doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ValidationError("replay script is not valid JSON: " + path);
    return from_json(doc, "replay:" + path);
}

std::unique_ptr<ReplayBackend> ReplayLibrary::backend_for(const std::string& query_id) const {
    auto it = scripts_.find(query_id);
    return std::make_unique<ReplayBackend>(
        it == scripts_.end() ? std::vector<std::string>{} : it->second, source_);
}

json ReplayLibrary::to_json() const {
    json doc = json::object();
    for (const auto& [id, script] : scripts_) doc[id] = script;
    return doc;
}

HttpCompletionBackend::HttpCompletionBackend(HttpBackendOptions options)
    : options_(std::move(options)) {
    if (!detail::split_http_url(options_.url)) {
        throw ValidationError("model endpoint must be http://host[:port]/path: " + options_.url);
    }
}

Expected<Completion, GatewayError> HttpCompletionBackend::generate(std::string_view prompt,
                                                                   const GenerationParams& params) {
    if (auto ok = check_request(prompt, params, options_.counter); !ok) {
        return unexpected(ok.error());
    }
    const auto target = *detail::split_http_url(options_.url);
    const json body = {{"prompt", prompt},
                       {"temperature", params.temperature},
                       {"max_new_tokens", params.max_new_tokens},
                       {"stop", params.stop_sequences}};
    const auto payload = body.dump(-1, ' ', false, json::error_handler_t::replace);

    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);

    const Completion failed{"", FinishReason::BackendError};
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(options_.backoff);
        httplib::Client client(target.origin);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        auto res = client.Post(target.path, payload, "application/json");
        if (!res) continue;  // transport error

        if (res->status < 200 || res->status >= 300) return failed;
        auto doc = json::parse(res->body, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) return failed;
        auto text = doc.find("text");
        if (text == doc.end() || !text->is_string()) return failed;
        Completion completion{text->get<std::string>(), FinishReason::Stop};
        if (doc.value("finish_reason", "") == "length") completion.finish_reason = FinishReason::Length;
        return completion;
    }
    return failed;
}

std::string build_prompt(std::string_view system, std::string_view query,
                         const std::vector<ReActStep>& history,
                         const std::vector<ToolSummary>& tools) {
    std::string out;
    out += system;
    out += "\n\nAvailable tools:\n";
    for (const auto& t : tools) {
        out += "- ";
        out += t.name;
        out += '(';
        out += t.signature;
        out += "): ";
        out += t.description;
        out += '\n';
    }
    out += "\nQuery: ";
    out += query;
    out += '\n';
    for (const auto& step : history) {
        out += render_step(step);
        out += '\n';
    }
    out += "Thought:";
    return out;
}

}  // namespace agentbench
