#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "agentbench/expected.hpp"
#include "agentbench/react_trace.hpp"
#include "agentbench/toolbox.hpp"

namespace agentbench {

struct GenerationParams {
    double temperature = 0.1;
    std::size_t max_new_tokens = 512;
    std::size_t max_seq_len = 8192;
    std::vector<std::string> stop_sequences;

    std::vector<std::string> violations() const;
};

enum class FinishReason { Stop, Length, BackendError };

std::string_view to_string(FinishReason reason);

struct Completion {
    std::string text;
    FinishReason finish_reason = FinishReason::Stop;
};

enum class GatewayErrorKind { PromptTooLong, ScriptExhausted, InvalidParams };

struct GatewayError {
    GatewayErrorKind kind;
    std::string message;
};

std::string_view to_string(GatewayErrorKind kind);

/// Prompt length in backend units. Default is characters / 4, rounded up.
using TokenCounter = std::function<std::size_t(std::string_view)>;
std::size_t approx_token_count(std::string_view text);

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;

    /// Must be safe to call concurrently.
    virtual Expected<Completion, GatewayError> generate(std::string_view prompt,
                                                        const GenerationParams& params) = 0;
    /// Stable description recorded in reports ("replay:<file>", "http://...").
    virtual std::string identity() const = 0;
};

/// Returns scripted completions in call order.
class ReplayBackend final : public CompletionBackend {
public:
    explicit ReplayBackend(std::vector<std::string> script, std::string identity = "replay",
                           TokenCounter counter = approx_token_count);

    Expected<Completion, GatewayError> generate(std::string_view prompt,
                                                const GenerationParams& params) override;
    std::string identity() const override { return identity_; }
    std::size_t calls_made() const { return next_.load(); }

private:
    std::vector<std::string> script_;
    std::string identity_;
    TokenCounter counter_;
    std::atomic<std::size_t> next_{0};
};

/// Replay script file: {"query_id": ["completion", ...]}.
class ReplayLibrary {
public:
    ReplayLibrary() = default;
    ReplayLibrary(std::map<std::string, std::vector<std::string>> scripts, std::string source);

    static ReplayLibrary from_json(const nlohmann::json& doc, std::string source = "replay");
    static ReplayLibrary load(const std::string& path);

    /// A fresh backend for one query. Unknown ids get an empty script.
    std::unique_ptr<ReplayBackend> backend_for(const std::string& query_id) const;
    const std::map<std::string, std::vector<std::string>>& scripts() const { return scripts_; }
    const std::string& source() const { return source_; }

    nlohmann::json to_json() const;

private:
    std::map<std::string, std::vector<std::string>> scripts_;
    std::string source_ = "replay";
};

struct HttpBackendOptions {
    std::string url;
    int max_retries = 2;
    std::chrono::milliseconds backoff{250};
    std::chrono::milliseconds timeout{60000};
    TokenCounter counter = approx_token_count;
};

/// POST {"prompt","temperature","max_new_tokens","stop"} -> {"text"}.
/// Transport failures are retried; any HTTP response, error status included, is final.
class HttpCompletionBackend final : public CompletionBackend {
public:
    explicit HttpCompletionBackend(HttpBackendOptions options);

    Expected<Completion, GatewayError> generate(std::string_view prompt,
                                                const GenerationParams& params) override;
    std::string identity() const override { return options_.url; }

private:
    HttpBackendOptions options_;
};

std::string build_prompt(std::string_view system, std::string_view query,
                         const std::vector<ReActStep>& history,
                         const std::vector<ToolSummary>& tools);

}  // namespace agentbench
