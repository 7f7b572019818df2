#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "agentbench/expected.hpp"

namespace agentbench {

enum class Role { System, User, Assistant, Function };

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view name);

struct Turn {
    Role role;
    std::string value;
};

struct RawConversation {
    std::string id;
    std::vector<Turn> turns;
};

struct TrainingExample {
    std::string text;
};

enum class ForgeErrorKind { UnknownRole, EmptyConversation, NoAssistantTurn, MalformedRecord };

struct ForgeError {
    ForgeErrorKind kind;
    std::string message;
};

std::string_view to_string(ForgeErrorKind kind);

/// Role tags written before each turn plus the end-of-example sentinel.
struct DelimiterMap {
    std::string system = "<|system|>";
    std::string user = "<|user|>";
    std::string assistant = "<|assistant|>";
    std::string function = "<|function|>";
    std::string end_of_example = "<|endofexample|>";

    const std::string& tag(Role role) const;

    /// Reads {"system","user","assistant","function"[, "end_of_example"]}.
    /// Throws ValidationError when a role tag is missing or not a string.
    static DelimiterMap from_json(const nlohmann::json& doc);
};

/// Decodes one input record {"id", "conversations": [{"from", "value"}]}.
Expected<RawConversation, ForgeError> decode_conversation(const nlohmann::json& record);

/// Concatenates turns in order, each as "{tag}\n{value}\n", then the sentinel.
Expected<TrainingExample, ForgeError> transform_conversation(const RawConversation& conv,
                                                             const DelimiterMap& delimiters);

struct SkippedRecord {
    std::size_t line;  // 1-based line number in the input
    std::string reason;
};

struct CorpusSummary {
    std::size_t records_read = 0;
    std::size_t examples_written = 0;
    std::size_t skipped = 0;
    // Examples whose length proxy (chars / 4) exceeds max_seq_len. Emitted intact.
    std::size_t over_length = 0;
    std::vector<SkippedRecord> skip_log;

    CorpusSummary& operator+=(const CorpusSummary& other);
};

struct CorpusOptions {
    DelimiterMap delimiters;
    std::size_t max_seq_len = 8192;
};

/// Streams JSON-lines conversations from `in` to JSON-lines {"text"} examples on
/// `out`. Blank lines are ignored. Malformed records are skipped and logged in
/// the summary. Throws IoError on a stream failure, naming the last record
/// that was written successfully.
CorpusSummary transform_corpus(std::istream& in, std::ostream& out, const CorpusOptions& options);

/// Supervised fine-tuning hyperparameters. Serialized flat with these field names.
struct TrainingConfig {
    double learning_rate = 5e-5;
    std::uint64_t warmup_steps = 100;
    std::uint64_t per_device_batch = 8;
    std::uint64_t grad_accumulation = 4;
    std::uint64_t effective_batch = 32;
    double max_grad_norm = 0.3;
    double weight_decay = 0.01;
    std::uint64_t epochs = 1;
    bool mixed_precision = true;
    bool gradient_checkpointing = true;
    std::uint64_t max_seq_len = 8192;

    /// Empty when the config is consistent; otherwise one message per violation.
    std::vector<std::string> violations() const;

    bool operator==(const TrainingConfig&) const = default;
};

nlohmann::json to_json(const TrainingConfig& config);
/// Throws ValidationError on missing or mistyped fields.
TrainingConfig training_config_from_json(const nlohmann::json& doc);

enum class StepsError { ZeroBatch, ZeroEpochs };

/// floor(num_examples / effective_batch) * epochs, i.e. the last partial batch is dropped.
Expected<std::uint64_t, StepsError> compute_training_steps(std::uint64_t num_examples,
                                                           std::uint64_t effective_batch,
                                                           std::uint64_t epochs);

}  // namespace agentbench
