#include "agentbench/dataset_forge.hpp"

#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "agentbench/errors.hpp"

namespace agentbench {

using json = nlohmann::json;

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
        case Role::Function: return "function";
    }
    return "unknown";
}

std::optional<Role> role_from_string(std::string_view name) {
    for (auto r : {Role::System, Role::User, Role::Assistant, Role::Function}) {
        if (to_string(r) == name) return r;
    }
    return std::nullopt;
}

std::string_view to_string(ForgeErrorKind kind) {
    switch (kind) {
        case ForgeErrorKind::UnknownRole: return "UnknownRole";
        case ForgeErrorKind::EmptyConversation: return "EmptyConversation";
        case ForgeErrorKind::NoAssistantTurn: return "NoAssistantTurn";
        case ForgeErrorKind::MalformedRecord: return "MalformedRecord";
    }
    return "Unknown";
}

const std::string& DelimiterMap::tag(Role role) const {
    switch (role) {
        case Role::System: return system;
        case Role::User: return user;
        case Role::Assistant: return assistant;
        case Role::Function: return function;
    }
    return user;
}

DelimiterMap DelimiterMap::from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("delimiter map must be a JSON object");
    DelimiterMap map;
    auto read = [&](const char* key, std::string& field, bool required) {
        auto it = doc.find(key);
        if (it == doc.end()) {
            if (required) throw ValidationError(std::string("delimiter map lacks role ") + key);
            return;
        }
        if (!it->is_string()) throw ValidationError(std::string("delimiter ") + key + " must be a string");
        field = it->get<std::string>();
    };
    read("system", map.system, true);
    read("user", map.user, true);
    read("assistant", map.assistant, true);
    read("function", map.function, true);
    read("end_of_example", map.end_of_example, false);
    return map;
}

Expected<RawConversation, ForgeError> decode_conversation(const json& record) {
    auto malformed = [](std::string msg) {
        return unexpected(ForgeError{ForgeErrorKind::MalformedRecord, std::move(msg)});
    };
    if (!record.is_object()) return malformed("record is not a JSON object");
    RawConversation conv;
    if (auto id = record.find("id"); id != record.end()) {
        if (!id->is_string()) return malformed("id must be a string");
        conv.id = id->get<std::string>();
    }
    auto turns = record.find("conversations");
    if (turns == record.end() || !turns->is_array()) {
        return malformed("conversations must be an array");
    }
    for (const auto& t : *turns) {
        if (!t.is_object()) return malformed("turn is not an object");
        auto from = t.find("from");
        auto value = t.find("value");
        if (from == t.end() || !from->is_string() || value == t.end() || !value->is_string()) {
            return malformed("turn needs string \"from\" and \"value\"");
        }
        auto role = role_from_string(from->get_ref<const std::string&>());
        if (!role) {
            return unexpected(ForgeError{ForgeErrorKind::UnknownRole,
                                         "unknown role: " + from->get<std::string>()});
        }
        conv.turns.push_back({*role, value->get<std::string>()});
    }
    return conv;
}

Expected<TrainingExample, ForgeError> transform_conversation(const RawConversation& conv,
                                                             const DelimiterMap& delimiters) {
    if (conv.turns.empty()) {
        return unexpected(ForgeError{ForgeErrorKind::EmptyConversation, "conversation has no turns"});
    }
    bool has_assistant = false;
    std::size_t size = delimiters.end_of_example.size();
    for (const auto& turn : conv.turns) {
        has_assistant |= turn.role == Role::Assistant;
        size += delimiters.tag(turn.role).size() + turn.value.size() + 2;
    }
    if (!has_assistant) {
        return unexpected(
            ForgeError{ForgeErrorKind::NoAssistantTurn, "conversation has no assistant turn"});
    }

    TrainingExample example;
    example.text.reserve(size);
    for (const auto& turn : conv.turns) {
        example.text += delimiters.tag(turn.role);
        example.text += '\n';
        example.text += turn.value;
        example.text += '\n';
    }
    example.text += delimiters.end_of_example;
    return example;
}

CorpusSummary& CorpusSummary::operator+=(const CorpusSummary& other) {
    records_read += other.records_read;
    examples_written += other.examples_written;
    skipped += other.skipped;
    over_length += other.over_length;
    skip_log.insert(skip_log.end(), other.skip_log.begin(), other.skip_log.end());
    return *this;
}

CorpusSummary transform_corpus(std::istream& in, std::ostream& out, const CorpusOptions& options) {
    CorpusSummary summary;
    std::string line;
    std::size_t line_no = 0;
    std::size_t last_written_line = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++summary.records_read;

        auto skip = [&](std::string reason) {
            ++summary.skipped;
            summary.skip_log.push_back({line_no, std::move(reason)});
        };

        auto record = json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            skip("MalformedRecord: not valid JSON");
            continue;
        }
        auto conv = decode_conversation(record);
        if (!conv) {
            skip(std::string(to_string(conv.error().kind)) + ": " + conv.error().message);
            continue;
        }
        auto example = transform_conversation(*conv, options.delimiters);
        if (!example) {
            skip(std::string(to_string(example.error().kind)) + ": " + example.error().message);
            continue;
        }
        if (example->text.size() / 4 > options.max_seq_len) ++summary.over_length;

        json row = {{"text", example->text}};
        out << row.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
        if (!out) {
            throw IoError("write failed after input line " + std::to_string(last_written_line));
        }
        ++summary.examples_written;
        last_written_line = line_no;
    }
    if (in.bad()) {
        throw IoError("read failed after input line " + std::to_string(last_written_line));
    }
    return summary;
}

std::vector<std::string> TrainingConfig::violations() const {
    std::vector<std::string> out;
    if (!(learning_rate > 0)) out.push_back("learning_rate must be > 0");
    if (warmup_steps == 0) out.push_back("warmup_steps must be > 0");
    if (per_device_batch == 0) out.push_back("per_device_batch must be > 0");
    if (grad_accumulation == 0) out.push_back("grad_accumulation must be > 0");
    if (effective_batch == 0) out.push_back("effective_batch must be > 0");
    if (!(max_grad_norm > 0)) out.push_back("max_grad_norm must be > 0");
    if (!(weight_decay > 0)) out.push_back("weight_decay must be > 0");
    if (epochs < 1) out.push_back("epochs must be >= 1");
    if (max_seq_len == 0) out.push_back("max_seq_len must be > 0");
    if (effective_batch != per_device_batch * grad_accumulation) {
        out.push_back("effective_batch must equal per_device_batch * grad_accumulation");
    }
    return out;
}

json to_json(const TrainingConfig& c) {
    return json{{"learning_rate", c.learning_rate},
                {"warmup_steps", c.warmup_steps},
                {"per_device_batch", c.per_device_batch},
                {"grad_accumulation", c.grad_accumulation},
                {"effective_batch", c.effective_batch},
                {"max_grad_norm", c.max_grad_norm},
                {"weight_decay", c.weight_decay},
                {"epochs", c.epochs},
                {"mixed_precision", c.mixed_precision},
                {"gradient_checkpointing", c.gradient_checkpointing},
                {"max_seq_len", c.max_seq_len}};
}

TrainingConfig training_config_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("training config must be a JSON object");
    TrainingConfig c;
    auto number = [&](const char* key, double& field) {
        auto it = doc.find(key);
        if (it == doc.end() || !it->is_number()) {
            throw ValidationError(std::string("training config field ") + key + " must be a number");
        }
        field = it->get<double>();
    };
    auto count = [&](const char* key, std::uint64_t& field) {
        auto it = doc.find(key);
        if (it == doc.end() || !it->is_number_unsigned()) {
            throw ValidationError(std::string("training config field ") + key +
                                  " must be a non-negative integer");
        }
        field = it->get<std::uint64_t>();
    };
    auto flag = [&](const char* key, bool& field) {
        auto it = doc.find(key);
        if (it == doc.end() || !it->is_boolean()) {
            throw ValidationError(std::string("training config field ") + key + " must be a boolean");
        }
        field = it->get<bool>();
    };
    number("learning_rate", c.learning_rate);
    count("warmup_steps", c.warmup_steps);
    count("per_device_batch", c.per_device_batch);
    count("grad_accumulation", c.grad_accumulation);
    count("effective_batch", c.effective_batch);
    number("max_grad_norm", c.max_grad_norm);
    number("weight_decay", c.weight_decay);
    count("epochs", c.epochs);
    flag("mixed_precision", c.mixed_precision);
    flag("gradient_checkpointing", c.gradient_checkpointing);
    count("max_seq_len", c.max_seq_len);
    return c;
}

Expected<std::uint64_t, StepsError> compute_training_steps(std::uint64_t num_examples,
                                                           std::uint64_t effective_batch,
                                                           std::uint64_t epochs) {
    if (effective_batch == 0) return unexpected(StepsError::ZeroBatch);
    if (epochs == 0) return unexpected(StepsError::ZeroEpochs);
    return (num_examples / effective_batch) * epochs;
}

}  // namespace agentbench
