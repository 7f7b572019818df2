#include "agentbench/dataset_forge.hpp"

#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "agentbench/errors.hpp"

using namespace agentbench;
using json = nlohmann::json;

namespace {

RawConversation conv(std::vector<Turn> turns) { return {"c1", std::move(turns)}; }

std::string record(const std::string& id, const std::vector<std::pair<std::string, std::string>>& turns) {
    json convs = json::array();
    for (const auto& [from, value] : turns) convs.push_back({{"from", from}, {"value", value}});
    return json{{"id", id}, {"conversations", convs}}.dump();
}

}  // namespace

TEST(TransformConversation, DefaultDelimiters) {
    auto ex = transform_conversation(
        conv({{Role::System, "S"}, {Role::User, "U"}, {Role::Assistant, "A"}}), DelimiterMap{});
    ASSERT_TRUE(ex);
    EXPECT_EQ(ex->text, "<|system|>\nS\n<|user|>\nU\n<|assistant|>\nA\n<|endofexample|>");
}

TEST(TransformConversation, EmptyConversation) {
    auto ex = transform_conversation(conv({}), DelimiterMap{});
    ASSERT_FALSE(ex);
    EXPECT_EQ(ex.error().kind, ForgeErrorKind::EmptyConversation);
}

TEST(TransformConversation, RequiresAssistantTurn) {
    auto ex = transform_conversation(conv({{Role::User, "U"}}), DelimiterMap{});
    ASSERT_FALSE(ex);
    EXPECT_EQ(ex.error().kind, ForgeErrorKind::NoAssistantTurn);
}

TEST(TransformConversation, FunctionTurnKeptInPlace) {
    auto ex = transform_conversation(conv({{Role::User, "U"},
                                           {Role::Assistant, "call"},
                                           {Role::Function, "{\"temp\": 3}"},
                                           {Role::Assistant, "done"}}),
                                     DelimiterMap{});
    ASSERT_TRUE(ex);
    const auto call = ex->text.find("<|assistant|>\ncall");
    const auto fn = ex->text.find("<|function|>\n{\"temp\": 3}");
    const auto done = ex->text.find("<|assistant|>\ndone");
    ASSERT_NE(fn, std::string::npos);
    EXPECT_LT(call, fn);
    EXPECT_LT(fn, done);
}

TEST(TransformConversation, DelimiterOrderMatchesRolesProperty) {
    std::mt19937_64 rng(3);
    const std::vector<Role> roles = {Role::System, Role::User, Role::Assistant, Role::Function};
    DelimiterMap d;
    for (int i = 0; i < 300; ++i) {
        RawConversation c{"r", {}};
        const auto n = 1 + rng() % 8;
        for (std::size_t k = 0; k < n; ++k) c.turns.push_back({roles[rng() % 4], "v" + std::to_string(k)});
        c.turns.push_back({Role::Assistant, "final"});
        auto ex = transform_conversation(c, d);
        ASSERT_TRUE(ex);
        // Recover tag sequence by scanning line starts.
        std::vector<Role> seen;
        std::istringstream lines(ex->text);
        for (std::string line; std::getline(lines, line);) {
            for (auto r : roles) {
                if (line == d.tag(r)) seen.push_back(r);
            }
        }
        std::vector<Role> expected;
        for (const auto& t : c.turns) expected.push_back(t.role);
        EXPECT_EQ(seen, expected);
        EXPECT_TRUE(ex->text.ends_with(d.end_of_example));
    }
}

TEST(DecodeConversation, UnknownRole) {
    auto c = decode_conversation(json::parse(record("x", {{"user", "u"}, {"robot", "r"}})));
    ASSERT_FALSE(c);
    EXPECT_EQ(c.error().kind, ForgeErrorKind::UnknownRole);
}

TEST(DelimiterMap, FromJsonRequiresAllRoles) {
    auto d = DelimiterMap::from_json(json{{"system", "[S]"}, {"user", "[U]"}, {"assistant", "[A]"},
                                          {"function", "[F]"}, {"end_of_example", "[END]"}});
    EXPECT_EQ(d.tag(Role::Function), "[F]");
    EXPECT_EQ(d.end_of_example, "[END]");
    EXPECT_THROW(DelimiterMap::from_json(json{{"system", "[S]"}}), ValidationError);
}

TEST(TransformCorpus, TenValidRecords) {
    std::stringstream in, out;
    for (int i = 0; i < 10; ++i) {
        in << record("r" + std::to_string(i), {{"user", "q" + std::to_string(i)}, {"assistant", "a"}}) << '\n';
    }
    auto summary = transform_corpus(in, out, {});
    EXPECT_EQ(summary.records_read, 10u);
    EXPECT_EQ(summary.examples_written, 10u);
    EXPECT_EQ(summary.skipped, 0u);

    std::vector<std::string> texts;
    for (std::string line; std::getline(out, line);) texts.push_back(json::parse(line).at("text"));
    ASSERT_EQ(texts.size(), 10u);
    for (int i = 0; i < 10; ++i) {
        EXPECT_NE(texts[i].find("\nq" + std::to_string(i) + "\n"), std::string::npos);
    }
}

TEST(TransformCorpus, SkipsAndLogsMalformed) {
    std::stringstream in, out;
    for (int i = 0; i < 10; ++i) {
        if (i == 3) {
            in << "{not json\n";
        } else if (i == 7) {
            in << record("bad", {{"alien", "x"}, {"assistant", "a"}}) << '\n';
        } else {
            in << record("r" + std::to_string(i), {{"user", "q"}, {"assistant", "a"}}) << '\n';
        }
    }
    auto summary = transform_corpus(in, out, {});
    EXPECT_EQ(summary.examples_written, 8u);
    EXPECT_EQ(summary.skipped, 2u);
    EXPECT_EQ(summary.examples_written, summary.records_read - summary.skipped);
    ASSERT_EQ(summary.skip_log.size(), 2u);
    EXPECT_EQ(summary.skip_log[0].line, 4u);
    EXPECT_NE(summary.skip_log[1].reason.find("UnknownRole"), std::string::npos);
}

TEST(TransformCorpus, FlagsLongExamplesButKeepsThem) {
    std::stringstream in, out;
    in << record("long", {{"user", std::string(100, 'x')}, {"assistant", "a"}}) << '\n';
    CorpusOptions options;
    options.max_seq_len = 10;
    auto summary = transform_corpus(in, out, options);
    EXPECT_EQ(summary.over_length, 1u);
    EXPECT_EQ(summary.examples_written, 1u);
    EXPECT_NE(out.str().find(std::string(100, 'x')), std::string::npos);
}

TEST(TransformCorpus, WriteFailureIsIoError) {
    std::stringstream in;
    in << record("r", {{"user", "q"}, {"assistant", "a"}}) << '\n';
    std::stringstream out;
    out.setstate(std::ios::badbit);
    EXPECT_THROW(transform_corpus(in, out, {}), IoError);
}

TEST(CorpusSummary, ShardsMergeByAddition) {
    CorpusSummary a{5, 4, 1, 0, {{2, "x"}}};
    CorpusSummary b{3, 3, 0, 1, {}};
    a += b;
    EXPECT_EQ(a.records_read, 8u);
    EXPECT_EQ(a.examples_written, 7u);
    EXPECT_EQ(a.over_length, 1u);
}

TEST(TrainingSteps, PublishedFigure) {
    auto steps = compute_training_steps(187542, 32, 1);
    ASSERT_TRUE(steps);
    EXPECT_EQ(*steps, 5860u);
}

TEST(TrainingSteps, FloorThenEpochs) {
    EXPECT_EQ(*compute_training_steps(32, 32, 1), 1u);
    EXPECT_EQ(*compute_training_steps(33, 32, 2), 2u);
    EXPECT_EQ(compute_training_steps(10, 0, 1).error(), StepsError::ZeroBatch);
}

TEST(TrainingSteps, MonotoneProperty) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto n = rng() % 100000, b = 1 + rng() % 64, e = 1 + rng() % 4;
        const auto base = *compute_training_steps(n, b, e);
        EXPECT_LE(base, *compute_training_steps(n + 1 + rng() % 50, b, e));
        EXPECT_LE(base, *compute_training_steps(n, b, e + 1));
        EXPECT_GE(base, *compute_training_steps(n, b + 1, e));
    }
}

TEST(TrainingConfig, DefaultsAndSerialization) {
    TrainingConfig c;
    EXPECT_TRUE(c.violations().empty());
    EXPECT_DOUBLE_EQ(c.learning_rate, 5e-5);
    EXPECT_EQ(c.warmup_steps, 100u);
    EXPECT_EQ(c.effective_batch, c.per_device_batch * c.grad_accumulation);
    EXPECT_DOUBLE_EQ(c.max_grad_norm, 0.3);
    EXPECT_DOUBLE_EQ(c.weight_decay, 0.01);
    EXPECT_EQ(c.max_seq_len, 8192u);

    const auto doc = to_json(c);
    EXPECT_EQ(doc.size(), 11u);
    for (const char* key : {"learning_rate", "warmup_steps", "per_device_batch", "grad_accumulation",
                            "effective_batch", "max_grad_norm", "weight_decay", "epochs",
                            "mixed_precision", "gradient_checkpointing", "max_seq_len"}) {
        EXPECT_TRUE(doc.contains(key)) << key;
    }
    EXPECT_EQ(training_config_from_json(doc), c);
}

TEST(TrainingConfig, DetectsInconsistentBatch) {
    TrainingConfig c;
    c.effective_batch = 30;
    EXPECT_FALSE(c.violations().empty());
    c = {};
    c.epochs = 0;
    EXPECT_FALSE(c.violations().empty());
    EXPECT_THROW(training_config_from_json(json{{"learning_rate", "fast"}}), ValidationError);
}
