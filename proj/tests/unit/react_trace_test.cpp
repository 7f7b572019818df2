#include "agentbench/react_trace.hpp"

#include <random>

#include <gtest/gtest.h>

#include "generators.hpp"

using namespace agentbench;

TEST(ParseStep, ExtractsAllThreeSections) {
    auto step = parse_step("Thought: need weather\nAction: get_weather\nAction Input: {\"city\": \"Paris\"}");
    ASSERT_TRUE(step);
    EXPECT_EQ(step->thought, "need weather");
    EXPECT_EQ(step->action, "get_weather");
    EXPECT_EQ(step->action_input, "{\"city\": \"Paris\"}");
    EXPECT_FALSE(step->observation);
}

TEST(ParseStep, ThoughtIsOptional) {
    auto step = parse_step(
        "Action: Finish\nAction Input: {\"return_type\": \"give_answer\", \"final_answer\": \"42\"}");
    ASSERT_TRUE(step);
    EXPECT_EQ(step->thought, "");
    EXPECT_TRUE(step->is_finish());
}

TEST(ParseStep, MissingActionLabel) {
    auto step = parse_step("Thought: hmm no action follows");
    ASSERT_FALSE(step);
    EXPECT_EQ(step.error().kind, StepParseErrorKind::MissingAction);
}

TEST(ParseStep, MissingActionInputLabel) {
    auto step = parse_step("Thought: x\nAction: get_weather\n");
    ASSERT_FALSE(step);
    EXPECT_EQ(step.error().kind, StepParseErrorKind::MissingActionInput);
}

TEST(ParseStep, ActionInputMustPrecedeNextThought) {
    auto step = parse_step("Action: a\nThought: second\nAction Input: {}");
    ASSERT_FALSE(step);
    EXPECT_EQ(step.error().kind, StepParseErrorKind::MissingActionInput);
}

TEST(ParseStep, LabelsAreCaseSensitiveAndLineAnchored) {
    EXPECT_EQ(parse_step("action: a\nAction Input: {}").error().kind, StepParseErrorKind::MissingAction);
    EXPECT_EQ(parse_step("Thought: see Action: a\nAction Input: {}").error().kind,
              StepParseErrorKind::MissingAction);
    EXPECT_EQ(parse_step(" Action: a\nAction Input: {}").error().kind, StepParseErrorKind::MissingAction);
}

TEST(ParseStep, RejectsBadActionTokens) {
    EXPECT_EQ(parse_step("Action:   \nAction Input: {}").error().kind, StepParseErrorKind::InvalidAction);
    EXPECT_EQ(parse_step("Action: get weather\nAction Input: {}").error().kind,
              StepParseErrorKind::InvalidAction);
}

TEST(ParseStep, ActionIsTrimmed) {
    auto step = parse_step("Action:   lookup \t\nAction Input: {}");
    ASSERT_TRUE(step);
    EXPECT_EQ(step->action, "lookup");
}

TEST(ParseStep, StopsAtNextThought) {
    auto step = parse_step("Thought: a\nAction: t\nAction Input: {\"x\":\n 1}\nThought: next\nAction: u\nAction Input: {}");
    ASSERT_TRUE(step);
    EXPECT_EQ(step->action, "t");
    EXPECT_EQ(step->action_input, "{\"x\":\n 1}");
}

TEST(ParseStep, IgnoresPreamble) {
    auto step = parse_step("Sure! Here is my step.\nThought: x\nAction: t\nAction Input: {}");
    ASSERT_TRUE(step);
    EXPECT_EQ(step->thought, "x");
}

TEST(RenderStep, CanonicalForm) {
    ReActStep s{"x", "a", "{}", std::nullopt};
    EXPECT_EQ(render_step(s), "Thought: x\nAction: a\nAction Input: {}");
    s.observation = "ok";
    EXPECT_EQ(render_step(s), "Thought: x\nAction: a\nAction Input: {}\nObservation: ok");
}

TEST(RenderStep, ObservationSurvivesParse) {
    ReActStep s{"x", "a", "{}", "ok"};
    auto parsed = parse_step(render_step(s));
    ASSERT_TRUE(parsed);
    EXPECT_EQ(*parsed, s);
}

TEST(RenderStep, RoundTripProperty) {
    std::mt19937_64 rng(20240611);
    std::size_t with_empty_thought = 0, with_multiline_input = 0, with_unicode = 0;
    for (int i = 0; i < 500; ++i) {
        const auto s = agentbench::testing::random_well_formed_step(rng);
        with_empty_thought += s.thought.empty();
        with_multiline_input += s.action_input.find('\n') != std::string::npos;
        with_unicode += std::any_of(s.thought.begin(), s.thought.end(),
                                    [](char c) { return static_cast<unsigned char>(c) >= 0x80; });
        const auto text = render_step(s);
        auto parsed = parse_step(text);
        ASSERT_TRUE(parsed) << text;
        ASSERT_EQ(*parsed, s) << text;
        // Canonical text is a fixed point.
        EXPECT_EQ(render_step(*parsed), text);
    }
    EXPECT_GT(with_empty_thought, 0u);
    EXPECT_GT(with_multiline_input, 0u);
    EXPECT_GT(with_unicode, 0u);
}

TEST(RenderStep, CanonicalizationIsIdempotentOnArbitraryInput) {
    std::mt19937_64 rng(7);
    int parsed_count = 0;
    for (int i = 0; i < 2000; ++i) {
        std::string text = agentbench::testing::random_text(rng, 6) + "\nAction: " + agentbench::testing::random_token(rng) +
                           "\nAction Input: " + agentbench::testing::random_text(rng, 6);
        if (rng() % 2) text = "Thought: " + agentbench::testing::random_text(rng, 6) + "\n" + text;
        auto first = parse_step(text);
        if (!first) continue;
        ++parsed_count;
        const auto canonical = render_step(*first);
        auto second = parse_step(canonical);
        ASSERT_TRUE(second) << canonical;
        EXPECT_EQ(render_step(*second), canonical);
    }
    EXPECT_GT(parsed_count, 100);
}

TEST(ParseTrace, EmptyText) {
    auto steps = parse_trace("");
    ASSERT_TRUE(steps);
    EXPECT_TRUE(steps->empty());
}

TEST(ParseTrace, TwoRenderedSteps) {
    std::vector<ReActStep> in = {{"first", "t1", "{\"a\": 1}", "r1"}, {"", "Finish", "{}", std::nullopt}};
    auto steps = parse_trace(render_trace(in));
    ASSERT_TRUE(steps);
    EXPECT_EQ(*steps, in);
}

TEST(ParseTrace, LengthMatchesStepCountProperty) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
        std::vector<ReActStep> in(rng() % 6);
        for (auto& s : in) s = agentbench::testing::random_well_formed_step(rng);
        auto out = parse_trace(render_trace(in));
        ASSERT_TRUE(out);
        ASSERT_EQ(out->size(), in.size());
        EXPECT_EQ(*out, in);
    }
}

TEST(ParseTrace, ReportsIndexOfCorruptStep) {
    ReActStep good{"ok", "t1", "{}", "fine"};
    // Second step is a rendered step with its Action Input line cut off.
    auto corrupted = render_step({"broken", "t2", "{}", std::nullopt});
    corrupted = corrupted.substr(0, corrupted.find("\nAction Input:"));
    auto result = parse_trace(render_step(good) + "\n" + corrupted);
    ASSERT_FALSE(result);
    EXPECT_EQ(result.error().step_index, 1u);
    EXPECT_EQ(result.error().error.kind, StepParseErrorKind::MissingActionInput);

    auto garbage = parse_trace(render_step(good) + "\nThought: garbage without any action");
    ASSERT_FALSE(garbage);
    EXPECT_EQ(garbage.error().step_index, 1u);
    EXPECT_EQ(garbage.error().error.kind, StepParseErrorKind::MissingAction);
}

TEST(ParseTrace, SplitsOnActionWithoutThought) {
    auto steps = parse_trace("Action: a\nAction Input: {}\nAction: b\nAction Input: {}");
    ASSERT_TRUE(steps);
    ASSERT_EQ(steps->size(), 2u);
    EXPECT_EQ((*steps)[1].action, "b");
}

TEST(Finish, ParsesPayload) {
    auto p = parse_finish(R"({"return_type": "give_answer", "final_answer": "42"})");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->return_type, ReturnType::GiveAnswer);
    EXPECT_EQ(p->final_answer, "42");

    auto g = parse_finish(R"({"return_type": "give_up_and_restart"})");
    ASSERT_TRUE(g);
    EXPECT_EQ(g->return_type, ReturnType::GiveUpAndRestart);
    EXPECT_FALSE(g->final_answer);
}

TEST(Finish, RejectsBadPayloads) {
    EXPECT_FALSE(parse_finish("not json"));
    EXPECT_FALSE(parse_finish("[]"));
    EXPECT_FALSE(parse_finish(R"({"final_answer": "x"})"));
    EXPECT_FALSE(parse_finish(R"({"return_type": "maybe"})"));
    EXPECT_FALSE(parse_finish(R"({"return_type": "give_answer", "final_answer": 3})"));
}

TEST(Finish, MakeInputRoundTrips) {
    auto p = parse_finish(make_finish_input(ReturnType::GiveAnswer, "héllo"));
    ASSERT_TRUE(p);
    EXPECT_EQ(p->final_answer, "héllo");
}
