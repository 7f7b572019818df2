// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "agentbench/agent_runtime.hpp"
#include "agentbench/bench_runner.hpp"
#include "agentbench/dataset_forge.hpp"
#include "agentbench/react_trace.hpp"
#include "agentbench/report.hpp"
#include "agentbench/tooleval.hpp"
#include "desk_fixture.hpp"
#include "generators.hpp"
#include "vote_algebra.hpp"

using namespace agentbench;

namespace {

// Pinned tolerances.
constexpr double kWeightedMeanTolerance = 0.005;
constexpr double kWilsonTolerance = 1e-6;

// Independent Wilson evaluation (mpmath, 50 digits) for 155 of 200 at z = 1.959964.
constexpr double kWilsonLow155 = 71.2258767114;
constexpr double kWilsonHigh155 = 82.7376303218;

constexpr int kAgentScripts = 1000;
constexpr int kRoundTripSteps = 500;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::map<Category, CategoryRate> full_suite_rates(const BaselineEntry& e) {
    std::map<Category, CategoryRate> out;
    for (auto c : kAllCategories) out[c] = {e.rates.at(c), full_suite_count(c)};
    return out;
}

Outcome table_arithmetic() {
    Outcome o;
    const auto& table = BaselineTable::bundled();
    const std::vector<std::pair<std::string, double>> overall = {
        {"Our SLM", 77.55}, {"ToolLLaMA-DFS", 30.18}, {"ChatGPT-CoT", 26.00},
        {"ToolLLaMA-CoT", 16.27}, {"Claude-CoT", 2.73},
    };
    for (const auto& [model, expected] : overall) {
        const auto* e = table.find(model);
        if (!e) {
            o.fail("missing baseline " + model);
            continue;
        }
        auto mean = aggregate_pass_rate(full_suite_rates(*e));
        if (!mean || std::abs(*mean - expected) > kWeightedMeanTolerance) {
            o.fail(model + " weighted mean off");
        }
    }
    const auto ours = *aggregate_pass_rate(full_suite_rates(*table.find("Our SLM")));
    const std::vector<std::pair<std::string, std::string>> gaps = {
        {"ToolLLaMA-DFS", "-47.37"}, {"ChatGPT-CoT", "-51.55"},
        {"ToolLLaMA-CoT", "-61.28"}, {"Claude-CoT", "-74.82"},
    };
    for (const auto& [model, expected] : gaps) {
        const auto other = *aggregate_pass_rate(full_suite_rates(*table.find(model)));
        const auto got = format_hundredths(gap_vs(other, ours));
        if (got != expected) o.fail(model + " gap " + got + " != " + expected);
    }
    if (o.pass) o.detail = "overall 77.55/30.18/26.00/16.27/2.73 within 0.005; gaps exact";
    return o;
}

Outcome step_arithmetic() {
    Outcome o;
    auto steps = compute_training_steps(187542, 32, 1);
    if (!steps || *steps != 5860) o.fail("compute_training_steps(187542, 32, 1) != 5860");
    if (o.pass) o.detail = "187542 examples, batch 32, 1 epoch -> 5860 steps";
    return o;
}

std::string random_completion(std::mt19937_64& rng) {
    using namespace agentbench::testing;
    switch (rng() % 8) {
        case 0: return finish_answer(random_text(rng, 4));
        case 1: return finish_give_up();
        case 2: return random_text(rng, 6);
        case 3: return tool_call("get_weather", {{"city", random_token(rng)}});
        case 4: return tool_call(random_token(rng), {{"x", 1}});
        case 5: return tool_call("get_weather", {{"city", 7}});
        case 6: return render_step(random_well_formed_step(rng));
        default: return "Thought: t\nAction: get_weather\nAction Input: " + random_text(rng, 5);
    }
}

Outcome agent_budget() {
    Outcome o;
    const auto registry = testing::desk_registry();
    const BenchmarkQuery query{"q", Category::G1Instruction, "Weather?", {"get_weather"}, {"get_weather"}};
    const AgentConfig config;  // 10 iterations
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < kAgentScripts && o.pass; ++trial) {
        std::vector<std::string> script(rng() % 16);
        for (auto& c : script) c = random_completion(rng);
        ReplayBackend backend(script);
        const auto path = run_query(query, registry, backend, config).path;
        const auto where = "script " + std::to_string(trial) + ": ";

        if (path.steps.size() > config.max_iterations) o.fail(where + "step bound");
        std::size_t non_finish = 0;
        for (std::size_t i = 0; i < path.steps.size(); ++i) {
            const auto& s = path.steps[i];
            if (s.is_finish()) {
                if (i + 1 != path.steps.size()) o.fail(where + "Finish not last");
            } else {
                ++non_finish;
                if (!s.observation) o.fail(where + "observation closure");
            }
        }
        if (path.api_calls_used != non_finish) o.fail(where + "api_calls_used accounting");

        const bool last_finish = !path.steps.empty() && path.steps.back().is_finish();
        bool gave_answer = false;
        if (last_finish) {
            auto payload = parse_finish(path.steps.back().action_input);
            gave_answer = payload && payload->return_type == ReturnType::GiveAnswer;
        }
        switch (path.status) {
            case PathStatus::FinishedWithAnswer:
                if (!gave_answer) o.fail(where + "FinishedWithAnswer without give_answer");
                break;
            case PathStatus::GaveUp:
                if (!last_finish || gave_answer) o.fail(where + "GaveUp without give-up Finish");
                break;
            case PathStatus::BudgetExhausted:
            case PathStatus::ParseFailure:
                if (last_finish) o.fail(where + "Finish step with non-Finish status");
                break;
        }
    }

    std::vector<std::string> ten(10, testing::tool_call("get_weather", {{"city", "Oslo"}}));
    ten.push_back(testing::finish_answer("too late"));
    ReplayBackend backend(ten);
    const auto boundary = run_query(query, registry, backend, config).path;
    if (boundary.steps.size() != 10 || boundary.status != PathStatus::BudgetExhausted ||
        boundary.api_calls_used != 10) {
        o.fail("10-step boundary script did not end BudgetExhausted at 10 steps");
    }
    if (o.pass) o.detail = std::to_string(kAgentScripts) + " random scripts; 10-step boundary";
    return o;
}

Outcome parser_round_trip() {
    Outcome o;
    std::mt19937_64 rng(77);
    int empty = 0, multiline = 0, unicode = 0;
    for (int i = 0; i < kRoundTripSteps; ++i) {
        auto step = testing::random_well_formed_step(rng);
        if (i % 10 == 0) step.thought.clear();
        if (i % 10 == 1) step.action_input = "{\n  \"city\": \"Paris\"\n}";
        if (i % 10 == 2) step.thought = "météo à 東京 🙂";
        if (!is_well_formed(step)) continue;
        empty += step.thought.empty();
        multiline += step.action_input.find('\n') != std::string::npos;
        unicode += std::any_of(step.thought.begin(), step.thought.end(),
                               [](char c) { return static_cast<unsigned char>(c) >= 0x80; });
        auto back = parse_step(render_step(step));
        if (!back || !(*back == step)) o.fail("round trip broke on step " + std::to_string(i));
    }
    if (empty == 0 || multiline == 0 || unicode == 0) o.fail("generator missed a required shape");

    const std::vector<std::pair<std::string, StepParseErrorKind>> malformed = {
        {"Thought: no action here", StepParseErrorKind::MissingAction},
        {"Thought: t\nAction Input: {}", StepParseErrorKind::MissingAction},
        {"thought: t\naction: x\naction input: {}", StepParseErrorKind::MissingAction},
        {"Thought: t\nAction: get_weather", StepParseErrorKind::MissingActionInput},
        {"Thought: t\nAction: get_weather\nObservation: x", StepParseErrorKind::MissingActionInput},
        {"Thought: t\nAction: \nAction Input: {}", StepParseErrorKind::InvalidAction},
        {"Thought: t\nAction: two words\nAction Input: {}", StepParseErrorKind::InvalidAction},
    };
    for (const auto& [text, kind] : malformed) {
        auto r = parse_step(text);
        if (r || r.error().kind != kind) o.fail("malformed corpus: wrong result for \"" + text + "\"");
    }
    if (o.pass) {
        o.detail = std::to_string(kRoundTripSteps) + " steps (" + std::to_string(empty) + " empty thoughts, " +
                   std::to_string(multiline) + " multi-line, " + std::to_string(unicode) +
                   " unicode); " + std::to_string(malformed.size()) + " malformed cases";
    }
    return o;
}

Outcome vote_algebra() {
    Outcome o;
    const auto problem = testing::check_vote_algebra(7);
    if (!problem.empty()) o.fail(problem);
    if (o.pass) o.detail = "all 254 vectors of length 1..7";
    return o;
}

Outcome desk_benchmark() {
    Outcome o;
    const auto suite = testing::desk_suite();
    const auto registry = testing::desk_registry();
    const auto replay = testing::desk_replay();
    auto run = [&](std::size_t workers) {
        RuleJudge judge;
        RunOptions options;
        options.workers = workers;
        options.seed = 1;
        options.model = "desk-agent";
        options.backend_identity = "replay:desk";
        BackendFactory factory = [&](const BenchmarkQuery& q) {
            return std::shared_ptr<CompletionBackend>(replay.backend_for(q.id));
        };
        return run_suite(suite, registry, factory, judge, options).report;
    };
    const auto first = run(1);
    for (auto c : kAllCategories) {
        const auto* s = first.find(c);
        if (!s || format_1dp(s->pass_rate) != "80.0") o.fail(std::string(to_string(c)) + " != 80");
    }
    if (format_2dp(first.overall) != "80.00") o.fail("overall " + format_2dp(first.overall));
    const auto bytes = emit_report(first, ReportFormat::Json) + emit_report(first, ReportFormat::Markdown);
    auto same = [&](const RunReport& r) {
        return emit_report(r, ReportFormat::Json) + emit_report(r, ReportFormat::Markdown) == bytes;
    };
    if (!same(run(1))) o.fail("repeated run differs");
    if (!same(run(4))) o.fail("4 workers differ from 1");
    if (o.pass) o.detail = "55 queries, 80.0 in all six categories, overall 80.00, identical for 1/1/4 workers";
    return o;
}

Outcome wilson() {
    Outcome o;
    for (std::size_t n : {1u, 10u, 200u}) {
        if (confidence_interval(0, n).low != 0.0) o.fail("(0," + std::to_string(n) + ") low != 0");
        if (confidence_interval(n, n).high != 100.0) o.fail("(n,n) high != 100");
    }
    const auto ci = confidence_interval(155, 200);
    if (std::abs(ci.low - kWilsonLow155) > kWilsonTolerance ||
        std::abs(ci.high - kWilsonHigh155) > kWilsonTolerance) {
        o.fail("(155,200) outside 1e-6 of the frozen oracle");
    }
    if (o.pass) o.detail = "boundaries exact; (155,200) within 1e-6";
    return o;
}

Outcome headline_not_reproducible() {
    Outcome o;
    // The fine-tuned model's 77.55% on 1,100 live queries with a model judge cannot
    // be rerun offline. What is checked instead: the bundled baseline table
    // regenerates the published comparison exactly.
    const auto& table = BaselineTable::bundled();
    const auto* ours = table.find("Our SLM");
    if (!ours) {
        o.fail("bundled table lacks the fine-tuned model row");
        return o;
    }
    const auto report = report_from_baseline(*ours, table);
    const auto md = emit_report(report, ReportFormat::Markdown);
    for (const auto* cell : {"| Our SLM | 350M | 77.55% | -- |", "| ToolLLaMA-DFS | 7B | 30.18% | -47.37% |",
                             "| ChatGPT-CoT | 175B | 26.00% | -51.55% |", "| ToolLLaMA-CoT | 7B | 16.27% | -61.28% |",
                             "| Claude-CoT | 52B | 2.73% | -74.82% |", "| Avg | 77.6 | 30.2 | 26.0 | 16.3 | 2.7 |"}) {
        if (md.find(cell) == std::string::npos) o.fail(std::string("report lacks ") + cell);
    }
    std::vector<RunReport> all;
    for (const auto& e : table.entries) all.push_back(report_from_baseline(e));
    const auto radar = emit_radar_data(all);
    if (std::count(radar.begin(), radar.end(), '\n') != 31) o.fail("radar data is not 30 rows");
    if (o.pass) {
        o.detail = "headline 77.55% NOT reproducible at desk scale (fine-tuned 350M model, 1,100 live "
                   "queries, model judge); baseline-fixture regression reproduces the published tables";
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"table-arithmetic", table_arithmetic},
        {"step-arithmetic", step_arithmetic},
        {"agent-loop-budget", agent_budget},
        {"parser-round-trip", parser_round_trip},
        {"vote-algebra", vote_algebra},
        {"desk-benchmark", desk_benchmark},
        {"wilson-ci", wilson},
        {"headline-not-reproducible", headline_not_reproducible},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failures += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
