#include "agentbench/tooleval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace agentbench {

using json = nlohmann::json;

namespace {

std::int64_t round_scaled(double scaled) {
    const double slack = std::max(1e-9, std::abs(scaled) * 1e-9);
    return std::llround(scaled >= 0 ? scaled + slack : scaled - slack);
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Position of the first standalone occurrence of any of `tokens`, with its index.
std::optional<std::size_t> first_token(std::string_view text,
                                       const std::vector<std::string_view>& tokens) {
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        if (pos > 0 && is_word_char(text[pos - 1])) continue;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            const auto tok = tokens[t];
            if (!text.substr(pos).starts_with(tok)) continue;
            const auto end = pos + tok.size();
            if (end < text.size() && is_word_char(text[end])) continue;
            return t;
        }
    }
    return std::nullopt;
}

std::string describe_path(const SolutionPath& path) {
    std::string out = render_trace(path.steps);
    out += "\nStatus: ";
    out += to_string(path.status);
    out += "\nFinal answer: ";
    out += path.final_answer.value_or("(none)");
    out += "\nAPI calls used: " + std::to_string(path.api_calls_used);
    return out;
}

}  // namespace

std::int64_t to_hundredths(double percent) { return round_scaled(percent * 100.0); }

std::string format_hundredths(std::int64_t hundredths) {
    const bool negative = hundredths < 0;
    const auto magnitude = static_cast<std::uint64_t>(negative ? -hundredths : hundredths);
    auto frac = std::to_string(magnitude % 100);
    if (frac.size() < 2) frac.insert(0, "0");
    return (negative ? "-" : "") + std::to_string(magnitude / 100) + "." + frac;
}

std::string format_2dp(double percent) { return format_hundredths(to_hundredths(percent)); }

namespace {
std::string format_tenths(std::int64_t tenths) {
    const bool negative = tenths < 0;
    const auto magnitude = static_cast<std::uint64_t>(negative ? -tenths : tenths);
    return (negative ? "-" : "") + std::to_string(magnitude / 10) + "." +
           std::to_string(magnitude % 10);
}
}  // namespace

std::string format_1dp(double percent) { return format_tenths(round_scaled(percent * 10.0)); }

std::string format_1dp_from_hundredths(std::int64_t hundredths) {
    const auto magnitude = hundredths < 0 ? -hundredths : hundredths;
    const auto tenths = (magnitude + 5) / 10;
    return format_tenths(hundredths < 0 ? -tenths : tenths);
}

Verdict majority_vote(const std::vector<bool>& round_results, const VotePolicy& policy) {
    if (policy.min_rounds == 0 || policy.max_rounds < policy.min_rounds) {
        throw std::invalid_argument("vote policy needs 1 <= min_rounds <= max_rounds");
    }
    if (round_results.size() < policy.min_rounds) {
        throw std::invalid_argument("majority_vote needs at least min_rounds results");
    }
    const auto limit = std::min(round_results.size(), policy.max_rounds);
    std::size_t used = policy.min_rounds;
    auto passes = [&](std::size_t n) {
        return static_cast<std::size_t>(
            std::count(round_results.begin(), round_results.begin() + n, true));
    };
    while (used < limit && 2 * passes(used) == used) ++used;

    Verdict v;
    v.votes.assign(round_results.begin(), round_results.begin() + used);
    v.rounds_used = used;
    const auto p = passes(used);
    v.pass = p > used - p;
    return v;
}

bool rule_pass(const SolutionPath& path, const BenchmarkQuery& query) {
    if (path.status != PathStatus::FinishedWithAnswer) return false;
    if (!path.final_answer || path.final_answer->empty()) return false;
    for (const auto& tool : query.expected_tools) {
        if (std::find(path.successful_actions.begin(), path.successful_actions.end(), tool) ==
            path.successful_actions.end()) {
            return false;
        }
    }
    return true;
}

RoundResult RuleJudge::judge(const SolutionPath& path, const BenchmarkQuery& query, std::size_t) {
    return {rule_pass(path, query), false};
}

ModelJudge::ModelJudge(CompletionBackend& backend, GenerationParams params)
    : backend_(backend), params_(std::move(params)) {}

std::string pass_judge_prompt(const SolutionPath& path, const BenchmarkQuery& query) {
    std::string out =
        "You are evaluating whether an assistant's solution path adequately addresses a user "
        "instruction using the available tools within the allowed API call budget. Giving up "
        "counts as not solved.\n\nInstruction: ";
    out += query.instruction;
    out += "\n\nSolution path:\n";
    out += describe_path(path);
    out += "\n\nReply with a single word: PASS if the instruction was solved, FAIL otherwise.\n";
    return out;
}

std::optional<bool> parse_pass_token(std::string_view reply) {
    auto t = first_token(reply, {"PASS", "FAIL"});
    if (!t) return std::nullopt;
    return *t == 0;
}

RoundResult ModelJudge::judge(const SolutionPath& path, const BenchmarkQuery& query, std::size_t) {
    auto completion = backend_.generate(pass_judge_prompt(path, query), params_);
    if (!completion || completion->finish_reason == FinishReason::BackendError) {
        return {false, true};
    }
    auto token = parse_pass_token(completion->text);
    if (!token) return {false, true};
    return {*token, false};
}

Verdict judge_with_votes(PassJudge& judge, const SolutionPath& path, const BenchmarkQuery& query,
                         const VotePolicy& policy) {
    std::vector<bool> votes;
    bool flagged = false;
    auto round = [&] {
        auto r = judge.judge(path, query, votes.size());
        flagged |= r.unparseable;
        votes.push_back(r.pass);
    };
    while (votes.size() < policy.min_rounds) round();
    while (votes.size() < policy.max_rounds &&
           2 * static_cast<std::size_t>(std::count(votes.begin(), votes.end(), true)) ==
               votes.size()) {
        round();
    }
    auto verdict = majority_vote(votes, policy);
    verdict.query_id = path.query_id;
    verdict.flagged = flagged;
    return verdict;
}

ConfidenceInterval confidence_interval(std::size_t n_pass, std::size_t n) {
    if (n == 0 || n_pass > n) throw std::invalid_argument("confidence_interval needs 0 <= n_pass <= n, n >= 1");
    const double z = kWilsonZ95;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(n_pass) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = (p + z * z / (2.0 * nn)) / denom;
    const double margin = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;

    const double rate = 100.0 * p;
    ConfidenceInterval ci{100.0 * (center - margin), 100.0 * (center + margin)};
    ci.low = n_pass == 0 ? 0.0 : std::clamp(ci.low, 0.0, rate);
    ci.high = n_pass == n ? 100.0 : std::clamp(ci.high, rate, 100.0);
    return ci;
}

CategoryStats CategoryStats::from_counts(Category category, std::size_t n_pass,
                                         std::size_t n_queries) {
    auto ci = confidence_interval(n_pass, n_queries);
    CategoryStats s;
    s.category = category;
    s.n_queries = n_queries;
    s.n_pass = n_pass;
    s.pass_rate = 100.0 * static_cast<double>(n_pass) / static_cast<double>(n_queries);
    s.ci_low = ci.low;
    s.ci_high = ci.high;
    return s;
}

Expected<double, MissingCategory> aggregate_pass_rate(const std::map<Category, CategoryRate>& rates) {
    double weighted = 0;
    double total = 0;
    for (auto c : kAllCategories) {
        auto it = rates.find(c);
        if (it == rates.end()) return unexpected(MissingCategory{c});
        weighted += it->second.pass_rate * static_cast<double>(it->second.n_queries);
        total += static_cast<double>(it->second.n_queries);
    }
    return total == 0 ? 0.0 : weighted / total;
}

std::int64_t gap_vs(double model_rate, double reference_rate) {
    return to_hundredths(model_rate) - to_hundredths(reference_rate);
}

bool JudgeRubric::valid() const {
    const auto& expected = default_rubric_criteria();
    if (criteria.size() != expected.size()) return false;
    for (const auto& name : expected) {
        if (std::count(criteria.begin(), criteria.end(), name) != 1) return false;
    }
    return true;
}

std::string_view to_string(Winner w) {
    switch (w) {
        case Winner::A: return "a";
        case Winner::B: return "b";
        case Winner::Tie: return "tie";
    }
    return "tie";
}

Winner compare_win_rule(const SolutionPath& a, const SolutionPath& b, const BenchmarkQuery& query) {
    const bool pass_a = rule_pass(a, query);
    const bool pass_b = rule_pass(b, query);
    if (pass_a != pass_b) return pass_a ? Winner::A : Winner::B;
    if (a.api_calls_used != b.api_calls_used) {
        return a.api_calls_used < b.api_calls_used ? Winner::A : Winner::B;
    }
    return Winner::Tie;
}

std::optional<Winner> parse_win_token(std::string_view reply) {
    auto t = first_token(reply, {"TIE", "A", "B"});
    if (!t) return std::nullopt;
    return *t == 0 ? Winner::Tie : (*t == 1 ? Winner::A : Winner::B);
}

WinOutcome compare_win_model(const SolutionPath& a, const SolutionPath& b,
                             const BenchmarkQuery& query, const JudgeRubric& rubric,
                             CompletionBackend& backend, std::uint64_t seed,
                             const GenerationParams& params) {
    WinOutcome outcome;
    std::mt19937_64 rng(seed);
    outcome.swapped = (rng() & 1) != 0;
    const auto& first = outcome.swapped ? b : a;
    const auto& second = outcome.swapped ? a : b;

    std::string prompt =
        "Compare two solution paths for the same instruction. Judge them on these criteria, "
        "in order:\n";
    for (const auto& c : rubric.criteria) prompt += "- " + c + "\n";
    prompt += "\nInstruction: " + query.instruction + "\n\nSolution A:\n" + describe_path(first) +
              "\n\nSolution B:\n" + describe_path(second) +
              "\n\nReply with a single token: A, B, or TIE.\n";

    auto completion = backend.generate(prompt, params);
    std::optional<Winner> token;
    if (completion && completion->finish_reason != FinishReason::BackendError) {
        token = parse_win_token(completion->text);
    }
    if (!token) {
        outcome.flagged = true;
        outcome.winner = Winner::Tie;
        return outcome;
    }
    outcome.winner = *token;
    if (outcome.swapped && *token != Winner::Tie) {
        outcome.winner = *token == Winner::A ? Winner::B : Winner::A;
    }
    return outcome;
}

WinRateComparison win_rate(std::string model_a, std::string model_b,
                           const std::vector<Winner>& outcomes) {
    WinRateComparison cmp;
    cmp.model_a = std::move(model_a);
    cmp.model_b = std::move(model_b);
    for (auto w : outcomes) {
        switch (w) {
            case Winner::A: ++cmp.wins_a; break;
            case Winner::B: ++cmp.wins_b; break;
            case Winner::Tie: ++cmp.ties; break;
        }
    }
    if (!outcomes.empty()) {
        cmp.win_rate_a = 100.0 * (static_cast<double>(cmp.wins_a) + 0.5 * static_cast<double>(cmp.ties)) /
                         static_cast<double>(outcomes.size());
    }
    return cmp;
}

json verdict_log_entry(const Verdict& verdict, Category category, std::string_view judge_mode) {
    json votes = json::array();
    for (bool v : verdict.votes) votes.push_back(v ? "pass" : "fail");
    return {{"query_id", verdict.query_id},
            {"category", to_string(category)},
            {"votes", std::move(votes)},
            {"decision", verdict.pass ? "pass" : "fail"},
            {"judge_mode", judge_mode},
            {"flagged", verdict.flagged}};
}

json comparison_log_entry(std::string_view query_id, Category category, const WinOutcome& outcome,
                          std::string_view judge_mode) {
    return {{"query_id", query_id},
            {"category", to_string(category)},
            {"winner", to_string(outcome.winner)},
            {"judge_mode", judge_mode},
            {"swapped", outcome.swapped},
            {"flagged", outcome.flagged}};
}

}  // namespace agentbench
