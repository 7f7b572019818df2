#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "agentbench/agent_runtime.hpp"
#include "agentbench/expected.hpp"
#include "agentbench/model_gateway.hpp"
#include "agentbench/react_trace.hpp"

namespace agentbench {

// ---------------------------------------------------------------------------
// Rates and rendering
// ---------------------------------------------------------------------------

/// Rounds a percentage to integer hundredths, half away from zero. A relative
/// slack of 1e-9 absorbs binary representation error (77.55 is stored as
/// 77.5499999...).
std::int64_t to_hundredths(double percent);
/// "77.55", "-47.37", "0.00"
std::string format_hundredths(std::int64_t hundredths);
std::string format_2dp(double percent);
/// Category cells: one decimal, half away from zero.
std::string format_1dp(double percent);
/// One decimal taken from an already 2dp-rounded figure (77.55 -> 77.6).
std::string format_1dp_from_hundredths(std::int64_t hundredths);

// ---------------------------------------------------------------------------
// Verdicts and majority voting
// ---------------------------------------------------------------------------

struct VotePolicy {
    std::size_t min_rounds = 5;
    std::size_t max_rounds = 7;
};

struct Verdict {
    std::string query_id;
    std::vector<bool> votes;  // true = pass, only the rounds used
    bool pass = false;
    std::size_t rounds_used = 0;
    bool flagged = false;  // some round came from an unparseable judge reply

    bool operator==(const Verdict&) const = default;
};

/// Counts the first min_rounds results; on a tie, extends one round at a time
/// while results and max_rounds allow. A tie that survives is a fail.
/// Throws std::invalid_argument when fewer than min_rounds results are given.
Verdict majority_vote(const std::vector<bool>& round_results, const VotePolicy& policy);

struct RoundResult {
    bool pass = false;
    bool unparseable = false;
};

class PassJudge {
public:
    virtual ~PassJudge() = default;
    /// One judging round. `round` distinguishes repeated rounds on the same path.
    virtual RoundResult judge(const SolutionPath& path, const BenchmarkQuery& query,
                              std::size_t round) = 0;
    virtual std::string mode() const = 0;
};

/// Deterministic: pass iff the path finished with a non-empty answer and every
/// expected tool was dispatched successfully at least once.
class RuleJudge final : public PassJudge {
public:
    RoundResult judge(const SolutionPath& path, const BenchmarkQuery& query,
                      std::size_t round) override;
    std::string mode() const override { return "rule"; }
};

bool rule_pass(const SolutionPath& path, const BenchmarkQuery& query);

/// Asks a completion backend for a PASS/FAIL token.
class ModelJudge final : public PassJudge {
public:
    explicit ModelJudge(CompletionBackend& backend, GenerationParams params = {});
    RoundResult judge(const SolutionPath& path, const BenchmarkQuery& query,
                      std::size_t round) override;
    std::string mode() const override { return "model:" + backend_.identity(); }

private:
    CompletionBackend& backend_;
    GenerationParams params_;
};

std::string pass_judge_prompt(const SolutionPath& path, const BenchmarkQuery& query);

/// First standalone PASS or FAIL token in `reply`.
std::optional<bool> parse_pass_token(std::string_view reply);

/// Runs min_rounds, then extra rounds while tied and below max_rounds.
Verdict judge_with_votes(PassJudge& judge, const SolutionPath& path, const BenchmarkQuery& query,
                         const VotePolicy& policy);

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct ConfidenceInterval {
    double low = 0;
    double high = 0;
};

inline constexpr double kWilsonZ95 = 1.959964;

/// Wilson score interval in percent. Exactly 0 / 100 at the boundaries.
/// Requires n >= 1 and n_pass <= n.
ConfidenceInterval confidence_interval(std::size_t n_pass, std::size_t n);

struct CategoryStats {
    Category category = Category::G1Instruction;
    std::size_t n_queries = 0;
    std::size_t n_pass = 0;
    double pass_rate = 0;
    double ci_low = 0;
    double ci_high = 0;

    static CategoryStats from_counts(Category category, std::size_t n_pass, std::size_t n_queries);
    bool operator==(const CategoryStats&) const = default;
};

struct CategoryRate {
    double pass_rate = 0;
    std::size_t n_queries = 0;
};

struct MissingCategory {
    Category category;
};

/// Query-count-weighted mean over all six categories.
Expected<double, MissingCategory> aggregate_pass_rate(const std::map<Category, CategoryRate>& rates);

/// model - reference in hundredths of a point, each side first rounded to 2 decimals.
std::int64_t gap_vs(double model_rate, double reference_rate);

// ---------------------------------------------------------------------------
// Win rate
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& default_rubric_criteria() {
    static const std::vector<std::string> criteria = {
        "information richness",    "factual accuracy",          "reasoning quality",
        "milestone achievement",   "API exploration efficiency", "cost-effectiveness",
    };
    return criteria;
}

struct JudgeRubric {
    std::vector<std::string> criteria = default_rubric_criteria();

    /// True when each of the six criteria appears exactly once.
    bool valid() const;
};

enum class Winner { A, B, Tie };

std::string_view to_string(Winner w);

struct WinOutcome {
    Winner winner = Winner::Tie;
    bool swapped = false;  // model judge saw b first
    bool flagged = false;  // unparseable reply, counted as tie
};

/// Rule comparison: pass beats fail, then fewer API calls, else tie.
Winner compare_win_rule(const SolutionPath& a, const SolutionPath& b, const BenchmarkQuery& query);

/// Model comparison. The presentation order is drawn from `seed`.
WinOutcome compare_win_model(const SolutionPath& a, const SolutionPath& b,
                             const BenchmarkQuery& query, const JudgeRubric& rubric,
                             CompletionBackend& backend, std::uint64_t seed,
                             const GenerationParams& params = {});

std::optional<Winner> parse_win_token(std::string_view reply);

struct WinRateComparison {
    std::string model_a;
    std::string model_b;
    std::size_t wins_a = 0;
    std::size_t wins_b = 0;
    std::size_t ties = 0;
    double win_rate_a = 0;  // percent, ties count half
};

WinRateComparison win_rate(std::string model_a, std::string model_b,
                           const std::vector<Winner>& outcomes);

// ---------------------------------------------------------------------------
// Logs
// ---------------------------------------------------------------------------

nlohmann::json verdict_log_entry(const Verdict& verdict, Category category,
                                 std::string_view judge_mode);
nlohmann::json comparison_log_entry(std::string_view query_id, Category category,
                                    const WinOutcome& outcome, std::string_view judge_mode);

}  // namespace agentbench
