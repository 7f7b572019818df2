#include "agentbench/bench_runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "agentbench/errors.hpp"
#include "agentbench/report.hpp"

namespace agentbench {

using json = nlohmann::json;

namespace {

std::string dump_line(const json& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

json read_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open ") + what + " " + path);
    auto doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ValidationError(std::string(what) + " is not valid JSON: " + path);
    return doc;
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& where) {
    std::vector<std::string> out;
    auto it = obj.find(key);
    if (it == obj.end()) return out;
    if (!it->is_array()) throw ValidationError(where + ": " + key + " must be an array");
    for (const auto& v : *it) {
        if (!v.is_string()) throw ValidationError(where + ": " + key + " must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void write_lines(const std::filesystem::path& file, const std::vector<json>& rows) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    for (const auto& row : rows) out << dump_line(row) << '\n';
    out.flush();
    if (!out) throw IoError("write failed for " + file.string());
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace

std::size_t BenchmarkSuite::query_count() const {
    std::size_t n = 0;
    for (const auto& c : categories) n += c.queries.size();
    return n;
}

std::vector<const BenchmarkQuery*> BenchmarkSuite::flatten() const {
    std::vector<const BenchmarkQuery*> out;
    for (const auto& c : categories) {
        for (const auto& q : c.queries) out.push_back(&q);
    }
    return out;
}

BenchmarkSuite BenchmarkSuite::from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("suite must be a JSON object");
    BenchmarkSuite suite;
    suite.label = doc.value("label", "");
    auto cats = doc.find("categories");
    if (cats == doc.end() || !cats->is_array()) {
        throw ValidationError("suite lacks a \"categories\" array");
    }
    for (const auto& c : *cats) {
        if (!c.is_object() || !c.contains("category") || !c["category"].is_string()) {
            throw ValidationError("suite category entry needs a \"category\" name");
        }
        const auto name = c["category"].get<std::string>();
        auto category = category_from_string(name);
        if (!category) throw ValidationError("unknown category " + name);
        CategorySpec spec;
        spec.category = *category;
        for (const auto& q : c.value("queries", json::array())) {
            if (!q.is_object() || !q.contains("id") || !q["id"].is_string() ||
                !q.contains("instruction") || !q["instruction"].is_string()) {
                throw ValidationError("query in " + name + " needs string id and instruction");
            }
            BenchmarkQuery query;
            query.id = q["id"].get<std::string>();
            query.category = *category;
            query.instruction = q["instruction"].get<std::string>();
            query.relevant_tools = string_list(q, "relevant_tools", query.id);
            query.expected_tools = string_list(q, "expected_tools", query.id);
            spec.queries.push_back(std::move(query));
        }
        suite.categories.push_back(std::move(spec));
    }
    return suite;
}

BenchmarkSuite BenchmarkSuite::load(const std::string& path) {
    return from_json(read_json_file(path, "suite file"));
}

json BenchmarkSuite::to_json() const {
    json cats = json::array();
    for (const auto& c : categories) {
        json queries = json::array();
        for (const auto& q : c.queries) {
            queries.push_back({{"id", q.id},
                               {"instruction", q.instruction},
                               {"relevant_tools", q.relevant_tools},
                               {"expected_tools", q.expected_tools}});
        }
        cats.push_back({{"category", to_string(c.category)}, {"queries", std::move(queries)}});
    }
    return {{"label", label}, {"categories", std::move(cats)}};
}

void validate_suite(const BenchmarkSuite& suite, const ToolRegistry& registry) {
    std::set<Category> seen;
    std::set<std::string> ids;
    for (const auto& c : suite.categories) {
        const auto name = std::string(to_string(c.category));
        if (!seen.insert(c.category).second) throw ValidationError("category listed twice: " + name);
        if (c.queries.empty()) throw ValidationError("category has no queries: " + name);
        for (const auto& q : c.queries) {
            if (!ids.insert(q.id).second) throw ValidationError("duplicate query id " + q.id);
            for (const auto* list : {&q.relevant_tools, &q.expected_tools}) {
                for (const auto& tool : *list) {
                    if (!registry.find(tool)) {
                        throw ValidationError("query " + q.id + " names unregistered tool " + tool);
                    }
                }
            }
        }
    }
    for (auto c : kAllCategories) {
        if (!seen.contains(c)) {
            throw ValidationError("suite lacks category " + std::string(to_string(c)));
        }
    }
}

double BaselineEntry::overall() const {
    std::map<Category, CategoryRate> weighted;
    for (const auto& [c, rate] : rates) weighted[c] = {rate, full_suite_count(c)};
    auto result = aggregate_pass_rate(weighted);
    if (!result) {
        throw ValidationError(model + " lacks rate for " +
                              std::string(to_string(result.error().category)));
    }
    return *result;
}

const BaselineEntry* BaselineTable::find(const std::string& model) const {
    for (const auto& e : entries) {
        if (e.model == model) return &e;
    }
    return nullptr;
}

BaselineTable BaselineTable::from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("baseline table must be a JSON object");
    BaselineTable table;
    for (const auto& [model, body] : doc.items()) {
        if (!body.is_object() || !body.contains("rates") || !body["rates"].is_object()) {
            throw ValidationError("baseline " + model + " needs a \"rates\" object");
        }
        BaselineEntry entry;
        entry.model = model;
        entry.params = body.value("params", "");
        entry.fine_tuned = body.value("fine_tuned", false);
        for (const auto& [name, rate] : body["rates"].items()) {
            auto c = category_from_string(name);
            if (!c || !rate.is_number()) {
                throw ValidationError("baseline " + model + ": bad rate entry " + name);
            }
            entry.rates[*c] = rate.get<double>();
        }
        entry.overall();  // all six present
        table.entries.push_back(std::move(entry));
    }
    std::stable_sort(table.entries.begin(), table.entries.end(),
                     [](const BaselineEntry& a, const BaselineEntry& b) {
                         const auto ra = to_hundredths(a.overall());
                         const auto rb = to_hundredths(b.overall());
                         return ra != rb ? ra > rb : a.model < b.model;
                     });
    return table;
}

BaselineTable BaselineTable::load(const std::string& path) {
    return from_json(read_json_file(path, "baseline table"));
}

const BaselineTable& BaselineTable::bundled() {
    static const BaselineTable table = from_json(json::parse(bundled_baselines_json()));
    return table;
}

const CategoryStats* RunReport::find(Category c) const {
    for (const auto& s : categories) {
        if (s.category == c) return &s;
    }
    return nullptr;
}

RunReport assemble_report(std::string label, std::string model, std::string params,
                          std::vector<CategoryStats> categories, const BaselineTable& baselines,
                          RunMetadata metadata) {
    RunReport report;
    report.label = std::move(label);
    report.model = std::move(model);
    report.params = std::move(params);
    std::sort(categories.begin(), categories.end(),
              [](const CategoryStats& a, const CategoryStats& b) { return a.category < b.category; });
    report.categories = std::move(categories);

    std::map<Category, CategoryRate> rates;
    for (const auto& s : report.categories) rates[s.category] = {s.pass_rate, s.n_queries};
    auto overall = aggregate_pass_rate(rates);
    if (!overall) {
        throw ValidationError("report lacks category " +
                              std::string(to_string(overall.error().category)));
    }
    report.overall = *overall;

    for (const auto& e : baselines.entries) {
        if (e.model == report.model) continue;
        BaselineRow row;
        row.model = e.model;
        row.params = e.params;
        row.rates = e.rates;
        row.overall = e.overall();
        row.gap_hundredths = gap_vs(row.overall, report.overall);
        report.baselines.push_back(std::move(row));
    }
    report.metadata = std::move(metadata);
    return report;
}

RunReport report_from_baseline(const BaselineEntry& entry, const BaselineTable& others) {
    std::vector<CategoryStats> stats;
    for (auto c : kAllCategories) {
        const auto n = full_suite_count(c);
        const auto rate = entry.rates.at(c);
        const auto passes = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n) / 100.0));
        stats.push_back(CategoryStats::from_counts(c, passes, n));
    }
    return assemble_report("published", entry.model, entry.params, std::move(stats),
                           others, RunMetadata{"published", "published", 0, {}, 10, 0.1});
}

std::uint64_t derive_query_seed(std::uint64_t run_seed, std::string_view query_id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : query_id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(run_seed ^ h);
}

RunResult run_suite(const BenchmarkSuite& suite, const ToolRegistry& registry,
                    const BackendFactory& backends, PassJudge& judge, const RunOptions& options) {
    validate_suite(suite, registry);
    if (options.workers == 0) throw ValidationError("worker count must be >= 1");
    if (options.agent.max_iterations == 0) throw ValidationError("max_iterations must be >= 1");

    const auto queries = suite.flatten();
    std::vector<QueryRun> runs(queries.size());
    std::vector<Verdict> verdicts(queries.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1)) {
            const auto& query = *queries[i];
            try {
                auto backend = backends(query);
                runs[i] = run_query(query, registry, *backend, options.agent);
            } catch (const std::exception& e) {
                runs[i] = QueryRun{};
                runs[i].path.query_id = query.id;
                runs[i].path.status = PathStatus::BudgetExhausted;
                runs[i].path.termination_note = std::string("query aborted: ") + e.what();
            }
            try {
                verdicts[i] = judge_with_votes(judge, runs[i].path, query, options.votes);
            } catch (const std::exception&) {
                verdicts[i] = Verdict{query.id, {}, false, 0, true};
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto n = std::min(options.workers, std::max<std::size_t>(queries.size(), 1));
        for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
    }

    std::map<Category, std::pair<std::size_t, std::size_t>> counts;  // (pass, total)
    for (std::size_t i = 0; i < queries.size(); ++i) {
        auto& c = counts[queries[i]->category];
        c.first += verdicts[i].pass;
        ++c.second;
    }
    std::vector<CategoryStats> stats;
    for (const auto& [category, c] : counts) {
        stats.push_back(CategoryStats::from_counts(category, c.first, c.second));
    }

    RunMetadata meta;
    meta.backend = options.backend_identity;
    meta.judge_mode = judge.mode();
    meta.seed = options.seed;
    meta.votes = options.votes;
    meta.max_iterations = options.agent.max_iterations;
    meta.temperature = options.agent.params.temperature;

    RunResult result;
    result.report = assemble_report(suite.label, options.model, options.params, std::move(stats),
                                    options.baselines, std::move(meta));
    for (std::size_t i = 0; i < queries.size(); ++i) {
        result.paths.push_back(std::move(runs[i].path));
        result.verdicts.push_back(verdicts[i]);
        for (auto& rec : runs[i].trace) result.trace.push_back(std::move(rec));
    }

    if (options.out_dir) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(*options.out_dir, ec);
        if (ec) throw IoError("cannot create " + options.out_dir->string() + ": " + ec.message());

        std::vector<json> rows;
        for (const auto& p : result.paths) rows.push_back(to_json(p));
        write_lines(*options.out_dir / "paths.jsonl", rows);
        rows.clear();
        for (const auto& t : result.trace) rows.push_back(to_json(t));
        write_lines(*options.out_dir / "traces.jsonl", rows);
        rows.clear();
        for (std::size_t i = 0; i < queries.size(); ++i) {
            rows.push_back(verdict_log_entry(result.verdicts[i], queries[i]->category, judge.mode()));
        }
        write_lines(*options.out_dir / "verdicts.jsonl", rows);

        const json manifest = {{"workers", options.workers},
                               {"seed", options.seed},
                               {"queries", queries.size()},
                               {"suite", suite.label},
                               {"backend", options.backend_identity},
                               {"judge_mode", judge.mode()}};
        write_text(*options.out_dir / "run_manifest.json", manifest.dump(2) + "\n");
        write_text(*options.out_dir / "report.json", emit_report(result.report, ReportFormat::Json));
    }
    return result;
}

ComparisonResult compare_runs(const BenchmarkSuite& suite, const std::string& model_a,
                              const std::vector<SolutionPath>& paths_a, const std::string& model_b,
                              const std::vector<SolutionPath>& paths_b,
                              CompletionBackend* judge_backend, std::uint64_t seed) {
    auto index = [](const std::vector<SolutionPath>& paths) {
        std::map<std::string, const SolutionPath*> m;
        for (const auto& p : paths) m[p.query_id] = &p;
        return m;
    };
    const auto by_id_a = index(paths_a);
    const auto by_id_b = index(paths_b);

    ComparisonResult result;
    std::vector<Winner> outcomes;
    const JudgeRubric rubric;
    const std::string mode = judge_backend ? "model:" + judge_backend->identity() : "rule";
    for (const auto* query : suite.flatten()) {
        auto a = by_id_a.find(query->id);
        auto b = by_id_b.find(query->id);
        if (a == by_id_a.end() || b == by_id_b.end()) {
            throw ValidationError("query " + query->id + " missing from one of the compared runs");
        }
        WinOutcome outcome;
        if (judge_backend) {
            outcome = compare_win_model(*a->second, *b->second, *query, rubric, *judge_backend,
                                        derive_query_seed(seed, query->id));
        } else {
            outcome.winner = compare_win_rule(*a->second, *b->second, *query);
        }
        outcomes.push_back(outcome.winner);
        result.log.push_back(comparison_log_entry(query->id, query->category, outcome, mode));
    }
    result.summary = win_rate(model_a, model_b, outcomes);
    return result;
}

}  // namespace agentbench
