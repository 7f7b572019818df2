#include "agentbench/report.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "agentbench/errors.hpp"

namespace agentbench {

using json = nlohmann::json;

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string md_cell(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

std::string or_dash(const std::string& s) { return s.empty() ? "-" : s; }

std::string emit_markdown(const RunReport& r) {
    std::ostringstream md;
    md << "# " << md_cell(r.label.empty() ? "Benchmark run" : r.label) << "\n\n";

    md << "## Overall Performance Comparison\n\n";
    md << "| Model | Params | Pass Rate | Gap |\n";
    md << "|---|---|---|---|\n";
    md << "| " << md_cell(r.model) << " | " << md_cell(or_dash(r.params)) << " | "
       << format_2dp(r.overall) << "% | -- |\n";
    for (const auto& b : r.baselines) {
        md << "| " << md_cell(b.model) << " | " << md_cell(or_dash(b.params)) << " | "
           << format_2dp(b.overall) << "% | " << format_hundredths(b.gap_hundredths) << "% |\n";
    }

    md << "\n## Performance by Test Category\n\n";
    md << "| Category | " << md_cell(r.model);
    for (const auto& b : r.baselines) md << " | " << md_cell(b.model);
    md << " |\n|---|---";
    for (std::size_t i = 0; i < r.baselines.size(); ++i) md << "|---";
    md << "|\n";
    for (const auto& s : r.categories) {
        md << "| " << to_string(s.category) << " | " << format_1dp(s.pass_rate);
        for (const auto& b : r.baselines) md << " | " << format_1dp(b.rates.at(s.category));
        md << " |\n";
    }
    md << "| Avg | " << format_1dp_from_hundredths(to_hundredths(r.overall));
    for (const auto& b : r.baselines) {
        md << " | " << format_1dp_from_hundredths(to_hundredths(b.overall));
    }
    md << " |\n";

    md << "\n## Confidence Intervals (95%, Wilson)\n\n";
    md << "| Category | Queries | Passed | Pass Rate | CI Low | CI High |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto& s : r.categories) {
        md << "| " << to_string(s.category) << " | " << s.n_queries << " | " << s.n_pass << " | "
           << format_1dp(s.pass_rate) << " | " << format_1dp(s.ci_low) << " | "
           << format_1dp(s.ci_high) << " |\n";
    }

    const auto& m = r.metadata;
    md << "\nBackend: " << md_cell(or_dash(m.backend)) << ". Judge: " << md_cell(m.judge_mode)
       << " (" << m.votes.min_rounds << "-" << m.votes.max_rounds << " rounds). Seed: " << m.seed
       << ". Max iterations: " << m.max_iterations << ". Temperature: " << m.temperature << ".\n";
    return md.str();
}

std::string emit_csv(const RunReport& r) {
    std::ostringstream csv;
    csv << "model,category,pass_rate,n_queries,n_pass,ci_low,ci_high\n";
    for (const auto& s : r.categories) {
        csv << csv_field(r.model) << ',' << to_string(s.category) << ',' << format_1dp(s.pass_rate)
            << ',' << s.n_queries << ',' << s.n_pass << ',' << format_2dp(s.ci_low) << ','
            << format_2dp(s.ci_high) << '\n';
    }
    for (const auto& b : r.baselines) {
        for (const auto& [category, rate] : b.rates) {
            csv << csv_field(b.model) << ',' << to_string(category) << ',' << format_1dp(rate)
                << ",,,,\n";
        }
    }
    return csv.str();
}

}  // namespace

std::optional<ReportFormat> report_format_from_string(std::string_view name) {
    if (name == "md" || name == "markdown") return ReportFormat::Markdown;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    return std::nullopt;
}

json to_json(const RunReport& r) {
    json cats = json::array();
    for (const auto& s : r.categories) {
        cats.push_back({{"category", to_string(s.category)},
                        {"n_queries", s.n_queries},
                        {"n_pass", s.n_pass},
                        {"pass_rate", s.pass_rate},
                        {"ci_low", s.ci_low},
                        {"ci_high", s.ci_high}});
    }
    json baselines = json::array();
    for (const auto& b : r.baselines) {
        json rates = json::object();
        for (const auto& [c, rate] : b.rates) rates[std::string(to_string(c))] = rate;
        baselines.push_back({{"model", b.model},
                             {"params", b.params},
                             {"rates", std::move(rates)},
                             {"overall", b.overall},
                             {"gap_hundredths", b.gap_hundredths},
                             {"gap", format_hundredths(b.gap_hundredths)}});
    }
    const auto& m = r.metadata;
    return {{"label", r.label},
            {"model", r.model},
            {"params", r.params},
            {"categories", std::move(cats)},
            {"overall", r.overall},
            {"overall_display", format_2dp(r.overall)},
            {"baselines", std::move(baselines)},
            {"metadata",
             {{"backend", m.backend},
              {"judge_mode", m.judge_mode},
              {"seed", m.seed},
              {"vote_min_rounds", m.votes.min_rounds},
              {"vote_max_rounds", m.votes.max_rounds},
              {"max_iterations", m.max_iterations},
              {"temperature", m.temperature}}}};
}

RunReport report_from_json(const json& doc) {
    try {
        RunReport r;
        r.label = doc.at("label").get<std::string>();
        r.model = doc.at("model").get<std::string>();
        r.params = doc.at("params").get<std::string>();
        for (const auto& c : doc.at("categories")) {
            auto category = category_from_string(c.at("category").get<std::string>());
            if (!category) throw ValidationError("report has unknown category");
            CategoryStats s;
            s.category = *category;
            s.n_queries = c.at("n_queries").get<std::size_t>();
            s.n_pass = c.at("n_pass").get<std::size_t>();
            s.pass_rate = c.at("pass_rate").get<double>();
            s.ci_low = c.at("ci_low").get<double>();
            s.ci_high = c.at("ci_high").get<double>();
            r.categories.push_back(s);
        }
        r.overall = doc.at("overall").get<double>();
        for (const auto& b : doc.at("baselines")) {
            BaselineRow row;
            row.model = b.at("model").get<std::string>();
            row.params = b.at("params").get<std::string>();
            for (const auto& [name, rate] : b.at("rates").items()) {
                auto category = category_from_string(name);
                if (!category) throw ValidationError("report baseline has unknown category");
                row.rates[*category] = rate.get<double>();
            }
            row.overall = b.at("overall").get<double>();
            row.gap_hundredths = b.at("gap_hundredths").get<std::int64_t>();
            r.baselines.push_back(std::move(row));
        }
        const auto& m = doc.at("metadata");
        r.metadata.backend = m.at("backend").get<std::string>();
        r.metadata.judge_mode = m.at("judge_mode").get<std::string>();
        r.metadata.seed = m.at("seed").get<std::uint64_t>();
        r.metadata.votes.min_rounds = m.at("vote_min_rounds").get<std::size_t>();
        r.metadata.votes.max_rounds = m.at("vote_max_rounds").get<std::size_t>();
        r.metadata.max_iterations = m.at("max_iterations").get<std::size_t>();
        r.metadata.temperature = m.at("temperature").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
}

std::string emit_report(const RunReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Markdown: return emit_markdown(report);
        case ReportFormat::Csv: return emit_csv(report);
        case ReportFormat::Json:
            return to_json(report).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
    }
    return {};
}

std::string emit_radar_data(const std::vector<RunReport>& reports) {
    std::ostringstream csv;
    csv << "model,category,pass_rate\n";
    for (const auto& r : reports) {
        for (auto c : kAllCategories) {
            const auto* s = r.find(c);
            if (!s) {
                throw ValidationError("report " + r.model + " lacks category " +
                                      std::string(to_string(c)));
            }
            csv << csv_field(r.model) << ',' << to_string(c) << ',' << format_1dp(s->pass_rate)
                << '\n';
        }
    }
    return csv.str();
}

json to_json(const SolutionPath& p) {
    json steps = json::array();
    for (const auto& s : p.steps) {
        json step = {{"thought", s.thought}, {"action", s.action}, {"action_input", s.action_input}};
        if (s.observation) step["observation"] = *s.observation;
        steps.push_back(std::move(step));
    }
    json doc = {{"query_id", p.query_id},
                {"status", to_string(p.status)},
                {"steps", std::move(steps)},
                {"api_calls_used", p.api_calls_used},
                {"successful_actions", p.successful_actions},
                {"termination_note", p.termination_note}};
    doc["final_answer"] = p.final_answer ? json(*p.final_answer) : json(nullptr);
    return doc;
}

SolutionPath solution_path_from_json(const json& doc) {
    try {
        SolutionPath p;
        p.query_id = doc.at("query_id").get<std::string>();
        auto status = path_status_from_string(doc.at("status").get<std::string>());
        if (!status) throw ValidationError("unknown path status");
        p.status = *status;
        for (const auto& s : doc.at("steps")) {
            ReActStep step;
            step.thought = s.at("thought").get<std::string>();
            step.action = s.at("action").get<std::string>();
            step.action_input = s.at("action_input").get<std::string>();
            if (s.contains("observation")) step.observation = s["observation"].get<std::string>();
            p.steps.push_back(std::move(step));
        }
        p.api_calls_used = doc.at("api_calls_used").get<std::size_t>();
        p.successful_actions = doc.value("successful_actions", std::vector<std::string>{});
        p.termination_note = doc.value("termination_note", "");
        if (auto fa = doc.find("final_answer"); fa != doc.end() && !fa->is_null()) {
            p.final_answer = fa->get<std::string>();
        }
        return p;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed solution path: ") + e.what());
    }
}

std::vector<SolutionPath> load_paths(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    std::vector<SolutionPath> paths;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto doc = json::parse(line, nullptr, false);
        if (doc.is_discarded()) throw ValidationError("malformed line in " + file);
        paths.push_back(solution_path_from_json(doc));
    }
    if (in.bad()) throw IoError("read failed for " + file);
    return paths;
}

}  // namespace agentbench
