#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "agentbench/bench_runner.hpp"
#include "agentbench/model_gateway.hpp"
#include "agentbench/react_trace.hpp"
#include "agentbench/toolbox.hpp"

namespace agentbench::testing {

// Completion text for one tool step, in canonical trace form.
std::string tool_call(const std::string& action, const nlohmann::json& args,
                      const std::string& thought = "calling a tool");
std::string finish_answer(const std::string& answer, const std::string& thought = "done");
std::string finish_give_up(const std::string& thought = "cannot solve this");

nlohmann::json desk_registry_json();
ToolRegistry desk_registry();

// Arguments that satisfy the tool's declared parameters.
nlohmann::json valid_args(const std::string& tool);

// 6 categories x (10,10,10,10,10,5) = 55 queries.
BenchmarkSuite desk_suite();

// The first 8 queries of each 10-query category (4 of the 5 G3 queries) pass
// the rule judge; the rest fail in assorted ways.
ReplayLibrary desk_replay();

struct DeskFiles {
    std::filesystem::path suite;
    std::filesystem::path registry;
    std::filesystem::path replay;
};

DeskFiles write_desk_fixture(const std::filesystem::path& dir);

}  // namespace agentbench::testing
