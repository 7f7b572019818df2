// Writes the 55-query desk suite, its tool registry and replay script.
#include <iostream>

#include "desk_fixture.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_desk_fixture <dir>\n";
        return 1;
    }
    const auto files = agentbench::testing::write_desk_fixture(argv[1]);
    std::cout << files.suite.string() << '\n'
              << files.registry.string() << '\n'
              << files.replay.string() << '\n';
    return 0;
}
