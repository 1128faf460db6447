#include <string>
#include <vector>

#include "lcaudit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return lcaudit::cli_main(args);
}
