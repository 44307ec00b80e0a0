#include <string>
#include <vector>

#include "entframe/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return entframe::cli::dispatch(std::move(args));
}
