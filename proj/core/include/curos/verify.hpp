#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace curos::verify {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Quick self-consistency checks over the library; backs the `verify`
// command of the CLI.
std::vector<Check> run_checks(std::uint64_t seed = 1);

} // namespace curos::verify
