#pragma once

#include <iostream>

namespace ando::cli {

enum ExitCode : int {
    kPass = 0,
    kVerificationFailure = 1,
    kInvalidInput = 2,
    kNumericalFailure = 3,
};

/// Entry point of ando_lab; streams are injectable so tests can run commands in-process.
int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace ando::cli
