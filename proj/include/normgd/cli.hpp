#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "normgd/validation.hpp"

namespace normgd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitFailure = 2;

/// Environment variable naming the default output root.
inline constexpr const char* kOutRootEnv = "NORMGD_OUT_ROOT";

/// args excludes the program name: {"converge", "--model", "glm", ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Same, with the functions under test for `check` replaced.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const CheckSubject& subject);

}  // namespace normgd::cli
