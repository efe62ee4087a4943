#pragma once

#include <vector>

namespace ipdd {

/// Full CLI entry point. Exit codes: 0 success, 1 runtime failure,
/// 2 configuration error.
int cli_main(int argc, const char* const* argv);

inline int cli_main(const std::vector<const char*>& args) {
  return cli_main(static_cast<int>(args.size()), args.data());
}

}  // namespace ipdd
