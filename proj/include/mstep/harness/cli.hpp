#pragma once

#include <iosfwd>

namespace mstep::harness {

/// Exit codes: 0 success, 1 a run or cell failed, 2 usage or validation error.
/// Failures print one JSON object on `err`: {"error": <kind>, "message": ...}.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mstep::harness
