#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace simharm {

// Everything one invocation resolved to, echoed into each report: fixed
// inputs and seed give byte-identical output (no timestamps, no absolute
// path rewriting).
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> inputs;     // role, path
  std::vector<std::pair<std::string, std::string>> overrides;  // flag, value
  std::uint64_t seed = 0;
  std::string out_dir;  // empty: report goes to stdout only
};

// Batch front end over the library: validate, energy, flow, optimize-metric,
// verify, export-obj. Reports are single JSON documents on out (plus files
// under --out when given); diagnostics go to err. Exit codes: 0 success,
// 1 failed check or unconverged flow, 2 usage or input errors.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace simharm
