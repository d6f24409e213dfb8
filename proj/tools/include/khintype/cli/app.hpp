#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "khintype/cli/config.hpp"

namespace khintype::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kError = 1, kInconclusive = 2 };

/// Where a command writes. `data` is the CSV/JSON payload, `summary` the human-readable page.
struct Streams {
    std::ostream& data;
    std::ostream& summary;
};

int run_count(const RunConfig& cfg, Streams io);
int run_expsum(const RunConfig& cfg, Streams io);
int run_nondegen(const RunConfig& cfg, Streams io);
int run_typicality(const RunConfig& cfg, Streams io);
int run_series(const RunConfig& cfg, Streams io);
int run_catalog(const RunConfig& cfg, Streams io);

/// Full command line (argv[0] included). Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace khintype::cli
