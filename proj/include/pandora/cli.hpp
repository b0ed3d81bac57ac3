#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pandora {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `pandora` tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const std::vector<std::string>& verify_suites();

/// Runs `cases` randomized cases of a verification suite and prints one
/// PASS/FAIL line per property. Returns kExitOk or kExitVerifyFailed.
/// Throws std::invalid_argument for an unknown suite.
int run_verify_suite(const std::string& suite, std::uint64_t seed, std::uint64_t cases, std::ostream& out);

struct BenchOptions {
    std::string dir;
    std::vector<std::string> methods;
    bool timing = false;
};

/// CSV text: header plus one row per (instance, method), sorted.
std::string run_bench(const BenchOptions& opt, std::ostream& err);

}  // namespace pandora
