#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aflx/dmc.hpp"
#include "aflx/ht.hpp"

namespace aflx {

// Bad flags, malformed values, unknown config keys. Maps to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 123456789ull;

// "bsc:p", "bec:e", or "matrix:w00,w01;w10,w11".
Channel parse_channel(const std::string& spec);
// "ber:p1,p2" (two Bernoulli parameters) or "vecs:p0,p1,...;q0,q1,...".
HtPair parse_pair(const std::string& spec);
// Comma-separated doubles, or "lin:lo:hi:count" for an inclusive linear grid.
std::vector<double> parse_double_list(const std::string& spec,
                                      const std::string& what = "list");
std::vector<int> parse_int_list(const std::string& spec,
                                const std::string& what = "list");
double parse_double(const std::string& text, const std::string& what);
std::uint64_t parse_u64(const std::string& text, const std::string& what);
int parse_int(const std::string& text, const std::string& what);

// Probabilities and frequencies: scientific, 12 significant digits.
std::string fmt_sci(double v);
// Rates, exponents, thresholds: shortest round-trippable general format.
std::string fmt_g(double v);

// Entry point used by the binary and by tests. Returns the process exit code:
// 0 ok, 1 usage error, 2 verification failure, 3 unsupported channel.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace aflx
