#ifndef XFER_COMMON_HPP_
#define XFER_COMMON_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xfer {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

// Malformed or inconsistent input data (bad file, unknown language id,
// version mismatch). CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Bad invocation (missing flag, invalid combination). CLI maps this to
// exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Shortest decimal form of x that parses back to exactly x.
std::string format_double(double x);

// Bit-exact textual form via the hex-float representation ("%a").
std::string to_hexfloat(double x);

// Parses either hex-float or plain decimal. Throws DataError on garbage.
double parse_double(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);
std::string_view trim(std::string_view s);
std::string lower_ascii(std::string_view s);

// Field escaping for tab-separated formats. Covers backslash, tab,
// newline, carriage return and the 0x1f joiner used in bigram keys.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

// Deterministic bounded uniform draw from a 64-bit engine state via
// rejection sampling; independent of std::uniform_int_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();                    // splitmix64 step
  std::uint64_t below(std::uint64_t n);    // uniform in [0, n)
  double unit();                           // uniform in [0, 1)

 private:
  std::uint64_t state_;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path);

}  // namespace xfer

#endif  // XFER_COMMON_HPP_
