#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyplan {

// Error taxonomy mirrored by the C API status codes and CLI exit codes.
enum class ErrorCode { Validation = 2, Solve = 3, Io = 4, Invalid = 5 };

class HypError : public std::runtime_error {
public:
  HypError(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail_validation(const std::string& msg);
[[noreturn]] void fail_io(const std::string& msg);
[[noreturn]] void fail_solve(const std::string& msg);
[[noreturn]] void fail_invalid(const std::string& msg);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// CSV of doubles, one row per line. Ragged rows are an error.
std::vector<std::vector<double>> read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::vector<double>>& rows);

std::string format_double(double v);  // shortest round-trip decimal

// FIPS 180-4 SHA-256, used for manifest content hashes.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file(const std::string& path);

// splitmix64: derives independent substream seeds from one user seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

}  // namespace hyplan
