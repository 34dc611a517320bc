#pragma once

#include <stdexcept>
#include <string>

namespace jcce {

// Exit codes reported by the CLI. Each error class maps to one code so that
// scripted callers can distinguish failure modes.
enum class ErrorCode : int {
  config = 2,       // bad configuration value or flag
  data = 3,         // malformed or inconsistent input data
  io = 4,           // missing file / unreadable path
  version = 5,      // file carries an unsupported version tag
  fingerprint = 6,  // schema fingerprint does not match
  parse = 7,        // corrupt or truncated structured file
  contract = 8,     // API misuse (e.g. backward called twice)
  internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }
  int exit_code() const { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorCode::config, m) {}
};
struct DataError : Error {
  explicit DataError(const std::string& m) : Error(ErrorCode::data, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorCode::io, m) {}
};
struct VersionError : Error {
  explicit VersionError(const std::string& m) : Error(ErrorCode::version, m) {}
};
struct FingerprintError : Error {
  explicit FingerprintError(const std::string& m)
      : Error(ErrorCode::fingerprint, m) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(ErrorCode::parse, m) {}
};
struct ContractError : Error {
  explicit ContractError(const std::string& m) : Error(ErrorCode::contract, m) {}
};

}  // namespace jcce
