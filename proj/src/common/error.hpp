#pragma once

#include <stdexcept>
#include <string>

namespace fairgen {

enum class ErrorCode {
  InvalidArgument = 1,
  Domain,
  DegenerateData,
  Unsupported,
  Training,
  Numeric,
  Io,
  Parse,
};

// All failures raised by the core carry a category so the C boundary can
// translate them into status codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace fairgen
