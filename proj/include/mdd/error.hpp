#pragma once

#include <stdexcept>
#include <string>

namespace mdd {

enum class ErrorKind {
  validation,         // malformed request or argument
  schema_mismatch,    // attribute not known to a schema / distribution
  insufficient_data,  // fewer than two tuples
  domain,             // value outside its admissible range
  capacity,           // candidate or desk-scale budget exceeded
  io,                 // file could not be opened / written
  format,             // malformed or inconsistent file contents
  contract,           // precondition on record ordering violated
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace mdd
