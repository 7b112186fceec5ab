#pragma once

#include <stdexcept>
#include <string>

namespace mortar {

enum class ErrorKind {
  kParse,           // malformed input file
  kValidation,      // input parses but violates a record-level rule
  kConfig,          // bad configuration or unknown option value
  kIo,              // filesystem failure
  kTransport,       // HTTP endpoint unreachable or non-200
  kMisaligned,      // extraction output could not be reconciled
  kInternal,
};

const char *ErrorKindName(ErrorKind kind);

// Every failure raised by the core carries a kind so the C layer can map it
// onto a status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mortar
