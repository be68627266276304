#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lmeval {

/// Base class for every error the library raises deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the file and 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Backend failure that is worth retrying (connection reset, 429, 5xx).
class TransientBackendError : public Error {
 public:
  using Error::Error;
};

/// Mock backend received a request it has no fixture for.
class MissingFixtureError : public Error {
 public:
  explicit MissingFixtureError(const std::string& hash)
      : Error("no fixture for request hash " + hash), hash_(hash) {}

  const std::string& hash() const { return hash_; }

 private:
  std::string hash_;
};

}  // namespace lmeval
