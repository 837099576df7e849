#pragma once

#include <stdexcept>
#include <string>

namespace qillum {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its mathematical or physical domain.
class DomainError : public Error {
public:
  DomainError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Malformed configuration text. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
  ParseError(int line, std::string key, const std::string& what)
      : Error(format(line, key, what)), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

private:
  static std::string format(int line, const std::string& key, const std::string& what) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!key.empty()) out += " key '" + key + "'";
    return out + ": " + what;
  }
  int line_;
  std::string key_;
};

/// The Fock-space cutoff discards more probability than allowed.
class TruncationError : public Error {
public:
  using Error::Error;
};

/// An eigensolver or other dense linear-algebra kernel failed.
class LinAlgError : public Error {
public:
  using Error::Error;
};

/// An iterative numerical routine failed to converge.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

}  // namespace qillum
