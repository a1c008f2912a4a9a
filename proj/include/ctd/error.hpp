#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula text. Carries the byte offset of the offending token
/// and the set of tokens that would have been accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected,
              const std::string& found)
      : Error(make_message(offset, expected, found)),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string make_message(std::size_t offset,
                                  const std::vector<std::string>& expected,
                                  const std::string& found) {
    std::string msg = "syntax error at offset " + std::to_string(offset) +
                      ": found " + found + ", expected one of {";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += ", ";
      msg += expected[i];
    }
    return msg + "}";
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UniverseMismatch : public Error {
 public:
  UniverseMismatch() : Error("operands belong to different universes") {}
};

class UnboundAtom : public Error {
 public:
  explicit UnboundAtom(const std::string& atom)
      : Error("unbound atom '" + atom + "'"), atom_(atom) {}
  const std::string& atom() const noexcept { return atom_; }

 private:
  std::string atom_;
};

/// Raised when an operation is asked to work past its enumeration budget.
class SizeGuard : public Error {
 public:
  using Error::Error;
};

/// Theorem replay refused because the two propositions are not in general
/// position; names the empty region(s).
class GenericityError : public Error {
 public:
  using Error::Error;
};

/// Model file ingestion or validation failure.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctd
