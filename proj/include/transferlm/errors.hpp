#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace transferlm {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class TooFewSamples : public Error {
public:
  using Error::Error;
};

class RankDeficient : public Error {
public:
  using Error::Error;
};

class NonSPDGram : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class ZeroVector : public Error {
public:
  using Error::Error;
};

/// Raised when A^k x vanishes and the transfer test statistic is undefined.
/// Callers should fall back to "do not reject".
class DegenerateDirection : public Error {
public:
  using Error::Error;
};

class CurveTooShort : public Error {
public:
  using Error::Error;
};

class EmptyInput : public Error {
public:
  using Error::Error;
};

class ConstantSeries : public Error {
public:
  using Error::Error;
};

class SchemaMismatch : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(std::size_t row, std::size_t column, const std::string& reason)
      : Error("row " + std::to_string(row) + ", column " + std::to_string(column) +
              ": " + reason),
        row(row),
        column(column),
        reason(reason) {}

  std::size_t row;
  std::size_t column;
  std::string reason;
};

}  // namespace transferlm
