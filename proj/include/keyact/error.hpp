#pragma once

#include <stdexcept>
#include <string>

namespace keyact {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NegativeProbability : public Error { using Error::Error; };
class NotNormalized : public Error { using Error::Error; };
class NotRepresentable : public Error { using Error::Error; };
class IndexOutOfRange : public Error { using Error::Error; };
class ScenarioTooSmall : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ShapeMismatch : public Error { using Error::Error; };
class InvalidWiring : public Error { using Error::Error; };
class NoRoot : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

/// Parse failure carrying a 1-based line/column position.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class SolverFailure : public Error { using Error::Error; };
class NumericalInstability : public SolverFailure { using SolverFailure::SolverFailure; };

}  // namespace keyact
