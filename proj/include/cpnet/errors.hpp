#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpnet {

// Every error thrown by the library derives from this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// An input file that does not exist or cannot be opened.
class MissingInputError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class DuplicateKeyError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Raised when fewer than three symbols remain; a PMFG needs N >= 3.
class InsufficientUniverseError : public Error {
public:
    using Error::Error;
};

// A column that cannot enter a correlation (zero variance).
class FlaggedSymbolError : public Error {
public:
    explicit FlaggedSymbolError(std::string symbol)
        : Error("zero-variance column: " + symbol), symbol_(std::move(symbol)) {}

    const std::string& symbol() const noexcept { return symbol_; }

private:
    std::string symbol_;
};

class DisconnectedGraphError : public Error {
public:
    using Error::Error;
};

class UndefinedSharpeError : public Error {
public:
    explicit UndefinedSharpeError(double mean)
        : Error("sharpe ratio undefined: zero standard deviation"), mean_(mean) {}

    double mean() const noexcept { return mean_; }

private:
    double mean_;
};

} // namespace cpnet
