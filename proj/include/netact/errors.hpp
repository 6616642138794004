#pragma once

#include <stdexcept>
#include <string>

namespace netact {

/// Base class for all pipeline errors. `stage` names the pipeline stage the
/// error originated from so the CLI can print a stage-tagged one-liner.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& message)
        : std::runtime_error(message), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message) : Error("ingest", message) {}
    ParseError(size_t line, const std::string& message)
        : Error("ingest", "line " + std::to_string(line) + ": " + message), line_(line) {}

    size_t line() const noexcept { return line_; }

private:
    size_t line_ = 0;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class ModelError : public Error {
public:
    explicit ModelError(const std::string& message) : Error("model", message) {}
};

class EvalError : public Error {
public:
    explicit EvalError(const std::string& message) : Error("eval", message) {}
};

}  // namespace netact
