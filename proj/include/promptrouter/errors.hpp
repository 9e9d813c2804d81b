#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace promptrouter {

/// Base class for every error raised by the router. `stage()` names the
/// pipeline stage (or module) that produced it and ends up in the HTTP
/// error envelope.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& message)
        : std::runtime_error(message), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

class CatalogError : public Error {
public:
    CatalogError(const std::string& message, std::string card_id = {})
        : Error("catalog", card_id.empty() ? message : message + " (card '" + card_id + "')"),
          card_id_(std::move(card_id)) {}

    const std::string& card_id() const noexcept { return card_id_; }

private:
    std::string card_id_;
};

class ReasonerError : public Error {
public:
    enum class Kind { UnfilledSlot, UnknownTemplate, Transport, Unparseable, EmptyCandidates };

    ReasonerError(Kind kind, const std::string& message) : Error("reasoner", message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& message) : Error("parser", message) {}
};

class TreeError : public Error {
public:
    explicit TreeError(const std::string& message) : Error("model-tree", message) {}
};

class AdvantageError : public Error {
public:
    explicit AdvantageError(const std::string& message) : Error("advantage", message) {}
};

class GenerationError : public Error {
public:
    enum class Kind { Timeout, BadStatus, MissingEndpoint, Busy, Transport, InvalidRequest };

    GenerationError(Kind kind, const std::string& message, std::string model_id = {})
        : Error("generate", message), kind_(kind), model_id_(std::move(model_id)) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& model_id() const noexcept { return model_id_; }

private:
    Kind kind_;
    std::string model_id_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

}  // namespace promptrouter
