#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace coevo {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line),
          column_(column) {}

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed JSON that does not match the expected document shape.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A metamodel invariant (unique names, acyclic supertypes, resolvable
/// targets, multiplicity bounds) does not hold.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// A fully qualified name did not resolve.
class ResolveError : public Error {
public:
    ResolveError(const std::string& fqn, std::string segment)
        : Error("cannot resolve '" + fqn + "': no element named '" + segment + "'"),
          segment_(std::move(segment)) {}

    [[nodiscard]] const std::string& segment() const { return segment_; }

private:
    std::string segment_;
};

/// Invalid model access: unknown element id, inapplicable feature, slot
/// type mismatch, containment cycle.
class ModelError : public Error {
public:
    using Error::Error;
};

class HistoryError : public Error {
public:
    using Error::Error;
};

/// Operation bindings do not match the parameter signature.
class BindingError : public Error {
public:
    using Error::Error;
};

/// Carries a list of human readable messages (constraint texts,
/// conformance violations) next to the summary.
class MessageListError : public Error {
public:
    MessageListError(const std::string& summary, std::vector<std::string> messages)
        : Error(join(summary, messages)), messages_(std::move(messages)) {}

    [[nodiscard]] const std::vector<std::string>& messages() const { return messages_; }

private:
    static std::string join(const std::string& summary, const std::vector<std::string>& messages) {
        std::string out = summary;
        for (const auto& m : messages) {
            out += "\n  ";
            out += m;
        }
        return out;
    }

    std::vector<std::string> messages_;
};

/// One or more operation constraints failed; nothing was changed.
class ConstraintError : public MessageListError {
public:
    using MessageListError::MessageListError;
};

/// Conformance did not hold at a transaction boundary; the transaction was
/// rolled back.
class TransactionError : public MessageListError {
public:
    using MessageListError::MessageListError;
};

/// Raised by custom migrations to abort the enclosing transaction.
class MigrationError : public Error {
public:
    using Error::Error;
};

}  // namespace coevo
