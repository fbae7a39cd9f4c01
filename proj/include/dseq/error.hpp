#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "dseq/index.hpp"

namespace dseq {

/// Evaluation left the domain of a rule (log of a non-positive value,
/// division by zero, non-finite result, ...). Carries the offending index
/// when the failure happened while evaluating a sequence.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what, std::optional<IndexPair> where = std::nullopt)
        : std::runtime_error(where ? what + " at " + to_string(*where) : what), where_(where) {}

    const std::optional<IndexPair>& where() const noexcept { return where_; }

private:
    std::optional<IndexPair> where_;
};

enum class ParseErrorKind { Syntax, UnknownIdentifier, Arity };

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::size_t offset, const std::string& message)
        : std::runtime_error(message + " (offset " + std::to_string(offset) + ")"),
          kind_(kind), offset_(offset) {}

    ParseErrorKind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    ParseErrorKind kind_;
    std::size_t offset_;
};

/// A verdict was requested for a property the sequence's modulus does not
/// speak to (e.g. a quasi-Cauchy modulus asked to certify Cauchy).
class ModulusMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dseq
