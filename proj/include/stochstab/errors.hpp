#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stochstab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StateSpaceTooLarge : public Error {
 public:
  StateSpaceTooLarge(std::uint64_t requested, std::uint64_t cap)
      : Error("state space of " + std::to_string(requested) +
              " profiles exceeds the cap of " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}
  std::uint64_t requested() const { return requested_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t requested_;
  std::uint64_t cap_;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class MissingPotential : public Error {
 public:
  MissingPotential() : Error("game carries no weighted potential") {}
};

class EmptyStrategySet : public Error {
 public:
  EmptyStrategySet() : Error("logit choice over an empty strategy set") {}
};

class TooManyPaths : public Error {
 public:
  using Error::Error;
};

class DisconnectedPlayer : public Error {
 public:
  using Error::Error;
};

// Malformed input text. `where` carries a line/field locator.
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Well-formed JSON that does not match the game schema.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : Error("field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ReducibleChain : public Error {
 public:
  using Error::Error;
};

class SolveFailure : public Error {
 public:
  using Error::Error;
};

class Unreachable : public Error {
 public:
  explicit Unreachable(std::uint64_t state)
      : Error("state " + std::to_string(state) + " cannot reach the root through feasible edges"),
        state_(state) {}
  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace stochstab
