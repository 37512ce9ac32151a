#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lazard {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two operands live over different coefficient rings Z/p^k.
class ModulusMismatch : public Error {
public:
  using Error::Error;
};

/// A rational with p in the denominator was pushed into Z/p^k.
class DenominatorNotInvertible : public Error {
public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class PreconditionViolation : public Error {
public:
  using Error::Error;
};

/// quotient_order was handed spans that are not nested.
class ContainmentViolation : public Error {
public:
  ContainmentViolation(const std::string &what, std::vector<std::uint64_t> witness)
      : Error(what), witness_(std::move(witness)) {}
  auto witness() const -> const std::vector<std::uint64_t> & { return witness_; }

private:
  std::vector<std::uint64_t> witness_;
};

/// Lie ring data failed an axiom check. The witness is the 1-based basis
/// triple (or pair) on which the failure was observed.
class ValidationError : public Error {
public:
  ValidationError(const std::string &what, std::vector<int> witness)
      : Error(what), witness_(std::move(witness)) {}
  auto witness() const -> const std::vector<int> & { return witness_; }

private:
  std::vector<int> witness_;
};

/// Ring JSON did not match the ingestion schema. `pointer` is a JSON pointer
/// to the offending location.
class SchemaError : public Error {
public:
  SchemaError(const std::string &what, std::string pointer)
      : Error(what), pointer_(std::move(pointer)) {}
  auto pointer() const -> const std::string & { return pointer_; }

private:
  std::string pointer_;
};

/// A desk-scale limit (element count, search nodes, wall clock) was hit.
/// Partial results are discarded, never reported as totals.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

} // namespace lazard
