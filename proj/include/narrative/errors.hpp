#pragma once

#include <stdexcept>
#include <string>

namespace narrative {

// Bad input or configuration supplied by the caller. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AllDocumentsEmpty : public InputError {
 public:
  AllDocumentsEmpty()
      : InputError("AllDocumentsEmpty: no document has any token left after preprocessing") {}
};

class InvalidConfig : public InputError {
 public:
  explicit InvalidConfig(const std::string& what) : InputError("InvalidConfig: " + what) {}
};

class IndexOutOfRange : public InputError {
 public:
  explicit IndexOutOfRange(const std::string& what) : InputError("IndexOutOfRange: " + what) {}
};

class TooShort : public InputError {
 public:
  explicit TooShort(const std::string& what) : InputError("TooShort: " + what) {}
};

class NoValidLag : public InputError {
 public:
  explicit NoValidLag(const std::string& what) : InputError("NoValidLag: " + what) {}
};

class ZeroVariance : public InputError {
 public:
  explicit ZeroVariance(const std::string& what) : InputError("ZeroVariance: " + what) {}
};

class InvalidSpec : public InputError {
 public:
  explicit InvalidSpec(const std::string& what) : InputError("InvalidSpec: " + what) {}
};

class InfeasibleShare : public InputError {
 public:
  explicit InfeasibleShare(const std::string& what) : InputError("InfeasibleShare: " + what) {}
};

// A broken internal invariant (count tables out of sync, non-normalized rows).
// Maps to CLI exit code 2.
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& what)
      : std::logic_error("InvariantViolation: " + what) {}
};

}  // namespace narrative
