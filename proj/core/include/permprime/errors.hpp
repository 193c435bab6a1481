#ifndef PERMPRIME_ERRORS_HPP
#define PERMPRIME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace permprime {

// Invalid arguments, malformed inputs, violated preconditions.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input; carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(int line, const std::string& message)
      : InputError("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A configured size cap would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal consistency failure; never expected on valid inputs.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace permprime

#endif
