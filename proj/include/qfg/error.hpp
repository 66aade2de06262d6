#ifndef QFG_ERROR_HPP
#define QFG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qfg {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed group or graph input text.
class ParseError : public Error {
public:
  ParseError(int line, const std::string &what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string &what) : Error(what), line_(0) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

// An exhaustive search would exceed its configured size limit.
class CapExceeded : public Error {
public:
  using Error::Error;
};

// Arguments violate an operation's precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

} // namespace qfg

#endif // QFG_ERROR_HPP
