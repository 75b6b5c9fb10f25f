#pragma once

#include <stdexcept>
#include <string>

namespace salem {

enum class ErrorKind {
  domain,             // argument outside the mathematical domain
  parameter,          // invalid configuration value
  construction,       // a set or measure could not be built as specified
  no_intersection,    // translation search found no mass inside the set
  map_not_increasing, // pushforward map failed the monotonicity check
  insufficient_data,  // too few bands / points for a fit
  io,                 // file could not be read or written
  parse,              // malformed input file
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace salem
