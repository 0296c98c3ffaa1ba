#pragma once

#include <stdexcept>
#include <string>

namespace phylomst {

enum class ErrorKind {
  parse,       // malformed or inconsistent input files
  domain,      // invalid symbol, parameter or shape for a model
  numeric,     // non-finite objective encountered by a maximizer
  size,        // exact oracle caps exceeded
  structural,  // disconnected geography graph
  mixing,      // walk does not converge (bipartite graph)
  parameter,   // estimator tolerance outside its admissible range
  bounds       // supremum estimate violates the assumed upper bound B
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  auto kind() const -> ErrorKind { return kind_; }

 private:
  ErrorKind kind_;
};

auto to_string(ErrorKind kind) -> const char*;

// Process exit status for the command-line front end: 1 parse, 2 model, 3 geography.
auto exit_code(ErrorKind kind) -> int;

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error{kind, what}; }

}  // namespace phylomst
