#include "phylomst/errors.hpp"

namespace phylomst {

auto to_string(ErrorKind kind) -> const char* {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::size: return "size error";
    case ErrorKind::structural: return "structural error";
    case ErrorKind::mixing: return "mixing error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::bounds: return "bounds error";
  }
  return "error";
}

auto exit_code(ErrorKind kind) -> int {
  switch (kind) {
    case ErrorKind::parse:
      return 1;
    case ErrorKind::domain:
    case ErrorKind::numeric:
    case ErrorKind::size:
      return 2;
    case ErrorKind::structural:
    case ErrorKind::mixing:
    case ErrorKind::parameter:
    case ErrorKind::bounds:
      return 3;
  }
  return 2;
}

}  // namespace phylomst
