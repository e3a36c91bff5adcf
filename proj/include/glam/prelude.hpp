#pragma once

// The prelude: the shipped prelude.gl, embedded at build time, parsed and
// type checked once per process.

#include <fstream>
#include <sstream>
#include <string>

#include "glam/error.hpp"
#include "glam/frontend.hpp"
#include "glam/prelude_source.hpp"
#include "glam/typing.hpp"

namespace glam {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string_view prelude_source() { return kPreludeSource; }

inline const Program& load_prelude() {
  static const Program p = parse_program(prelude_source());
  return p;
}

// For experimenting with a modified prelude.
inline Program load_prelude_from(const std::string& path) { return parse_program(read_file(path)); }

inline const CheckedProgram& checked_prelude() {
  static const CheckedProgram c = [] {
    Checker checker;
    return check_program(load_prelude(), &checker);
  }();
  return c;
}

// Closed, ascription-free body of a prelude definition.
inline Term prelude_term(std::string_view name) {
  const CheckedDef* d = checked_prelude().find(name);
  if (!d) throw Error(ErrorCode::UnknownIdentifier, "no prelude definition '" + std::string(name) + "'");
  return d->elaborated;
}

inline Type prelude_type(std::string_view name) {
  const TypeAlias* a = load_prelude().find_alias(name);
  if (!a) throw Error(ErrorCode::UnknownIdentifier, "no prelude type '" + std::string(name) + "'");
  return a->type;
}

}  // namespace glam
