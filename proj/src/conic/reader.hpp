#pragma once

#include <istream>
#include <string>

#include "lmi/program.hpp"

namespace dhstab::conic {

// Parses the "conicprogram v1" text format produced by ConicProgram::dump().
// The result round-trips: dump(parse(dump(p))) == dump(p). Throws
// std::runtime_error naming the offending line on malformed input.
lmi::ConicProgram parse_program(std::istream& in);
lmi::ConicProgram parse_program_text(const std::string& text);

}  // namespace dhstab::conic
