#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cryodaq/registry.hpp"

// The one text rendering for records used by every tool: three fields,
// printf "%.17g", single space separated, LF terminated. 17 significant
// digits round-trip any float64.

namespace cryodaq::textfmt {

std::string format_value(double v);
void append_record(std::string& out, const Sample& rec);
std::string format_record(const Sample& rec);

/// Parses one line (with or without the trailing LF). Returns nullopt when
/// the line is not exactly three numbers.
std::optional<Sample> parse_record(std::string_view line);

}  // namespace cryodaq::textfmt
