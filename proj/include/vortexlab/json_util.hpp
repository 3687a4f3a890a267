#pragma once

#include "json.hpp"

#include <string>

namespace vortexlab {

/// Serializes JSON with every floating-point number printed with 17
/// significant digits (non-finite values become null). `indent < 0` gives a
/// single line.
std::string dump_json(const nlohmann::ordered_json& value, int indent = 2);

/// "%.17g" formatting for CSV output.
std::string format_double(double v);

}  // namespace vortexlab
