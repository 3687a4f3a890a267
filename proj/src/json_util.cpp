#include "vortexlab/json_util.hpp"

#include <cmath>
#include <cstdio>

namespace vortexlab {

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write(std::string& out, const nlohmann::ordered_json& v, int indent, int depth) {
  using T = nlohmann::ordered_json::value_t;
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(d * indent), ' ');
  };
  switch (v.type()) {
    case T::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::ordered_json(key).dump();
        out += pretty ? ": " : ":";
        write(out, item, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case T::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // numeric arrays stay on one line
      const bool flat = v.front().is_number();
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += flat && pretty ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write(out, item, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case T::number_float: {
      const double d = v.get<double>();
      out += std::isfinite(d) ? format_double(d) : "null";
      return;
    }
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& value, int indent) {
  std::string out;
  write(out, value, indent, 0);
  return out;
}

}  // namespace vortexlab
