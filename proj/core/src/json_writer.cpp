#include "json_writer.hpp"

#include <cmath>
#include <cstdio>

#include "hemobnn/errors.hpp"

namespace hemobnn::detail {
namespace {

void write(const nlohmann::json& v, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_close(static_cast<std::size_t>(indent * depth), ' ');
  switch (v.type()) {
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::json(it.key()).dump() + ": ";
        write(it.value(), indent, depth + 1, out);
      }
      out += "\n" + pad_close + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line; large numeric arrays are common here.
      bool scalars = true;
      for (const auto& e : v) scalars = scalars && !e.is_structured();
      out += "[";
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += scalars ? ", " : ",";
        first = false;
        if (!scalars) out += "\n" + pad;
        write(e, indent, depth + 1, out);
      }
      if (!scalars) out += "\n" + pad_close;
      out += "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) fail(ErrorCode::kNumeric, "cannot serialize non-finite number");
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", d);
      out += buf;
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& value, int indent) {
  std::string out;
  write(value, indent, 0, out);
  out += '\n';
  return out;
}

}  // namespace hemobnn::detail
