#pragma once

#include <string>

#include "json.hpp"

namespace hemobnn::detail {

// Pretty-prints JSON with doubles written as "%.17g" so every value re-reads
// to the identical bit pattern. Object keys keep nlohmann's sorted order, so
// output is byte-stable.
std::string dump_json(const nlohmann::json& value, int indent = 2);

}  // namespace hemobnn::detail
