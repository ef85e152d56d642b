#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace gom::corpus {

/// Names accepted by builtin_module: "boolean", "struct", "nat".
std::span<const std::string_view> builtin_names();

/// Embedded source of a shipped module (case-insensitive name).
std::optional<std::string_view> builtin_module(std::string_view name);

}  // namespace gom::corpus
