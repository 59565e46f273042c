#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace adlforge {

/// Text assets compiled into the library (prompt templates, vocabularies).
/// Names are paths relative to the asset root, e.g. "prompts/dense_caption.user.txt".
/// Throws Error for an unknown name.
std::string_view builtin_asset(std::string_view name);
bool has_builtin_asset(std::string_view name);
std::vector<std::string> builtin_asset_names();

}  // namespace adlforge
