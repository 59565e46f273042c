#include "adlforge/model/assets.hpp"

#include <fmt/format.h>

#include "adlforge/model/error.hpp"

namespace adlforge {

namespace detail {
const std::pair<std::string_view, std::string_view>* embedded_assets_begin();
const std::pair<std::string_view, std::string_view>* embedded_assets_end();
}  // namespace detail

bool has_builtin_asset(std::string_view name) {
  for (auto* it = detail::embedded_assets_begin(); it != detail::embedded_assets_end(); ++it)
    if (it->first == name) return true;
  return false;
}

std::string_view builtin_asset(std::string_view name) {
  for (auto* it = detail::embedded_assets_begin(); it != detail::embedded_assets_end(); ++it)
    if (it->first == name) return it->second;
  throw Error(fmt::format("no built-in asset named '{}'", name));
}

std::vector<std::string> builtin_asset_names() {
  std::vector<std::string> out;
  for (auto* it = detail::embedded_assets_begin(); it != detail::embedded_assets_end(); ++it)
    out.emplace_back(it->first);
  return out;
}

}  // namespace adlforge
