#include "drestlab/worlds.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drestlab {

std::vector<NamedWorld> shipped_worlds() {
  std::vector<NamedWorld> out;
  for (const auto& [name, text] : detail::embedded_worlds())
    out.push_back({std::string(name), std::string(text)});
  return out;
}

const std::vector<std::string>& appendix_world_names() {
  static const std::vector<std::string> names = {
      "fewer_for_longer", "one_coin_only", "hidden_treasure", "equal_value",
      "around_the_corner", "spacious", "royal_road", "last_moment"};
  return names;
}

bool is_shipped_world(std::string_view name) {
  for (const auto& [n, text] : detail::embedded_worlds())
    if (n == name) return true;
  return false;
}

std::string shipped_world_text(std::string_view name) {
  for (const auto& [n, text] : detail::embedded_worlds())
    if (n == name) return std::string(text);
  throw std::invalid_argument("unknown world '" + std::string(name) + "'");
}

std::string load_world_text(std::string_view name_or_path) {
  if (is_shipped_world(name_or_path)) return shipped_world_text(name_or_path);
  std::ifstream in{std::string(name_or_path)};
  if (!in) throw std::invalid_argument("no shipped world or readable file named '" +
                                       std::string(name_or_path) + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

GridSpec load_world(std::string_view name_or_path) {
  return parse_gridspec(load_world_text(name_or_path));
}

}  // namespace drestlab
