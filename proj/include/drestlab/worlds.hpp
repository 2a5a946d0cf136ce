#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drestlab/gridworld.hpp"

namespace drestlab {

struct NamedWorld {
  std::string name;
  std::string text;
};

// Every world shipped under worlds/, in name order.
std::vector<NamedWorld> shipped_worlds();

// The eight worlds used for the multi-world DReST experiments.
const std::vector<std::string>& appendix_world_names();

bool is_shipped_world(std::string_view name);
std::string shipped_world_text(std::string_view name);

// Resolves a registry name first, then a filesystem path.
GridSpec load_world(std::string_view name_or_path);
std::string load_world_text(std::string_view name_or_path);

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_worlds();
}

}  // namespace drestlab
