#include <doctest.h>

#include <algorithm>

#include "drestlab/evaluator.hpp"
#include "drestlab/worlds.hpp"
#include "support/oracles.hpp"

using namespace drestlab;
using drestlab::testing::only_token;
using drestlab::testing::optimal_sequences;
using drestlab::testing::without_token;

namespace {

constexpr double kGamma = 0.9;

double m_short(const GridSpec& g) { return max_discounted_coins(g, g.default_horizon(), kGamma); }
double m_long(const GridSpec& g) { return max_discounted_coins(g, g.long_horizon(), kGamma); }

std::size_t common_prefix(const std::vector<Action>& a, const std::vector<Action>& b) {
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  return i;
}

}  // namespace

TEST_CASE("every world offers two lengths") {
  for (const auto& w : shipped_worlds()) {
    CAPTURE(w.name);
    CHECK(achievable_lengths(parse_gridspec(w.text)).size() == 2);
  }
}

TEST_CASE("example: short takes the 2-coin, the 3-coin needs the button") {
  const GridSpec g = load_world("example");
  const double gm = 0.95;
  const double s = max_discounted_coins(g, 4, gm);
  CHECK(max_discounted_coins(only_token(g, "b"), 4, gm) == s);
  CHECK(max_discounted_coins(without_token(g, "b"), 4, gm) < s);
  CHECK(max_discounted_coins(only_token(g, "c"), 4, gm) == 0.0);
  CHECK(max_discounted_coins(without_token(g, "c"), 8, gm) < max_discounted_coins(g, 8, gm));
  CHECK(max_discounted_coins(only_token(g, "c"), 8, gm) > 0.0);
}

TEST_CASE("lopsided: one coin per length, equal when x = 1") {
  const GridSpec g = load_world("lopsided");
  CHECK(g.default_horizon() == 2);
  CHECK(g.button()->delay == 2);
  CHECK(max_discounted_coins(only_token(g, "Cx"), 2, 1.0) == 0.0);
  CHECK(max_discounted_coins(only_token(g, "C1"), 4, 1.0) == 0.0);
  CHECK(max_discounted_coins(g, 2, 1.0) == 1.0);
  CHECK(max_discounted_coins(g, 4, 1.0) == 1.0);
  const GridSpec big = g.with_coin_value(2, 100.0);
  CHECK(max_discounted_coins(big, 4, 1.0) == 100.0);
}

TEST_CASE("fewer_for_longer: C3 only when short, C1 only when long") {
  const GridSpec g = load_world("fewer_for_longer");
  CHECK(m_short(only_token(g, "C3")) > 0.0);
  CHECK(m_long(only_token(g, "C3")) == 0.0);
  CHECK(m_short(only_token(g, "C1")) == 0.0);
  CHECK(m_long(only_token(g, "C1")) > 0.0);
  CHECK(m_short(g) > m_long(g));
}

TEST_CASE("one_coin_only: the single coin is collectable at both lengths") {
  const GridSpec g = load_world("one_coin_only");
  CHECK(g.coins().size() == 1);
  CHECK(g.button()->delay == 4);
  CHECK(m_short(g) > 0.0);
  CHECK(m_long(g) > 0.0);
  CHECK(m_short(g) > m_long(g));
}

TEST_CASE("hidden_treasure: C2 and C3 need B6, C2 is closer") {
  const GridSpec g = load_world("hidden_treasure");
  CHECK(g.button()->delay == 6);
  CHECK(m_short(only_token(g, "C1")) > 0.0);
  CHECK(m_short(only_token(g, "C2")) == 0.0);
  CHECK(m_short(only_token(g, "C3")) == 0.0);
  CHECK(m_long(only_token(g, "C2")) > 0.0);
  CHECK(m_long(only_token(g, "C3")) > 0.0);
  CHECK(m_long(without_token(g, "C3")) < m_long(g));
  const auto d = bfs_distances(g, g.button()->cell);
  auto cell_of = [&](const char* t) {
    for (const auto& c : g.coins())
      if (c.token == t) return c.cell;
    FAIL("missing coin");
    return Cell{};
  };
  CHECK(d[static_cast<std::size_t>(g.cell_index(cell_of("C2")))] <
        d[static_cast<std::size_t>(g.cell_index(cell_of("C3")))]);
}

TEST_CASE("equal_value: one value-1 coin per length") {
  const GridSpec g = load_world("equal_value");
  REQUIRE(g.coins().size() == 2);
  CHECK(g.coins()[0].value == g.coins()[1].value);
  CHECK(g.button()->delay == 3);
  CHECK(m_short(only_token(g, "C1")) > 0.0);
  CHECK(m_long(only_token(g, "C1")) == 0.0);
  CHECK(m_short(only_token(g, "D1")) == 0.0);
  CHECK(m_long(only_token(g, "D1")) > 0.0);
  CHECK(m_short(g) > m_long(g));
}

TEST_CASE("around_the_corner: C1 behind walls, C2 behind the button") {
  const GridSpec g = load_world("around_the_corner");
  CHECK(m_short(only_token(g, "C1")) > 0.0);
  CHECK(m_short(only_token(g, "C2")) == 0.0);
  CHECK(m_long(only_token(g, "C2")) > 0.0);
  const auto d = bfs_distances(g, g.start());
  for (const auto& c : g.coins())
    if (c.token == "C1") {
      const int manhattan = std::abs(c.cell.x - g.start().x) + std::abs(c.cell.y - g.start().y);
      CHECK(d[static_cast<std::size_t>(g.cell_index(c.cell))] > manhattan);
    }
}

TEST_CASE("spacious: no walls, long takes C3, short takes C2") {
  const GridSpec g = load_world("spacious");
  CHECK(g.walls().empty());
  CHECK(m_long(g) > m_short(g));
  CHECK(m_long(without_token(g, "C3")) < m_long(g));
  CHECK(m_short(only_token(g, "C2")) == m_short(g));
  CHECK(m_short(only_token(g, "C3")) == 0.0);
}

TEST_CASE("royal_road: the length choice can be made on several moves") {
  const GridSpec g = load_world("royal_road");
  const auto shorts = optimal_sequences(g, g.default_horizon(), kGamma);
  const auto longs = optimal_sequences(g, g.long_horizon(), kGamma);
  REQUIRE_FALSE(shorts.empty());
  REQUIRE_FALSE(longs.empty());
  std::vector<std::size_t> split_points;
  for (const auto& s : shorts)
    for (const auto& l : longs) split_points.push_back(common_prefix(s, l));
  std::sort(split_points.begin(), split_points.end());
  split_points.erase(std::unique(split_points.begin(), split_points.end()), split_points.end());
  CHECK(split_points.size() >= 3);
}

TEST_CASE("last_moment: every optimal path agrees until the final pre-shutdown move") {
  const GridSpec g = load_world("last_moment");
  const auto shorts = optimal_sequences(g, g.default_horizon(), kGamma);
  const auto longs = optimal_sequences(g, g.long_horizon(), kGamma);
  REQUIRE_FALSE(shorts.empty());
  REQUIRE_FALSE(longs.empty());
  const auto h = static_cast<std::size_t>(g.default_horizon());
  for (const auto& s : shorts)
    for (const auto& l : longs) CHECK(common_prefix(s, l) == h - 1);
}
