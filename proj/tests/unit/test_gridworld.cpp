#include <doctest.h>

#include <set>
#include <string>

#include "drestlab/gridworld.hpp"
#include "drestlab/rng.hpp"
#include "drestlab/worlds.hpp"

using namespace drestlab;

namespace {

const char* kNoButton = R"(name = plain
default_horizon = 3
legend:
coin C 1.0
map:
A . C
)";

std::string error_of(const std::string& text) {
  try {
    parse_gridspec(text);
  } catch (const WorldFormatError& e) {
    return e.what();
  }
  return "";
}

EnvState walk(const GridSpec& spec, std::initializer_list<Action> actions) {
  EnvState s = initial_state(spec);
  for (Action a : actions) s = step(spec, s, a).first;
  return s;
}

}  // namespace

TEST_CASE("example world parses with the documented layout") {
  const GridSpec g = load_world("example");
  CHECK(g.name() == "example");
  CHECK(g.width() == 5);
  CHECK(g.height() == 3);
  CHECK(g.default_horizon() == 4);
  REQUIRE(g.button());
  CHECK(g.button()->delay == 4);
  REQUIRE(g.coins().size() == 3);
  // row-major: b (top row), then a, then c
  CHECK(g.coins()[0].value == 2.0);
  CHECK(g.coins()[1].value == 1.0);
  CHECK(g.coins()[2].value == 3.0);
  for (int i = 0; i < 3; ++i) CHECK(g.coins()[static_cast<std::size_t>(i)].slot == i + 1);
  CHECK(g.start() == Cell{0, 0});
}

TEST_CASE("serialize then parse round-trips every shipped world") {
  for (const auto& w : shipped_worlds()) {
    CAPTURE(w.name);
    const GridSpec g = parse_gridspec(w.text);
    const std::string text = serialize_gridspec(g);
    const GridSpec back = parse_gridspec(text);
    CHECK(serialize_gridspec(back) == text);
    CHECK(back.coins().size() == g.coins().size());
    CHECK(back.start() == g.start());
    CHECK(back.walls() == g.walls());
  }
}

TEST_CASE("example world text survives a round trip modulo whitespace") {
  auto squash = [](const std::string& s) {
    std::string out;
    for (char c : s)
      if (c != ' ' && c != '\n' && c != '\t' && c != '\r') out += c;
    return out;
  };
  const std::string original = shipped_world_text("example");
  CHECK(squash(serialize_gridspec(parse_gridspec(original))) == squash(original));
}

TEST_CASE("world without a button has a single length") {
  const GridSpec g = parse_gridspec(kNoButton);
  CHECK_FALSE(g.button());
  CHECK(achievable_lengths(g) == std::vector<int>{3});
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_of("name = x\ndefault_horizon = 2\nlegend:\nmap:\nA . A\n").find("line 5") != std::string::npos);
  CHECK(error_of("name = x\ndefault_horizon = 2\nlegend:\nmap:\nA . A\n").find("duplicate") != std::string::npos);
  CHECK(error_of("name = x\ndefault_horizon = 2\nlegend:\nmap:\nA ? .\n").find("line 5") != std::string::npos);
  CHECK(error_of("name = x\ndefault_horizon = 2\nlegend:\ncoin a 1\ncoin b 1\ncoin c 1\ncoin d 1\nmap:\nA a b c d\n")
            .find("3 coins") != std::string::npos);
  CHECK(error_of("name = x\ndefault_horizon = 0\nlegend:\nmap:\nA .\n") != "");
  CHECK(error_of("name = x\ndefault_horizon = 2\nlegend:\nbutton B 0\nmap:\nA B\n") != "");
  CHECK(error_of("name = x\ndefault_horizon = 2\nlegend:\ncoin a 1\nmap:\nA .\n") != "");
  CHECK(error_of("name = x\ndefault_horizon = 2\nlegend:\ncoin a x1\nmap:\nA a\n").find("line 4") != std::string::npos);
}

TEST_CASE("agent start sharing a cell with a coin is rejected") {
  const std::string e = error_of("name = x\ndefault_horizon = 2\nlegend:\ncoin a 1\nmap:\nA+a .\n");
  CHECK(e.find("overlapping entities") != std::string::npos);
  CHECK(e.find("line 6") != std::string::npos);
}

TEST_CASE("constructor rejects out-of-bounds and overlapping cells") {
  CHECK_THROWS(GridSpec("x", 2, 1, {}, Cell{5, 0}, {}, std::nullopt, 2));
  CHECK_THROWS(GridSpec("x", 2, 1, {Cell{0, 0}}, Cell{0, 0}, {}, std::nullopt, 2));
  Coin c{Cell{1, 0}, 1.0, 0, "c", 0};
  Button b{Cell{1, 0}, 2, "B"};
  CHECK_THROWS(GridSpec("x", 2, 1, {}, Cell{0, 0}, {c}, b, 2));
  Coin neg{Cell{1, 0}, -1.0, 0, "c", 0};
  CHECK_THROWS(GridSpec("x", 2, 1, {}, Cell{0, 0}, {neg}, std::nullopt, 2));
}

TEST_CASE("moving into a wall or the edge leaves the agent in place") {
  const GridSpec g = load_world("example");
  EnvState s = initial_state(g);
  auto [up, ev] = step(g, s, Action::up);
  CHECK(up.agent == s.agent);
  CHECK(up.t == 1);
  CHECK_FALSE(ev.coin);
  const EnvState at = walk(g, {Action::right});
  auto [blocked, ev2] = step(g, at, Action::down);  // (1,1) is a wall
  CHECK(blocked.agent == at.agent);
  CHECK(blocked.t == 2);
}

TEST_CASE("entering the button at t=2 extends the horizon to 8") {
  const GridSpec g = load_world("example");
  const EnvState one = walk(g, {Action::down});
  auto [s, ev] = step(g, one, Action::down);
  CHECK(ev.button_pressed);
  CHECK(s.t == 2);
  CHECK(s.horizon == 8);
  CHECK_FALSE(s.button_present);
  // walking back onto the cell does nothing more
  const EnvState again = step(g, step(g, s, Action::up).first, Action::down).first;
  CHECK(again.horizon == 8);
  CHECK(again.agent == s.agent);
}

TEST_CASE("a coin fires once and reports its timestep") {
  const GridSpec g = load_world("example");
  EnvState s = walk(g, {Action::right, Action::right, Action::right});
  auto [got, ev] = step(g, s, Action::right);
  REQUIRE(ev.coin);
  CHECK(ev.coin->slot == 1);
  CHECK(ev.coin->value == 2.0);
  CHECK(ev.coin->t == 4);
  CHECK(ev.episode_done);  // collection on the final timestep counts
  CHECK_FALSE(got.coin_present[0]);

  const GridSpec open = parse_gridspec("name = o\ndefault_horizon = 4\nlegend:\ncoin C 1\nmap:\nA . C\n");
  EnvState t = walk(open, {Action::right});
  auto [on, e1] = step(open, t, Action::right);
  CHECK(e1.coin);
  auto [back, e2] = step(open, step(open, on, Action::left).first, Action::right);
  CHECK(back.agent == on.agent);
  CHECK_FALSE(e2.coin);
}

TEST_CASE("stepping a finished episode is a contract violation") {
  const GridSpec g = load_world("example");
  EnvState s = walk(g, {Action::up, Action::up, Action::up, Action::up});
  CHECK(s.done());
  CHECK_THROWS_AS(step(g, s, Action::up), std::logic_error);
}

TEST_CASE("achievable lengths follow BFS distance to the button") {
  CHECK(achievable_lengths(load_world("example")) == std::vector<int>{4, 8});
  // button exactly one step too far
  const GridSpec far = parse_gridspec(
      "name = far\ndefault_horizon = 2\nlegend:\nbutton B 3\nmap:\nA . . B\n");
  CHECK(achievable_lengths(far) == std::vector<int>{2});
  const GridSpec near = parse_gridspec(
      "name = near\ndefault_horizon = 3\nlegend:\nbutton B 3\nmap:\nA . . B\n");
  CHECK(achievable_lengths(near) == std::vector<int>{3, 6});
  const GridSpec walled = parse_gridspec(
      "name = walled\ndefault_horizon = 5\nlegend:\nbutton B 3\nmap:\nA # B\n");
  CHECK(achievable_lengths(walled) == std::vector<int>{5});
}

TEST_CASE("random play: length dichotomy, conservation and determinism") {
  Rng rng(7);
  for (const auto& w : shipped_worlds()) {
    CAPTURE(w.name);
    const GridSpec g = parse_gridspec(w.text);
    for (int trial = 0; trial < 300; ++trial) {
      EnvState s = initial_state(g), twin = s;
      bool pressed = false;
      double collected = 0.0;
      std::set<int> slots;
      while (!s.done()) {
        const Action a = kAllActions[static_cast<std::size_t>(rng.below(4))];
        auto [n1, e1] = step(g, s, a);
        auto [n2, e2] = step(g, twin, a);
        REQUIRE(n1 == n2);
        pressed = pressed || e1.button_pressed;
        if (e1.coin) {
          CHECK(slots.insert(e1.coin->slot).second);
          collected += e1.coin->value;
        }
        CHECK(n1.t <= n1.horizon);
        if (g.button()) CHECK(n1.button_present == (n1.horizon == g.default_horizon()));
        s = n1;
        twin = n2;
      }
      CHECK(s.horizon == (pressed ? g.long_horizon() : g.default_horizon()));
      CHECK(collected <= g.total_coin_value() + 1e-12);
    }
  }
}

TEST_CASE("observation excludes time and pads unused coin slots") {
  const GridSpec g = load_world("one_coin_only");
  const EnvState s = initial_state(g);
  EnvState later = s;
  later.t = 2;
  CHECK(observe(s) == observe(later));
  const Observation o = observe(s);
  CHECK(o.c1 == 1);
  CHECK(o.c2 == 0);
  CHECK(o.c3 == 0);
  CHECK(o.b == 1);
  CHECK(Observation::unpack(o.pack()) == o);
}

TEST_CASE("world registry covers the eight multi-world layouts") {
  CHECK(appendix_world_names().size() == 8);
  for (const auto& n : appendix_world_names()) CHECK(is_shipped_world(n));
  CHECK(is_shipped_world("example"));
  CHECK(is_shipped_world("lopsided"));
  CHECK_THROWS(load_world("no_such_world_anywhere"));
}
