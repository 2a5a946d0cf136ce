#include "drestlab/gridworld.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <map>
#include <sstream>

namespace drestlab {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::up: return "up";
    case Action::down: return "down";
    case Action::left: return "left";
    case Action::right: return "right";
  }
  return "?";
}

WorldFormatError::WorldFormatError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

std::string describe(Cell c) {
  return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
}

bool row_major_less(Cell a, Cell b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

}  // namespace

GridSpec::GridSpec(std::string name, int width, int height, std::vector<Cell> walls, Cell start,
                   std::vector<Coin> coins, std::optional<Button> button, int default_horizon)
    : name_(std::move(name)),
      width_(width),
      height_(height),
      walls_(std::move(walls)),
      start_(start),
      coins_(std::move(coins)),
      button_(std::move(button)),
      default_horizon_(default_horizon) {
  if (name_.empty()) throw WorldFormatError(0, "world name is empty");
  if (width_ < 1 || height_ < 1 || width_ > 255 || height_ > 255)
    throw WorldFormatError(0, "world dimensions must be in 1..255");
  if (default_horizon_ < 1) throw WorldFormatError(0, "default_horizon must be >= 1");
  if (coins_.size() > static_cast<std::size_t>(kMaxCoins))
    throw WorldFormatError(0, "more than 3 coins");
  if (button_ && button_->delay < 1) throw WorldFormatError(0, "button delay must be >= 1");

  std::sort(walls_.begin(), walls_.end(), row_major_less);
  walls_.erase(std::unique(walls_.begin(), walls_.end()), walls_.end());
  std::stable_sort(coins_.begin(), coins_.end(),
                   [](const Coin& a, const Coin& b) { return row_major_less(a.cell, b.cell); });
  for (std::size_t i = 0; i < coins_.size(); ++i) coins_[i].slot = static_cast<int>(i) + 1;

  layout_.assign(static_cast<std::size_t>(width_ * height_), kFloor);
  std::vector<bool> occupied(layout_.size(), false);
  auto place = [&](Cell c, std::int8_t k, const char* what) {
    if (!in_bounds(c)) throw WorldFormatError(0, std::string(what) + " out of bounds at " + describe(c));
    auto idx = static_cast<std::size_t>(cell_index(c));
    if (occupied[idx]) throw WorldFormatError(0, "overlapping entities at " + describe(c));
    occupied[idx] = true;
    layout_[idx] = k;
  };
  for (Cell w : walls_) place(w, kWall, "wall");
  place(start_, kFloor, "start");
  for (std::size_t i = 0; i < coins_.size(); ++i) {
    if (!(coins_[i].value >= 0.0)) throw WorldFormatError(0, "coin value must be nonnegative");
    place(coins_[i].cell, static_cast<std::int8_t>(kCoin0 + i), "coin");
  }
  if (button_) place(button_->cell, kButton, "button");
}

double GridSpec::total_coin_value() const {
  double total = 0.0;
  for (const auto& c : coins_) total += c.value;
  return total;
}

GridSpec GridSpec::with_coin_value(int slot, double value) const {
  if (slot < 1 || slot > static_cast<int>(coins_.size()))
    throw std::out_of_range("no coin in slot " + std::to_string(slot));
  auto coins = coins_;
  coins[static_cast<std::size_t>(slot - 1)].value = value;
  return GridSpec(name_, width_, height_, walls_, start_, std::move(coins), button_,
                  default_horizon_);
}

GridSpec GridSpec::without_coin(int slot) const {
  if (slot < 1 || slot > static_cast<int>(coins_.size()))
    throw std::out_of_range("no coin in slot " + std::to_string(slot));
  auto coins = coins_;
  coins.erase(coins.begin() + (slot - 1));
  return GridSpec(name_, width_, height_, walls_, start_, std::move(coins), button_,
                  default_horizon_);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool valid_token(std::string_view tok) {
  if (tok.empty() || tok == "A" || tok == "." || tok == "#") return false;
  return tok.find('+') == std::string_view::npos;
}

}  // namespace

GridSpec parse_gridspec(std::string_view text) {
  enum class Section { header, legend, map };
  Section section = Section::header;

  std::optional<std::string> name;
  std::optional<int> horizon;
  struct LegendCoin {
    double value;
    int line;
    int rank;
  };
  std::map<std::string, LegendCoin, std::less<>> coin_tokens;
  std::optional<std::pair<std::string, int>> button_token;
  int button_line = 0;
  std::vector<std::pair<int, std::vector<std::string>>> rows;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;

    if (line == "legend:") {
      if (section == Section::map) throw WorldFormatError(line_no, "legend after map");
      section = Section::legend;
      continue;
    }
    if (line == "map:") {
      section = Section::map;
      continue;
    }

    if (section == Section::map) {
      rows.emplace_back(line_no, split_ws(line));
      continue;
    }

    const auto eq = line.find('=');
    if (eq != std::string_view::npos) {
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key == "name") {
        if (value.empty() || value.find_first_of(" \t") != std::string_view::npos)
          throw WorldFormatError(line_no, "malformed name");
        name = std::string(value);
      } else if (key == "default_horizon") {
        int h = 0;
        if (!parse_number(value, h) || h < 1)
          throw WorldFormatError(line_no, "malformed default_horizon '" + std::string(value) + "'");
        horizon = h;
      } else {
        throw WorldFormatError(line_no, "unknown key '" + std::string(key) + "'");
      }
      continue;
    }

    if (section != Section::legend)
      throw WorldFormatError(line_no, "unexpected line '" + std::string(line) + "'");

    const auto parts = split_ws(line);
    if (parts.size() != 3) throw WorldFormatError(line_no, "malformed legend entry");
    const std::string& token = parts[1];
    if (!valid_token(token)) throw WorldFormatError(line_no, "malformed token '" + token + "'");
    if (coin_tokens.count(token) || (button_token && button_token->first == token))
      throw WorldFormatError(line_no, "duplicate legend token '" + token + "'");
    if (parts[0] == "coin") {
      double v = 0.0;
      if (!parse_number(parts[2], v) || !(v >= 0.0))
        throw WorldFormatError(line_no, "malformed coin value '" + parts[2] + "'");
      coin_tokens.emplace(token, LegendCoin{v, line_no, static_cast<int>(coin_tokens.size())});
    } else if (parts[0] == "button") {
      if (button_token) throw WorldFormatError(line_no, "more than one button");
      int d = 0;
      if (!parse_number(parts[2], d) || d < 1)
        throw WorldFormatError(line_no, "malformed button delay '" + parts[2] + "'");
      button_token = std::make_pair(token, d);
      button_line = line_no;
    } else {
      throw WorldFormatError(line_no, "unknown legend kind '" + parts[0] + "'");
    }
  }

  if (!name) throw WorldFormatError(line_no, "missing name");
  if (!horizon) throw WorldFormatError(line_no, "missing default_horizon");
  if (rows.empty()) throw WorldFormatError(line_no, "missing map");

  const auto width = rows.front().second.size();
  std::vector<Cell> walls;
  std::optional<Cell> start;
  std::vector<Coin> coins;
  std::optional<Button> button;
  std::map<std::string, int, std::less<>> placements;

  for (std::size_t y = 0; y < rows.size(); ++y) {
    const auto& [row_line, cells] = rows[y];
    if (cells.size() != width)
      throw WorldFormatError(row_line, "map row has " + std::to_string(cells.size()) +
                                           " cells, expected " + std::to_string(width));
    for (std::size_t x = 0; x < cells.size(); ++x) {
      const Cell cell{static_cast<int>(x), static_cast<int>(y)};
      const std::string& tok = cells[x];
      if (tok.find('+') != std::string::npos)
        throw WorldFormatError(row_line, "overlapping entities '" + tok + "'");
      if (tok == ".") continue;
      if (tok == "#") {
        walls.push_back(cell);
      } else if (tok == "A") {
        if (start) throw WorldFormatError(row_line, "duplicate agent start");
        start = cell;
      } else if (auto it = coin_tokens.find(tok); it != coin_tokens.end()) {
        if (placements[tok]++ > 0)
          throw WorldFormatError(row_line, "coin token '" + tok + "' placed twice");
        if (coins.size() == static_cast<std::size_t>(kMaxCoins))
          throw WorldFormatError(row_line, "more than 3 coins");
        coins.push_back(Coin{cell, it->second.value, 0, tok, it->second.rank});
      } else if (button_token && tok == button_token->first) {
        if (button) throw WorldFormatError(row_line, "button token placed twice");
        button = Button{cell, button_token->second, tok};
      } else {
        throw WorldFormatError(row_line, "malformed token '" + tok + "'");
      }
    }
  }
  if (!start) throw WorldFormatError(line_no, "map has no agent start 'A'");
  for (const auto& [tok, info] : coin_tokens)
    if (!placements.count(tok))
      throw WorldFormatError(info.line, "coin token '" + tok + "' is never placed");
  if (button_token && !button)
    throw WorldFormatError(button_line, "button token '" + button_token->first + "' is never placed");

  return GridSpec(*name, static_cast<int>(width), static_cast<int>(rows.size()), std::move(walls),
                  *start, std::move(coins), std::move(button), *horizon);
}

namespace {

std::string format_value(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string serialize_gridspec(const GridSpec& spec) {
  std::ostringstream out;
  out << "name = " << spec.name() << '\n';
  out << "default_horizon = " << spec.default_horizon() << '\n';
  out << "legend:\n";
  auto coins = spec.coins();
  std::stable_sort(coins.begin(), coins.end(),
                   [](const Coin& a, const Coin& b) { return a.legend_rank < b.legend_rank; });
  for (const auto& c : coins) {
    const std::string tok = c.token.empty() ? "C" + std::to_string(c.slot) : c.token;
    out << "coin " << tok << ' ' << format_value(c.value) << '\n';
  }
  if (const auto& b = spec.button())
    out << "button " << (b->token.empty() ? "B" : b->token) << ' ' << b->delay << '\n';
  out << "map:\n";
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      const Cell c{x, y};
      std::string tok = ".";
      if (spec.is_wall(c)) {
        tok = "#";
      } else if (c == spec.start()) {
        tok = "A";
      } else if (spec.is_button(c)) {
        tok = spec.button()->token.empty() ? "B" : spec.button()->token;
      } else if (int i = spec.coin_index_at(c); i >= 0) {
        const auto& coin = spec.coins()[static_cast<std::size_t>(i)];
        tok = coin.token.empty() ? "C" + std::to_string(coin.slot) : coin.token;
      }
      out << (x ? " " : "") << tok;
    }
    out << '\n';
  }
  return out.str();
}

EnvState initial_state(const GridSpec& spec) {
  EnvState s;
  s.agent = spec.start();
  for (std::size_t i = 0; i < spec.coins().size(); ++i) s.coin_present[i] = true;
  s.button_present = spec.button().has_value();
  s.t = 0;
  s.horizon = spec.default_horizon();
  return s;
}

Observation Observation::unpack(std::uint32_t key) {
  Observation o;
  o.x = static_cast<std::uint8_t>(key & 0xff);
  o.y = static_cast<std::uint8_t>((key >> 8) & 0xff);
  o.c1 = static_cast<std::uint8_t>((key >> 16) & 1);
  o.c2 = static_cast<std::uint8_t>((key >> 17) & 1);
  o.c3 = static_cast<std::uint8_t>((key >> 18) & 1);
  o.b = static_cast<std::uint8_t>((key >> 19) & 1);
  return o;
}

Observation observe(const EnvState& state) {
  Observation o;
  o.x = static_cast<std::uint8_t>(state.agent.x);
  o.y = static_cast<std::uint8_t>(state.agent.y);
  o.c1 = state.coin_present[0];
  o.c2 = state.coin_present[1];
  o.c3 = state.coin_present[2];
  o.b = state.button_present;
  return o;
}

namespace {

Cell moved(Cell c, Action a) {
  switch (a) {
    case Action::up: return {c.x, c.y - 1};
    case Action::down: return {c.x, c.y + 1};
    case Action::left: return {c.x - 1, c.y};
    case Action::right: return {c.x + 1, c.y};
  }
  return c;
}

}  // namespace

std::pair<EnvState, StepEvents> step(const GridSpec& spec, const EnvState& state, Action a) {
  if (state.done()) throw std::logic_error("step called on a finished episode");
  EnvState next = state;
  StepEvents events;
  const Cell target = moved(state.agent, a);
  if (!spec.is_wall(target)) next.agent = target;
  next.t = state.t + 1;

  if (const int i = spec.coin_index_at(next.agent); i >= 0 && next.coin_present[static_cast<std::size_t>(i)]) {
    next.coin_present[static_cast<std::size_t>(i)] = false;
    const auto& coin = spec.coins()[static_cast<std::size_t>(i)];
    events.coin = CoinEvent{coin.slot, coin.value, next.t};
  }
  if (next.button_present && spec.is_button(next.agent)) {
    next.button_present = false;
    next.horizon = spec.default_horizon() + spec.button()->delay;
    events.button_pressed = true;
  }
  events.episode_done = next.t == next.horizon;
  return {next, events};
}

std::vector<int> bfs_distances(const GridSpec& spec, Cell from) {
  std::vector<int> dist(static_cast<std::size_t>(spec.cell_count()), -1);
  if (!spec.in_bounds(from) || spec.is_wall(from)) return dist;
  std::deque<Cell> queue{from};
  dist[static_cast<std::size_t>(spec.cell_index(from))] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    const int d = dist[static_cast<std::size_t>(spec.cell_index(c))];
    for (Action a : kAllActions) {
      const Cell n = moved(c, a);
      if (spec.is_wall(n)) continue;
      auto& dn = dist[static_cast<std::size_t>(spec.cell_index(n))];
      if (dn < 0) {
        dn = d + 1;
        queue.push_back(n);
      }
    }
  }
  return dist;
}

std::vector<int> achievable_lengths(const GridSpec& spec) {
  std::vector<int> lengths{spec.default_horizon()};
  if (const auto& b = spec.button()) {
    const int d = bfs_distances(spec, spec.start())[static_cast<std::size_t>(spec.cell_index(b->cell))];
    if (d >= 0 && d <= spec.default_horizon()) lengths.push_back(spec.default_horizon() + b->delay);
  }
  return lengths;
}

}  // namespace drestlab
