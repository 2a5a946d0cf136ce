#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace drestlab {

inline constexpr int kNumActions = 4;
inline constexpr int kMaxCoins = 3;

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

enum class Action : std::uint8_t { up = 0, down = 1, left = 2, right = 3 };

inline constexpr std::array<Action, kNumActions> kAllActions = {Action::up, Action::down,
                                                               Action::left, Action::right};

std::string_view to_string(Action a);

struct Coin {
  Cell cell;
  double value = 0.0;
  int slot = 0;  // 1..3, row-major reading order
  std::string token;
  int legend_rank = 0;  // position in the world file's legend
};

struct Button {
  Cell cell;
  int delay = 0;
  std::string token;
};

// Raised for malformed world files; carries the 1-based line number when known.
class WorldFormatError : public std::runtime_error {
 public:
  WorldFormatError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Static world description. Coins are held in slot order; construction
// validates every invariant and builds the cell lookup table.
class GridSpec {
 public:
  GridSpec(std::string name, int width, int height, std::vector<Cell> walls, Cell start,
           std::vector<Coin> coins, std::optional<Button> button, int default_horizon);

  const std::string& name() const { return name_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<Cell>& walls() const { return walls_; }
  Cell start() const { return start_; }
  const std::vector<Coin>& coins() const { return coins_; }
  const std::optional<Button>& button() const { return button_; }
  int default_horizon() const { return default_horizon_; }
  int long_horizon() const { return default_horizon_ + (button_ ? button_->delay : 0); }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool is_wall(Cell c) const { return kind(c) == kWall; }
  bool is_button(Cell c) const { return kind(c) == kButton; }
  // 0-based coin index at `c`, or -1.
  int coin_index_at(Cell c) const {
    const auto k = kind(c);
    return k >= kCoin0 ? k - kCoin0 : -1;
  }
  int cell_index(Cell c) const { return c.y * width_ + c.x; }
  int cell_count() const { return width_ * height_; }

  double total_coin_value() const;

  // Copy with the value of coin `slot` (1-based) replaced.
  GridSpec with_coin_value(int slot, double value) const;
  // Copy without coin `slot`; remaining coins are re-slotted.
  GridSpec without_coin(int slot) const;

 private:
  enum : std::int8_t { kFloor = 0, kWall = 1, kButton = 2, kCoin0 = 3 };
  std::int8_t kind(Cell c) const {
    return in_bounds(c) ? layout_[static_cast<std::size_t>(cell_index(c))] : std::int8_t{kWall};
  }

  std::string name_;
  int width_;
  int height_;
  std::vector<Cell> walls_;
  Cell start_;
  std::vector<Coin> coins_;
  std::optional<Button> button_;
  int default_horizon_;
  std::vector<std::int8_t> layout_;
};

GridSpec parse_gridspec(std::string_view text);
std::string serialize_gridspec(const GridSpec& spec);

struct EnvState {
  Cell agent;
  std::array<bool, kMaxCoins> coin_present{};
  bool button_present = false;
  int t = 0;
  int horizon = 0;

  bool done() const { return t >= horizon; }
  bool operator==(const EnvState&) const = default;
};

EnvState initial_state(const GridSpec& spec);

// Observation vector [x, y, c1, c2, c3, b]. Time is not observable.
struct Observation {
  std::uint8_t x = 0;
  std::uint8_t y = 0;
  std::uint8_t c1 = 0;
  std::uint8_t c2 = 0;
  std::uint8_t c3 = 0;
  std::uint8_t b = 0;

  std::uint32_t pack() const {
    return static_cast<std::uint32_t>(x) | static_cast<std::uint32_t>(y) << 8 |
           static_cast<std::uint32_t>(c1) << 16 | static_cast<std::uint32_t>(c2) << 17 |
           static_cast<std::uint32_t>(c3) << 18 | static_cast<std::uint32_t>(b) << 19;
  }
  static Observation unpack(std::uint32_t key);
  auto operator<=>(const Observation&) const = default;
};

Observation observe(const EnvState& state);

struct CoinEvent {
  int slot = 0;  // 1-based
  double value = 0.0;
  int t = 0;  // timestep reached by the collecting move
};

struct StepEvents {
  std::optional<CoinEvent> coin;
  bool button_pressed = false;
  bool episode_done = false;
};

// Advances one timestep. Throws std::logic_error when the episode is over.
std::pair<EnvState, StepEvents> step(const GridSpec& spec, const EnvState& state, Action a);

// Breadth-first distances from `from` to every cell; -1 for unreachable.
// The button cell is passable (entering it is how it is pressed).
std::vector<int> bfs_distances(const GridSpec& spec, Cell from);

std::vector<int> achievable_lengths(const GridSpec& spec);

}  // namespace drestlab
