#include "drestlab/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace drestlab {

ActionProbs softmax(const Preferences& theta) {
  const double hi = *std::max_element(theta.begin(), theta.end());
  ActionProbs p{};
  double total = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    p[a] = std::exp(theta[a] - hi);
    total += p[a];
  }
  for (auto& v : p) v /= total;
  return p;
}

ActionProbs mix_uniform(const ActionProbs& probs, double epsilon) {
  ActionProbs out{};
  for (std::size_t a = 0; a < out.size(); ++a)
    out[a] = (1.0 - epsilon) * probs[a] + epsilon / kNumActions;
  return out;
}

const Preferences& PolicyTable::preferences(const Observation& o) const {
  static const Preferences kZero{};
  const auto it = table_.find(o.pack());
  return it == table_.end() ? kZero : it->second;
}

std::vector<std::pair<Observation, Preferences>> PolicyTable::entries() const {
  std::vector<std::pair<Observation, Preferences>> out;
  out.reserve(table_.size());
  for (const auto& [key, prefs] : table_) out.emplace_back(Observation::unpack(key), prefs);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

bool PolicyTable::operator==(const PolicyTable& other) const { return table_ == other.table_; }

std::string dump_policy(const PolicyTable& policy) {
  std::string out;
  char buf[64];
  for (const auto& [o, prefs] : policy.entries()) {
    out += std::to_string(o.x) + ' ' + std::to_string(o.y) + ' ' + std::to_string(o.c1) + ' ' +
           std::to_string(o.c2) + ' ' + std::to_string(o.c3) + ' ' + std::to_string(o.b) + " :";
    for (double v : prefs) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out += ' ';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

PolicyTable parse_policy(std::string_view text) {
  PolicyTable policy;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("policy line " + std::to_string(line_no) + ": missing ':'");
    std::istringstream lhs(line.substr(0, colon));
    std::istringstream rhs(line.substr(colon + 1));
    int fields[6];
    for (int& f : fields)
      if (!(lhs >> f))
        throw std::invalid_argument("policy line " + std::to_string(line_no) + ": bad observation");
    for (int i = 2; i < 6; ++i)
      if (fields[i] != 0 && fields[i] != 1)
        throw std::invalid_argument("policy line " + std::to_string(line_no) + ": bits must be 0/1");
    if (fields[0] < 0 || fields[0] > 255 || fields[1] < 0 || fields[1] > 255)
      throw std::invalid_argument("policy line " + std::to_string(line_no) + ": bad coordinate");
    Observation o{static_cast<std::uint8_t>(fields[0]), static_cast<std::uint8_t>(fields[1]),
                  static_cast<std::uint8_t>(fields[2]), static_cast<std::uint8_t>(fields[3]),
                  static_cast<std::uint8_t>(fields[4]), static_cast<std::uint8_t>(fields[5])};
    Preferences prefs{};
    std::string tok;
    for (auto& v : prefs) {
      if (!(rhs >> tok))
        throw std::invalid_argument("policy line " + std::to_string(line_no) + ": expected 4 values");
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
        throw std::invalid_argument("policy line " + std::to_string(line_no) + ": bad value '" + tok + "'");
    }
    policy.mutable_preferences(o) = prefs;
  }
  return policy;
}

}  // namespace drestlab
