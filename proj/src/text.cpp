#include "bnsens/text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "bnsens/error.hpp"

namespace bnsens {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::pair<std::string, std::string> split_assignment(std::string_view item, std::string_view whole) {
  const auto eq = item.find('=');
  if (eq == std::string_view::npos)
    throw ParseError("expected Variable=state in '" + std::string(whole) + "', got '" + std::string(item) + "'");
  auto name = trim(item.substr(0, eq));
  auto state = trim(item.substr(eq + 1));
  if (name.empty() || state.empty() || state.find('=') != std::string_view::npos)
    throw ParseError("expected Variable=state in '" + std::string(whole) + "', got '" + std::string(item) + "'");
  return {std::string(name), std::string(state)};
}

template <typename F>
void for_each_item(std::string_view text, F&& f) {
  text = trim(text);
  if (text.empty()) return;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    f(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) return;
    start = comma + 1;
  }
}

}  // namespace

std::string format_shortest(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_significant(double value, int digits) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  if (value == 0.0) value = 0.0;  // no "-0"
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*g", digits, value);
  return buf.data();
}

Evidence parse_evidence(std::string_view text) {
  Evidence out;
  for_each_item(text, [&](std::string_view item) {
    auto [name, state] = split_assignment(item, text);
    const auto [it, inserted] = out.emplace(name, state);
    if (!inserted && it->second != state)
      throw ParseError("'" + name + "' is assigned both '" + it->second + "' and '" + state + "'");
  });
  return out;
}

ParameterRef parse_parameter(std::string_view text) {
  const auto bar = text.find('|');
  ParameterRef ref;
  std::tie(ref.variable, ref.state) = split_assignment(trim(text.substr(0, bar)), text);
  if (bar != std::string_view::npos) {
    for_each_item(text.substr(bar + 1), [&](std::string_view item) {
      ref.parents.push_back(split_assignment(item, text));
    });
    if (ref.parents.empty()) throw ParseError("empty parent list in '" + std::string(text) + "'");
  }
  return ref;
}

QueryConstraint parse_constraint(std::string_view text, const Evidence& evidence) {
  const std::string whole(text);
  auto bad = [&](const std::string& why) { return ParseError("constraint '" + whole + "': " + why); };

  std::string_view s = trim(text);
  if (s.size() < 2 || (s[0] != 'P' && s[0] != 'p') || trim(s.substr(1)).front() != '(')
    throw bad("expected P(target[|evidence]) >= p or <= p");
  s = trim(s.substr(1));
  const auto close = s.find(')');
  if (close == std::string_view::npos) throw bad("missing ')'");
  const std::string_view inside = s.substr(1, close - 1);
  std::string_view rest = trim(s.substr(close + 1));

  QueryConstraint c;
  if (rest.starts_with(">=")) {
    c.direction = Direction::at_least;
  } else if (rest.starts_with("<=")) {
    c.direction = Direction::at_most;
  } else {
    throw bad("expected '>=' or '<=' after ')'");
  }
  rest = trim(rest.substr(2));
  const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), c.threshold);
  if (ec != std::errc() || ptr != rest.data() + rest.size()) throw bad("threshold is not a number");

  const auto bar = inside.find('|');
  c.target = parse_evidence(inside.substr(0, bar));
  if (c.target.empty()) throw bad("empty target event");
  Evidence inner;
  if (bar != std::string_view::npos) inner = parse_evidence(inside.substr(bar + 1));
  try {
    c.evidence = merge_evidence(evidence, inner);
  } catch (const Error& e) {
    throw bad(e.what());
  }
  return c;
}

std::string to_string(const QueryConstraint& c) {
  std::string out = "P(" + to_string(c.target);
  if (!c.evidence.empty()) out += "|" + to_string(c.evidence);
  out += c.direction == Direction::at_least ? ")>=" : ")<=";
  return out + format_shortest(c.threshold);
}

}  // namespace bnsens
