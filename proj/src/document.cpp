#include "bnsens/document.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "bnsens/error.hpp"
#include "bnsens/text.hpp"

namespace bnsens {

namespace {

constexpr std::string_view kPunctuation = "{}()|:=,";

struct Token {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
  bool punct = false;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
    } else if (kPunctuation.find(c) != std::string_view::npos) {
      out.push_back({std::string(1, c), line, col, true});
      advance(1);
    } else {
      const std::size_t start = i;
      const std::size_t l = line, cl = col;
      while (i < text.size() && text[i] != '#' && !std::isspace(static_cast<unsigned char>(text[i])) &&
             kPunctuation.find(text[i]) == std::string_view::npos)
        advance(1);
      out.push_back({std::string(text.substr(start, i - start)), l, cl, false});
    }
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {
    const auto lines = std::count(text.begin(), text.end(), '\n');
    end_line_ = static_cast<std::size_t>(lines) + 1;
  }

  NetworkDocument run() {
    NetworkDocument doc;
    std::vector<bool> has_cpt;
    while (!done()) {
      const Token& kw = next();
      if (kw.punct) fail(kw, "expected 'network', 'variable', 'cpt' or 'lock', found '" + kw.text + "'");
      if (kw.text == "network") {
        doc.name = word("network name").text;
      } else if (kw.text == "variable") {
        parse_variable(doc.network);
        has_cpt.push_back(false);
      } else if (kw.text == "cpt") {
        parse_cpt(doc.network, has_cpt);
      } else if (kw.text == "lock") {
        parse_lock(doc.network);
      } else {
        fail(kw, "unknown declaration '" + kw.text + "'");
      }
    }
    for (VarId v = 0; v < doc.network.size(); ++v)
      if (!has_cpt[v])
        throw ParseError("variable '" + doc.network.variable(v).name + "' has no cpt block", end_line_, 1);

    const auto report = validate_network(doc.network);
    if (!report.empty()) throw ParseError(report.front().message, end_line_, 1);
    return doc;
  }

 private:
  bool done() const { return pos_ >= tokens_.size(); }

  const Token& peek() const {
    if (done()) throw ParseError("unexpected end of document", end_line_, 1);
    return tokens_[pos_];
  }

  const Token& next() {
    const Token& t = peek();
    ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(message, at.line, at.column);
  }

  const Token& word(std::string_view what) {
    const Token& t = next();
    if (t.punct) fail(t, "expected " + std::string(what) + ", found '" + t.text + "'");
    return t;
  }

  void expect(char c) {
    const Token& t = next();
    if (!t.punct || t.text[0] != c) fail(t, std::string("expected '") + c + "', found '" + t.text + "'");
  }

  bool accept(char c) {
    if (!done() && peek().punct && peek().text[0] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  VarId lookup(const BayesianNetwork& net, const Token& t) const {
    const auto id = net.find(t.text);
    if (!id) fail(t, "unknown variable '" + t.text + "'");
    return *id;
  }

  std::size_t state_of(const BayesianNetwork& net, VarId v, const Token& t) const {
    const auto s = net.variable(v).state_index(t.text);
    if (!s) fail(t, "variable '" + net.variable(v).name + "' has no state '" + t.text + "'");
    return *s;
  }

  double number(const Token& t) const {
    double value = 0.0;
    const auto* first = t.text.data();
    const auto* last = first + t.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail(t, "expected a probability, found '" + t.text + "'");
    if (!(value >= 0.0 && value <= 1.0)) fail(t, "probability " + t.text + " is outside [0,1]");
    return value;
  }

  void parse_variable(BayesianNetwork& net) {
    const Token& name = word("variable name");
    if (net.find(name.text)) fail(name, "duplicate variable '" + name.text + "'");
    expect('{');
    std::vector<std::string> states;
    while (!accept('}')) {
      const Token& s = word("state label");
      if (std::find(states.begin(), states.end(), s.text) != states.end())
        fail(s, "duplicate state '" + s.text + "'");
      states.push_back(s.text);
    }
    if (states.size() < 2) fail(name, "variable '" + name.text + "' needs at least two states");
    net.add_variable(name.text, std::move(states));
  }

  void parse_cpt(BayesianNetwork& net, std::vector<bool>& has_cpt) {
    const Token& name = word("variable name");
    const VarId x = lookup(net, name);
    if (has_cpt[x]) fail(name, "second cpt block for '" + name.text + "'");
    has_cpt[x] = true;

    std::vector<std::string> parents;
    std::vector<VarId> parent_ids;
    if (accept('|')) {
      while (!done() && !peek().punct) {
        const Token& p = next();
        const VarId pid = lookup(net, p);
        if (pid == x) fail(p, "'" + name.text + "' cannot be its own parent");
        if (std::find(parent_ids.begin(), parent_ids.end(), pid) != parent_ids.end())
          fail(p, "parent '" + p.text + "' listed twice");
        parents.push_back(p.text);
        parent_ids.push_back(pid);
      }
    }
    const Token& open = peek();
    expect('{');

    const std::size_t card = net.variable(x).cardinality();
    std::size_t rows = 1;
    for (const VarId p : parent_ids) rows *= net.variable(p).cardinality();
    std::vector<double> table(rows * card, 0.0);
    std::vector<bool> filled(rows, false);

    while (!accept('}')) {
      const Token& start = peek();
      std::vector<std::size_t> assignment;
      if (accept('(')) {
        while (!accept(')')) {
          const Token& label = word("parent state");
          if (assignment.size() >= parent_ids.size())
            fail(label, "row of '" + name.text + "' lists more than " + std::to_string(parent_ids.size()) +
                            " parent states");
          assignment.push_back(state_of(net, parent_ids[assignment.size()], label));
        }
      }
      if (assignment.size() != parent_ids.size())
        fail(start, "row of '" + name.text + "' must list " + std::to_string(parent_ids.size()) +
                        " parent states");

      std::size_t row = 0;
      for (std::size_t i = 0; i < parent_ids.size(); ++i)
        row = row * net.variable(parent_ids[i]).cardinality() + assignment[i];
      if (filled[row]) fail(start, "duplicate row " + row_text(net, parent_ids, assignment) + " in cpt of '" + name.text + "'");
      filled[row] = true;

      std::vector<const Token*> probs;
      while (!done() && !peek().punct) probs.push_back(&next());
      if (probs.size() != card)
        fail(start, "row " + row_text(net, parent_ids, assignment) + " of '" + name.text + "' has " +
                        std::to_string(probs.size()) + " probabilities, expected " + std::to_string(card));
      double sum = 0.0;
      for (std::size_t s = 0; s < card; ++s) {
        table[row * card + s] = number(*probs[s]);
        sum += table[row * card + s];
      }
      if (!(std::abs(sum - 1.0) <= 1e-9)) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "row " << row_text(net, parent_ids, assignment) << " of '" << name.text << "' sums to " << sum;
        fail(start, msg.str());
      }
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (!filled[r]) {
        std::vector<std::size_t> assignment(parent_ids.size());
        std::size_t rest = r;
        for (std::size_t i = parent_ids.size(); i-- > 0;) {
          const auto c = net.variable(parent_ids[i]).cardinality();
          assignment[i] = rest % c;
          rest /= c;
        }
        fail(open, "cpt of '" + name.text + "' is missing row " + row_text(net, parent_ids, assignment));
      }
    }
    net.set_cpt(name.text, parents, std::move(table));
  }

  void parse_lock(BayesianNetwork& net) {
    const Token& start = peek();
    ParameterRef ref;
    ref.variable = word("variable name").text;
    expect('=');
    ref.state = word("state label").text;
    if (accept('|')) {
      do {
        std::string parent = word("parent name").text;
        expect('=');
        ref.parents.emplace_back(std::move(parent), word("state label").text);
      } while (accept(','));
    }
    try {
      net.set_lock(ref, true);
    } catch (const Error& e) {
      fail(start, e.what());
    }
  }

  static std::string row_text(const BayesianNetwork& net, const std::vector<VarId>& parents,
                              const std::vector<std::size_t>& assignment) {
    std::string out = "(";
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (i) out += " ";
      out += net.variable(parents[i]).states[assignment[i]];
    }
    return out + ")";
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t end_line_ = 1;
};

}  // namespace

NetworkDocument parse_document(std::string_view text) { return Parser(text).run(); }

BayesianNetwork parse_network(std::string_view text) { return parse_document(text).network; }

std::string serialize_network(const BayesianNetwork& net, std::string_view name) {
  std::string out;
  if (!name.empty()) out += "network " + std::string(name) + "\n\n";
  for (const auto& var : net.variables()) {
    out += "variable " + var.name + " {";
    for (const auto& s : var.states) out += " " + s;
    out += " }\n";
  }
  for (VarId v = 0; v < net.size(); ++v) {
    const auto& cpt = net.cpt(v);
    out += "\ncpt " + net.variable(v).name;
    if (!cpt.parents().empty()) {
      out += " |";
      for (const VarId p : cpt.parents()) out += " " + net.variable(p).name;
    }
    out += " {\n";
    for (std::size_t r = 0; r < cpt.rows(); ++r) {
      out += "  (";
      const auto assignment = cpt.row_assignment(r);
      for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (i) out += " ";
        out += net.variable(cpt.parents()[i]).states[assignment[i]];
      }
      out += ")";
      for (const double p : cpt.row(r)) out += " " + format_shortest(p);
      out += "\n";
    }
    out += "}\n";
  }
  bool first_lock = true;
  for (VarId v = 0; v < net.size(); ++v) {
    const auto& cpt = net.cpt(v);
    for (std::size_t r = 0; r < cpt.rows(); ++r)
      for (std::size_t s = 0; s < cpt.cardinality(); ++s)
        if (cpt.locked(r, s)) {
          if (first_lock) out += "\n";
          first_lock = false;
          out += "lock " + to_string(net.describe(Cell{v, r, s})) + "\n";
        }
  }
  return out;
}

NetworkDocument load_network_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open network file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_document(buffer.str());
}

}  // namespace bnsens
