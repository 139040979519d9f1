#include "bnsens/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "bnsens/error.hpp"

namespace bnsens {

namespace {

constexpr double kRowSumTolerance = 1e-9;

std::string row_label(const BayesianNetwork& net, const Cpt& cpt, std::size_t row) {
  if (cpt.parents().empty()) return "()";
  const auto assignment = cpt.row_assignment(row);
  std::string out = "(";
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const auto& parent = net.variable(cpt.parents()[i]);
    if (i) out += ", ";
    out += parent.name + "=" + parent.states[assignment[i]];
  }
  return out + ")";
}

}  // namespace

std::optional<std::size_t> Variable::state_index(std::string_view label) const {
  const auto it = std::find(states.begin(), states.end(), label);
  if (it == states.end()) return std::nullopt;
  return static_cast<std::size_t>(it - states.begin());
}

// --- Cpt ---------------------------------------------------------------------

Cpt::Cpt(VarId variable, std::size_t cardinality, std::vector<VarId> parents,
         std::vector<std::size_t> parent_cardinalities, std::vector<double> table)
    : variable_(variable),
      cardinality_(cardinality),
      parents_(std::move(parents)),
      parent_cards_(std::move(parent_cardinalities)),
      table_(std::move(table)) {
  const std::size_t rows = std::accumulate(parent_cards_.begin(), parent_cards_.end(),
                                           std::size_t{1}, std::multiplies<>());
  if (cardinality_ < 2 || parents_.size() != parent_cards_.size() ||
      table_.size() != rows * cardinality_) {
    throw precondition_error(Errc::bad_table, "CPT table has " + std::to_string(table_.size()) +
                                                  " entries, expected " +
                                                  std::to_string(rows * cardinality_));
  }
  locks_.assign(table_.size(), false);
}

std::span<const double> Cpt::row(std::size_t r) const {
  return std::span<const double>(table_).subspan(r * cardinality_, cardinality_);
}

double Cpt::at(std::size_t row, std::size_t state) const {
  return table_.at(row * cardinality_ + state);
}

bool Cpt::locked(std::size_t row, std::size_t state) const {
  return locks_.at(row * cardinality_ + state);
}

bool Cpt::row_locked(std::size_t row) const {
  for (std::size_t s = 0; s < cardinality_; ++s)
    if (locked(row, s)) return true;
  return false;
}

std::size_t Cpt::lock_count() const noexcept {
  return static_cast<std::size_t>(std::count(locks_.begin(), locks_.end(), true));
}

std::size_t Cpt::row_index(std::span<const std::size_t> parent_states) const {
  std::size_t row = 0;
  for (std::size_t i = 0; i < parent_cards_.size(); ++i) row = row * parent_cards_[i] + parent_states[i];
  return row;
}

std::vector<std::size_t> Cpt::row_assignment(std::size_t row) const {
  std::vector<std::size_t> out(parent_cards_.size());
  for (std::size_t i = parent_cards_.size(); i-- > 0;) {
    out[i] = row % parent_cards_[i];
    row /= parent_cards_[i];
  }
  return out;
}

// --- BayesianNetwork ---------------------------------------------------------

VarId BayesianNetwork::add_variable(std::string name, std::vector<std::string> states) {
  if (name.empty()) throw precondition_error(Errc::bad_table, "variable name must not be empty");
  if (index_.count(name))
    throw precondition_error(Errc::duplicate_name, "duplicate variable '" + name + "'");
  if (states.size() < 2)
    throw precondition_error(Errc::bad_table, "variable '" + name + "' needs at least two states");
  std::set<std::string> seen;
  for (const auto& s : states)
    if (!seen.insert(s).second)
      throw precondition_error(Errc::duplicate_name,
                               "duplicate state '" + s + "' in variable '" + name + "'");

  const VarId id = variables_.size();
  const std::size_t card = states.size();
  index_.emplace(name, id);
  variables_.push_back(Variable{std::move(name), std::move(states)});
  cpts_.emplace_back(id, card, std::vector<VarId>{}, std::vector<std::size_t>{},
                     std::vector<double>(card, 1.0 / static_cast<double>(card)));
  return id;
}

void BayesianNetwork::set_cpt(std::string_view variable, const std::vector<std::string>& parents,
                              std::vector<double> table) {
  const VarId x = id(variable);
  std::vector<VarId> parent_ids;
  std::vector<std::size_t> cards;
  for (const auto& p : parents) {
    const VarId pid = id(p);
    if (pid == x)
      throw precondition_error(Errc::cycle, "variable '" + std::string(variable) + "' lists itself as parent");
    if (std::find(parent_ids.begin(), parent_ids.end(), pid) != parent_ids.end())
      throw precondition_error(Errc::duplicate_name, "parent '" + p + "' listed twice");
    parent_ids.push_back(pid);
    cards.push_back(variables_[pid].cardinality());
  }
  cpts_[x] = Cpt(x, variables_[x].cardinality(), std::move(parent_ids), std::move(cards),
                 std::move(table));
}

void BayesianNetwork::set_lock(const ParameterRef& parameter, bool locked) {
  set_lock(resolve(parameter), locked);
}

void BayesianNetwork::set_lock(const Cell& cell, bool locked) {
  auto& cpt = cpts_.at(cell.variable);
  cpt.locks_.at(cell.row * cpt.cardinality_ + cell.state) = locked;
}

std::optional<VarId> BayesianNetwork::find(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarId BayesianNetwork::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw precondition_error(Errc::unknown_variable, "unknown variable '" + std::string(name) + "'");
}

std::vector<VarId> BayesianNetwork::children(VarId id) const {
  std::vector<VarId> out;
  for (const auto& cpt : cpts_) {
    const auto ps = cpt.parents();
    if (std::find(ps.begin(), ps.end(), id) != ps.end()) out.push_back(cpt.variable());
  }
  return out;
}

std::vector<VarId> BayesianNetwork::family(VarId id) const {
  const auto ps = cpts_.at(id).parents();
  std::vector<VarId> out(ps.begin(), ps.end());
  out.push_back(id);
  return out;
}

Cell BayesianNetwork::resolve(const ParameterRef& parameter) const {
  const VarId x = id(parameter.variable);
  const auto& var = variables_[x];
  const auto state = var.state_index(parameter.state);
  if (!state)
    throw precondition_error(Errc::unknown_state, "variable '" + var.name + "' has no state '" +
                                                      parameter.state + "'");
  const auto& cpt = cpts_[x];
  if (parameter.parents.size() != cpt.parents().size())
    throw precondition_error(Errc::unknown_state,
                             "parameter " + to_string(parameter) + " must assign all " +
                                 std::to_string(cpt.parents().size()) + " parents of '" + var.name + "'");

  std::vector<std::size_t> assignment(cpt.parents().size());
  std::vector<bool> assigned(cpt.parents().size(), false);
  for (const auto& [pname, plabel] : parameter.parents) {
    const VarId pid = id(pname);
    const auto ps = cpt.parents();
    const auto pos = std::find(ps.begin(), ps.end(), pid);
    if (pos == ps.end())
      throw precondition_error(Errc::unknown_variable,
                               "'" + pname + "' is not a parent of '" + var.name + "'");
    const auto k = static_cast<std::size_t>(pos - ps.begin());
    if (assigned[k])
      throw precondition_error(Errc::duplicate_name, "parent '" + pname + "' assigned twice");
    const auto ps_state = variables_[pid].state_index(plabel);
    if (!ps_state)
      throw precondition_error(Errc::unknown_state,
                               "variable '" + pname + "' has no state '" + plabel + "'");
    assignment[k] = *ps_state;
    assigned[k] = true;
  }
  return Cell{x, cpt.row_index(assignment), *state};
}

ParameterRef BayesianNetwork::describe(const Cell& cell) const {
  const auto& cpt = cpts_.at(cell.variable);
  const auto& var = variables_[cell.variable];
  ParameterRef out{var.name, var.states.at(cell.state), {}};
  const auto assignment = cpt.row_assignment(cell.row);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const auto& parent = variables_[cpt.parents()[i]];
    out.parents.emplace_back(parent.name, parent.states[assignment[i]]);
  }
  return out;
}

double BayesianNetwork::theta(const Cell& cell) const {
  return cpts_.at(cell.variable).at(cell.row, cell.state);
}

Observation BayesianNetwork::observe(const Evidence& evidence) const {
  Observation out(variables_.size());
  for (const auto& [name, label] : evidence) {
    const VarId v = id(name);
    const auto s = variables_[v].state_index(label);
    if (!s)
      throw precondition_error(Errc::unknown_state,
                               "variable '" + name + "' has no state '" + label + "'");
    out[v] = *s;
  }
  return out;
}

BayesianNetwork BayesianNetwork::with_entry(const Cell& cell, double value) const {
  BayesianNetwork copy = *this;
  auto& cpt = copy.cpts_.at(cell.variable);
  cpt.table_.at(cell.row * cpt.cardinality_ + cell.state) = value;
  return copy;
}

BayesianNetwork BayesianNetwork::with_row(VarId id, std::size_t row,
                                          std::span<const double> values) const {
  BayesianNetwork copy = *this;
  auto& cpt = copy.cpts_.at(id);
  if (values.size() != cpt.cardinality_)
    throw precondition_error(Errc::bad_table, "row length mismatch");
  std::copy(values.begin(), values.end(), cpt.table_.begin() + static_cast<std::ptrdiff_t>(row * cpt.cardinality_));
  return copy;
}

BayesianNetwork BayesianNetwork::without_variables(std::span<const std::string> names) const {
  std::set<VarId> drop;
  for (const auto& n : names) drop.insert(id(n));
  for (const VarId v : drop)
    for (const VarId c : children(v))
      if (!drop.count(c))
        throw precondition_error(Errc::bad_table, "cannot remove '" + variables_[v].name +
                                                      "': child '" + variables_[c].name + "' is kept");

  BayesianNetwork out;
  for (const auto& var : variables_)
    if (!drop.count(*find(var.name))) out.add_variable(var.name, var.states);
  for (const auto& cpt : cpts_) {
    if (drop.count(cpt.variable())) continue;
    std::vector<std::string> parents;
    for (const VarId p : cpt.parents()) parents.push_back(variables_[p].name);
    const auto& name = variables_[cpt.variable()].name;
    out.set_cpt(name, parents, std::vector<double>(cpt.table().begin(), cpt.table().end()));
    auto& target = out.cpts_[out.id(name)];
    target.locks_ = cpt.locks_;
  }
  return out;
}

// --- validation --------------------------------------------------------------

ValidationReport validate_network(const BayesianNetwork& net) {
  ValidationReport report;
  for (VarId v = 0; v < net.size(); ++v) {
    const auto& cpt = net.cpt(v);
    const auto& var = net.variable(v);
    for (std::size_t r = 0; r < cpt.rows(); ++r) {
      const auto row = cpt.row(r);
      double sum = 0.0;
      for (std::size_t s = 0; s < row.size(); ++s) {
        const double p = row[s];
        if (!(p >= 0.0 && p <= 1.0)) {
          report.push_back({"range", "P(" + var.name + "=" + var.states[s] + " | " +
                                         row_label(net, cpt, r) + ") = " + std::to_string(p) +
                                         " is outside [0,1]"});
        }
        sum += p;
      }
      if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "CPT of '" << var.name << "' row " << row_label(net, cpt, r) << " sums to " << sum;
        report.push_back({"row_sum", msg.str()});
      }
    }
  }

  // Kahn's algorithm; whatever is left over sits on or behind a cycle.
  std::vector<std::size_t> indegree(net.size(), 0);
  for (VarId v = 0; v < net.size(); ++v) indegree[v] = net.cpt(v).parents().size();
  std::vector<VarId> ready;
  for (VarId v = 0; v < net.size(); ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const VarId v = ready.back();
    ready.pop_back();
    ++visited;
    for (const VarId c : net.children(v))
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (visited != net.size()) {
    for (VarId v = 0; v < net.size(); ++v) {
      if (indegree[v] == 0) continue;
      for (const VarId p : net.cpt(v).parents())
        if (indegree[p] != 0)
          report.push_back({"cycle", "edge " + net.variable(p).name + " -> " + net.variable(v).name +
                                         " lies on a directed cycle"});
    }
  }
  return report;
}

// --- parameter changes -------------------------------------------------------

BayesianNetwork apply_delta(const BayesianNetwork& net, const ParameterDelta& change) {
  const Cell cell = net.resolve(change.target);
  const auto& var = net.variable(cell.variable);
  const auto& cpt = net.cpt(cell.variable);
  if (!var.binary())
    throw precondition_error(Errc::multi_valued,
                             "'" + var.name + "' has " + std::to_string(var.cardinality()) +
                                 " states; only binary co-variation is supported");
  if (change.delta == 0.0) return net;

  const Cell complement{cell.variable, cell.row, 1 - cell.state};
  if (cpt.locked(cell.row, cell.state))
    throw precondition_error(Errc::locked_parameter, "parameter " + to_string(change.target) + " is locked");
  if (cpt.locked(complement.row, complement.state))
    throw precondition_error(Errc::locked_parameter,
                             "complement of " + to_string(change.target) + " is locked");

  const double updated = net.theta(cell) + change.delta;
  const double updated_complement = net.theta(complement) - change.delta;
  if (!(updated >= 0.0 && updated <= 1.0 && updated_complement >= 0.0 && updated_complement <= 1.0)) {
    std::ostringstream msg;
    msg << "change of " << change.delta << " moves " << to_string(change.target) << " to " << updated
        << ", outside [0,1]";
    throw precondition_error(Errc::out_of_range, msg.str());
  }
  double row[2];
  row[cell.state] = updated;
  row[complement.state] = updated_complement;
  return net.with_row(cell.variable, cell.row, row);
}

BayesianNetwork apply_deltas(const BayesianNetwork& net, std::span<const ParameterDelta> changes) {
  BayesianNetwork out = net;
  for (const auto& c : changes) out = apply_delta(out, c);
  return out;
}

double log_odds(double theta) {
  if (theta <= 0.0) return -std::numeric_limits<double>::infinity();
  if (theta >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(theta) - std::log1p(-theta);
}

double from_log_odds(double value) {
  if (value >= 0.0) return 1.0 / (1.0 + std::exp(-value));
  const double e = std::exp(value);
  return e / (1.0 + e);
}

Evidence merge_evidence(const Evidence& a, const Evidence& b) {
  Evidence out = a;
  for (const auto& [name, label] : b) {
    const auto [it, inserted] = out.emplace(name, label);
    if (!inserted && it->second != label)
      throw precondition_error(Errc::conflicting_evidence,
                               "variable '" + name + "' is assigned both '" + it->second + "' and '" + label + "'");
  }
  return out;
}

bool families_disjoint(const BayesianNetwork& net, VarId x, VarId y) {
  const auto fx = net.family(x);
  const auto fy = net.family(y);
  for (const VarId v : fx)
    if (std::find(fy.begin(), fy.end(), v) != fy.end()) return false;
  return true;
}

std::string to_string(const ParameterRef& parameter) {
  std::string out = parameter.variable + "=" + parameter.state;
  for (std::size_t i = 0; i < parameter.parents.size(); ++i) {
    out += i ? "," : "|";
    out += parameter.parents[i].first + "=" + parameter.parents[i].second;
  }
  return out;
}

std::string to_string(const Evidence& evidence) {
  std::string out;
  for (const auto& [name, label] : evidence) {
    if (!out.empty()) out += ",";
    out += name + "=" + label;
  }
  return out;
}

}  // namespace bnsens
