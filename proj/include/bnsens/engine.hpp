#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnsens/factor.hpp"
#include "bnsens/model.hpp"

namespace bnsens {

class JoinTree;

/// One evidence propagation over a join tree.
///
/// Holds all messages, so the probability of evidence and the partial
/// derivative of that probability with respect to every CPT entry are
/// available without further passes. Derivatives come from multiplying
/// everything except the CPT in question and marginalizing onto its family.
/// This stays exact at parameters equal to 0 or 1.
class Propagation {
 public:
  double probability() const noexcept { return probability_; }

  /// d Pr(e) / d theta_{x|u} for every entry of X's CPT, in CPT layout.
  /// Raw partials: all other entries (row complements included) held fixed.
  std::vector<double> family_derivative(VarId x) const;

 private:
  friend class JoinTree;
  Propagation() = default;

  std::shared_ptr<const JoinTree> tree_;
  std::vector<Factor> tables_;
  std::vector<std::vector<Factor>> local_;  // per cluster: assigned CPTs and evidence indicators
  std::vector<std::vector<VarId>> local_owner_;  // CPT owner per local factor, or npos for indicators
  std::vector<Factor> up_;    // cluster -> parent
  std::vector<Factor> down_;  // parent -> cluster
  double probability_ = 0.0;
};

/// Cluster tree built from a min-fill elimination order of the moral graph.
/// Depends only on the network structure.
class JoinTree : public std::enable_shared_from_this<JoinTree> {
 public:
  static std::shared_ptr<const JoinTree> build(const BayesianNetwork& net);

  /// `tables[v]` is the factor standing in for the CPT of v; it may be
  /// unnormalized (probing) or an indicator (second derivatives).
  Propagation propagate(std::span<const Factor> tables, const Observation& observed) const;

  std::size_t cluster_count() const noexcept { return clusters_.size(); }
  /// Largest cluster size minus one.
  std::size_t width() const noexcept;
  std::span<const VarId> elimination_order() const noexcept { return order_; }

 private:
  friend class Propagation;
  struct Cluster {
    std::vector<VarId> vars;
    std::vector<std::size_t> cards;
    std::vector<VarId> separator;  // shared with the parent
    std::size_t parent = npos;
    std::vector<std::size_t> children;
    std::vector<VarId> cpts;  // CPTs assigned here
  };
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  JoinTree() = default;

  Factor unit(std::size_t cluster) const;

  std::vector<Cluster> clusters_;
  std::vector<VarId> order_;
  std::vector<std::size_t> home_;    // variable -> cluster where it was eliminated
  std::vector<std::size_t> owner_;   // variable -> cluster holding its CPT
  std::vector<std::size_t> cards_;
  std::vector<std::vector<VarId>> families_;
  std::vector<std::size_t> schedule_;  // post-order, root last
};

/// A network bundled with its join tree.
class InferenceEngine {
 public:
  explicit InferenceEngine(BayesianNetwork net);

  const BayesianNetwork& network() const noexcept { return net_; }
  const JoinTree& tree() const noexcept { return *tree_; }

  Propagation propagate(const Evidence& evidence) const;
  Propagation propagate(const Evidence& evidence, std::span<const Factor> tables) const;
  double joint(const Evidence& evidence) const;

  /// The CPTs as factors, indexed by variable.
  const std::vector<Factor>& tables() const noexcept { return tables_; }

 private:
  BayesianNetwork net_;
  std::shared_ptr<const JoinTree> tree_;
  std::vector<Factor> tables_;
};

/// Co-varied first derivatives d Pr(e) / d theta_{x|u} for binary variables:
/// raw partial of theta_{x|u} minus raw partial of theta_{x'|u}.
struct DerivativeTable {
  Evidence evidence;
  std::map<Cell, double> entries;

  double at(const Cell& cell) const { return entries.at(cell); }
};

/// Co-varied mixed second derivatives for a pair of binary CPTs, keyed by the
/// first-state cells (theta_{x|u}, theta_{y|v}). The other state of either
/// row flips the sign.
struct SecondDerivativeTable {
  Evidence evidence;
  VarId x = 0;
  VarId y = 0;
  std::map<std::pair<Cell, Cell>, double> entries;

  double at(const Cell& cx, const Cell& cy) const;
};

/// Pr(e). Empty evidence gives 1.
double joint_probability(const BayesianNetwork& net, const Evidence& evidence);

/// Pr(z | e); throws Errc::zero_evidence when Pr(e) = 0. Conflicting z and e give 0.
double posterior(const BayesianNetwork& net, const Evidence& target, const Evidence& evidence);

/// Raw partial of the network polynomial for Pr(e) with respect to one entry,
/// by two-point multilinear probing: Pr(e)|_{theta=1} - Pr(e)|_{theta=0}.
double raw_partial(const BayesianNetwork& net, const Evidence& evidence, const ParameterRef& parameter);

/// One propagation; entries for both states of every row of every requested CPT.
DerivativeTable covaried_derivatives(const BayesianNetwork& net, const Evidence& evidence,
                                     std::span<const std::string> variables);

/// One propagation per entry of X's CPT, each with that CPT replaced by the
/// entry's indicator, reading Y's family derivative. Exact at extreme values.
SecondDerivativeTable second_covaried_derivatives(const BayesianNetwork& net, const Evidence& evidence,
                                                  std::string_view x, std::string_view y);

/// Pr(e) by enumerating every world. Reference semantics for testing;
/// throws Errc::too_large past 2^22 joint states.
double brute_force_joint(const BayesianNetwork& net, const Evidence& evidence);

/// Pr(u) for each parent instantiation (row) of X's CPT, prior to any evidence.
std::vector<double> parent_marginals(const BayesianNetwork& net, VarId x);

/// Joint-state limit for the enumeration oracles.
inline constexpr std::size_t kEnumerationLimit = std::size_t{1} << 22;

/// Calls `visit(world, probability)` for every complete assignment with the
/// observed variables fixed. Shared by the brute-force oracles.
template <typename Visit>
void enumerate_worlds(const BayesianNetwork& net, const Observation& observed, Visit&& visit);

}  // namespace bnsens

#include "bnsens/detail/enumerate.hpp"
