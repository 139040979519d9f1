#include <algorithm>
#include <set>

#include "bnsens/engine.hpp"
#include "bnsens/error.hpp"

namespace bnsens {

namespace {

struct Candidate {
  std::size_t fill = 0;
  double weight = 0.0;
  VarId var = 0;

  bool operator<(const Candidate& o) const {
    if (fill != o.fill) return fill < o.fill;
    if (weight != o.weight) return weight < o.weight;
    return var < o.var;
  }
};

}  // namespace

std::shared_ptr<const JoinTree> JoinTree::build(const BayesianNetwork& net) {
  std::shared_ptr<JoinTree> tree(new JoinTree());
  const std::size_t n = net.size();
  tree->cards_.resize(n);
  tree->families_.resize(n);
  for (VarId v = 0; v < n; ++v) {
    tree->cards_[v] = net.variable(v).cardinality();
    tree->families_[v] = net.family(v);
  }

  // Moral graph.
  std::vector<std::set<VarId>> adj(n);
  for (VarId v = 0; v < n; ++v) {
    const auto& fam = tree->families_[v];
    for (const VarId a : fam)
      for (const VarId b : fam)
        if (a != b) adj[a].insert(b);
  }

  // Greedy min-fill, ties by cluster weight then by id.
  std::vector<bool> eliminated(n, false);
  std::vector<std::size_t> position(n, 0);
  std::vector<std::vector<VarId>> cluster_vars;
  for (std::size_t step = 0; step < n; ++step) {
    Candidate best{};
    bool found = false;
    for (VarId v = 0; v < n; ++v) {
      if (eliminated[v]) continue;
      Candidate c{0, static_cast<double>(tree->cards_[v]), v};
      for (const VarId a : adj[v]) {
        c.weight *= static_cast<double>(tree->cards_[a]);
        for (const VarId b : adj[v])
          if (a < b && !adj[a].count(b)) ++c.fill;
      }
      if (!found || c < best) {
        best = c;
        found = true;
      }
    }
    const VarId v = best.var;
    std::vector<VarId> vars(adj[v].begin(), adj[v].end());
    for (const VarId a : vars) {
      for (const VarId b : vars)
        if (a != b) adj[a].insert(b);
      adj[a].erase(v);
    }
    vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    eliminated[v] = true;
    position[v] = step;
    tree->order_.push_back(v);
    cluster_vars.push_back(std::move(vars));
  }

  tree->home_.resize(n);
  tree->clusters_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const VarId v = tree->order_[i];
    tree->home_[v] = i;
    auto& cl = tree->clusters_[i];
    cl.vars = cluster_vars[i];
    for (const VarId w : cl.vars) cl.cards.push_back(tree->cards_[w]);

    std::size_t parent = npos;
    for (const VarId w : cl.vars) {
      if (w == v) continue;
      cl.separator.push_back(w);
      parent = std::min(parent == npos ? position[w] : parent, position[w]);
    }
    // Disconnected components hang off the last cluster through an empty separator.
    if (parent == npos && i + 1 < n) parent = n - 1;
    cl.parent = parent;
    if (parent != npos) tree->clusters_[parent].children.push_back(i);
  }

  tree->owner_.resize(n);
  for (VarId v = 0; v < n; ++v) {
    std::size_t first = npos;
    for (const VarId w : tree->families_[v]) first = std::min(first == npos ? position[w] : first, position[w]);
    tree->owner_[v] = first;
    tree->clusters_[first].cpts.push_back(v);
  }
  return tree;
}

std::size_t JoinTree::width() const noexcept {
  std::size_t w = 0;
  for (const auto& c : clusters_) w = std::max(w, c.vars.size());
  return w == 0 ? 0 : w - 1;
}

Factor JoinTree::unit(std::size_t cluster) const {
  const auto& cl = clusters_[cluster];
  std::size_t size = 1;
  for (const auto c : cl.cards) size *= c;
  return Factor(cl.vars, cl.cards, std::vector<double>(size, 1.0));
}

Propagation JoinTree::propagate(std::span<const Factor> tables, const Observation& observed) const {
  const std::size_t n = clusters_.size();
  if (tables.size() != n || observed.size() != n)
    throw precondition_error(Errc::structure_mismatch, "table count does not match the join tree");

  Propagation prop;
  prop.tree_ = shared_from_this();
  prop.tables_.assign(tables.begin(), tables.end());
  prop.local_.resize(n);
  prop.local_owner_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (const VarId v : clusters_[c].cpts) {
      prop.local_[c].push_back(tables[v]);
      prop.local_owner_[c].push_back(v);
    }
  }
  for (VarId v = 0; v < n; ++v) {
    if (!observed[v]) continue;
    prop.local_[home_[v]].push_back(Factor::indicator(v, cards_[v], *observed[v]));
    prop.local_owner_[home_[v]].push_back(npos);
  }
  if (n == 0) {
    prop.probability_ = 1.0;
    return prop;
  }

  auto local_product = [&](std::size_t c) {
    Factor f = unit(c);
    for (const auto& g : prop.local_[c]) f = f.product(g);
    return f;
  };

  prop.up_.resize(n);
  prop.down_.resize(n);
  // Children always precede parents in elimination order, so index order is a post-order.
  for (std::size_t c = 0; c < n; ++c) {
    Factor f = local_product(c);
    for (const auto ch : clusters_[c].children) f = f.product(prop.up_[ch]);
    if (clusters_[c].parent == npos) {
      prop.probability_ = f.total();
    } else {
      prop.up_[c] = f.marginalize_onto(clusters_[c].separator);
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    const auto& cl = clusters_[c];
    if (cl.children.empty()) continue;
    Factor base = local_product(c);
    if (cl.parent != npos) base = base.product(prop.down_[c]);
    for (const auto ch : cl.children) {
      Factor f = base;
      for (const auto other : cl.children)
        if (other != ch) f = f.product(prop.up_[other]);
      prop.down_[ch] = f.marginalize_onto(clusters_[ch].separator);
    }
  }
  return prop;
}

std::vector<double> Propagation::family_derivative(VarId x) const {
  const JoinTree& tree = *tree_;
  if (tree.clusters_.empty()) return {};
  const std::size_t c = tree.owner_.at(x);
  const auto& cl = tree.clusters_[c];

  Factor f = tree.unit(c);
  for (std::size_t k = 0; k < local_[c].size(); ++k)
    if (local_owner_[c][k] != x) f = f.product(local_[c][k]);
  if (cl.parent != JoinTree::npos) f = f.product(down_[c]);
  for (const auto ch : cl.children) f = f.product(up_[ch]);

  const Factor marginal = f.marginalize_onto(tree.families_[x]);
  return std::vector<double>(marginal.values().begin(), marginal.values().end());
}

}  // namespace bnsens
