#include "crnosc/network.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace crn {

int Complex::molecularity() const {
  int m = 0;
  for (auto& [s, c] : terms) m += c;
  return m;
}

int Complex::coeff(int species) const {
  for (auto& [s, c] : terms)
    if (s == species) return c;
  return 0;
}

void Complex::add(int species, int coefficient) {
  for (auto& [s, c] : terms) {
    if (s == species) {
      c += coefficient;
      return;
    }
  }
  terms.emplace_back(species, coefficient);
  std::sort(terms.begin(), terms.end());
}

int ReactionNetwork::species_index(const std::string& sp) const {
  for (int i = 0; i < num_species(); ++i)
    if (species[i] == sp) return i;
  return -1;
}

int ReactionNetwork::intern_species(const std::string& sp) {
  int i = species_index(sp);
  if (i >= 0) return i;
  species.push_back(sp);
  return num_species() - 1;
}

int ReactionNetwork::intern_complex(const Complex& c) {
  for (int i = 0; i < num_complexes(); ++i)
    if (complexes[i] == c) return i;
  complexes.push_back(c);
  return num_complexes() - 1;
}

Eigen::VectorXi ReactionNetwork::reaction_vector(int j) const {
  Eigen::VectorXi v = Eigen::VectorXi::Zero(num_species());
  for (auto& [s, c] : complexes[reactions[j].product].terms) v[s] += c;
  for (auto& [s, c] : complexes[reactions[j].reactant].terms) v[s] -= c;
  return v;
}

void ReactionNetwork::reorder_species(const std::vector<std::string>& order) {
  if (order.size() != species.size())
    throw std::invalid_argument("reorder_species: size mismatch");
  std::vector<int> perm(species.size());  // old index -> new index
  for (std::size_t i = 0; i < order.size(); ++i) {
    int old = species_index(order[i]);
    if (old < 0) throw std::invalid_argument("reorder_species: unknown species " + order[i]);
    perm[old] = static_cast<int>(i);
  }
  for (auto& cx : complexes) {
    for (auto& [s, c] : cx.terms) s = perm[s];
    std::sort(cx.terms.begin(), cx.terms.end());
  }
  species = order;
}

void ReactionNetwork::validate() const {
  for (int i = 0; i < num_complexes(); ++i)
    for (int j = i + 1; j < num_complexes(); ++j)
      if (complexes[i] == complexes[j])
        throw std::invalid_argument("duplicate complexes in network");
  std::vector<bool> used(complexes.size(), false);
  std::set<std::string> labels;
  std::set<std::pair<int, int>> edges;
  for (auto& r : reactions) {
    if (r.reactant < 0 || r.reactant >= num_complexes() || r.product < 0 ||
        r.product >= num_complexes())
      throw std::invalid_argument("reaction references unknown complex");
    if (r.reactant == r.product)
      throw std::invalid_argument("self-loop reaction");
    if (r.rate_label.empty() || !labels.insert(r.rate_label).second)
      throw std::invalid_argument("missing or duplicate rate label " + r.rate_label);
    if (!edges.insert({r.reactant, r.product}).second)
      throw std::invalid_argument("duplicate reaction");
    used[r.reactant] = used[r.product] = true;
  }
  for (int i = 0; i < num_complexes(); ++i)
    if (!used[i]) throw std::invalid_argument("complex participates in no reaction");
}

bool operator==(const ReactionNetwork& a, const ReactionNetwork& b) {
  if (a.species != b.species || a.num_complexes() != b.num_complexes() ||
      a.num_reactions() != b.num_reactions())
    return false;
  for (int i = 0; i < a.num_complexes(); ++i)
    if (!(a.complexes[i] == b.complexes[i])) return false;
  for (int j = 0; j < a.num_reactions(); ++j) {
    const Reaction &ra = a.reactions[j], &rb = b.reactions[j];
    if (ra.reactant != rb.reactant || ra.product != rb.product ||
        ra.rate_label != rb.rate_label)
      return false;
  }
  return true;
}

Eigen::MatrixXi stoichiometric_matrix(const ReactionNetwork& net) {
  Eigen::MatrixXi g(net.num_species(), net.num_reactions());
  for (int j = 0; j < net.num_reactions(); ++j) g.col(j) = net.reaction_vector(j);
  return g;
}

int network_rank(const ReactionNetwork& net) {
  if (net.num_reactions() == 0) return 0;
  Eigen::MatrixXi g = stoichiometric_matrix(net);
  RationalMatrix m(g.rows(), std::vector<Rational>(g.cols()));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) m[i][j] = Rational(g(i, j));
  return rational_rank(std::move(m));
}

namespace {

// Undirected adjacency over complexes.
std::vector<std::vector<int>> undirected_adjacency(const ReactionNetwork& net) {
  std::vector<std::vector<int>> adj(net.num_complexes());
  for (auto& r : net.reactions) {
    adj[r.reactant].push_back(r.product);
    adj[r.product].push_back(r.reactant);
  }
  return adj;
}

std::vector<int> weak_component_of(const ReactionNetwork& net) {
  auto adj = undirected_adjacency(net);
  std::vector<int> comp(net.num_complexes(), -1);
  int next = 0;
  for (int start = 0; start < net.num_complexes(); ++start) {
    if (comp[start] >= 0) continue;
    std::vector<int> stack{start};
    comp[start] = next;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (comp[w] < 0) {
          comp[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return comp;
}

}  // namespace

int num_linkage_classes(const ReactionNetwork& net) {
  if (net.num_complexes() == 0) return 0;
  auto comp = weak_component_of(net);
  return *std::max_element(comp.begin(), comp.end()) + 1;
}

int deficiency(const ReactionNetwork& net) {
  return net.num_complexes() - num_linkage_classes(net) - network_rank(net);
}

bool is_reversible(const ReactionNetwork& net) {
  if (net.num_reactions() == 0) return true;
  std::set<std::pair<int, int>> edges;
  for (auto& r : net.reactions) edges.insert({r.reactant, r.product});
  for (auto& r : net.reactions)
    if (!edges.count({r.product, r.reactant})) return false;
  return true;
}

bool is_bimolecular(const ReactionNetwork& net) {
  for (auto& c : net.complexes)
    if (c.molecularity() > 2) return false;
  return true;
}

bool is_strongly_connected(const ReactionNetwork& net) {
  // Each linkage class must be strongly connected: within every weak
  // component, every vertex reaches every other along directed edges.
  const int n = net.num_complexes();
  std::vector<std::vector<int>> out(n);
  for (auto& r : net.reactions) out[r.reactant].push_back(r.product);
  auto comp = weak_component_of(net);
  std::vector<int> comp_size(num_linkage_classes(net), 0);
  for (int v = 0; v < n; ++v) ++comp_size[comp[v]];
  for (int start = 0; start < n; ++start) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{start};
    seen[start] = true;
    int reached = 0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      ++reached;
      for (int w : out[v])
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
    }
    if (reached != comp_size[comp[start]]) return false;
  }
  return true;
}

bool undirected_collapse_is_forest(const ReactionNetwork& net) {
  std::set<std::pair<int, int>> edges;
  for (auto& r : net.reactions) {
    int a = std::min(r.reactant, r.product), b = std::max(r.reactant, r.product);
    edges.insert({a, b});
  }
  // A forest has |edges| = |vertices| - #components.
  return static_cast<int>(edges.size()) ==
         net.num_complexes() - num_linkage_classes(net);
}

std::optional<std::vector<Rational>> conservation_vector(const ReactionNetwork& net) {
  if (net.num_species() == 0 || net.num_reactions() == 0) return std::nullopt;
  Eigen::MatrixXi g = stoichiometric_matrix(net);
  std::vector<std::vector<long long>> rows(g.rows(), std::vector<long long>(g.cols()));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) rows[i][j] = g(i, j);
  return positive_left_nullvector(rows);
}

std::string to_string(StructureFlag f) {
  switch (f) {
    case StructureFlag::NoPeriodicOrbits: return "NoPeriodicOrbits";
    case StructureFlag::UniquePositiveEquilibrium: return "UniquePositiveEquilibrium";
    case StructureFlag::PermanentByStrongConnectivity: return "PermanentByStrongConnectivity";
  }
  return "?";
}

StructureReport structural_report(const ReactionNetwork& net) {
  StructureReport rep;
  rep.num_species = net.num_species();
  rep.num_reactions = net.num_reactions();
  rep.num_complexes = net.num_complexes();
  rep.num_linkage_classes = num_linkage_classes(net);
  rep.rank = network_rank(net);
  rep.deficiency = rep.num_complexes - rep.num_linkage_classes - rep.rank;
  rep.reversible = is_reversible(net);
  rep.strongly_connected = is_strongly_connected(net);
  rep.bimolecular = is_bimolecular(net);
  rep.conservation = conservation_vector(net);
  rep.mass_conserving = rep.conservation.has_value();

  if (rep.deficiency == 0) rep.flags.insert(StructureFlag::NoPeriodicOrbits);
  if (rep.deficiency == 1 && rep.strongly_connected && rep.rank == rep.num_species)
    rep.flags.insert(StructureFlag::UniquePositiveEquilibrium);
  if (rep.strongly_connected)
    rep.flags.insert(StructureFlag::PermanentByStrongConnectivity);

  if (rep.num_linkage_classes > 1)
    rep.lint.push_back("strong connectivity evaluated per linkage class (l=" +
                       std::to_string(rep.num_linkage_classes) + ")");
  if (rep.reversible && rep.bimolecular) {
    int pairs = net.num_reactions() / 2;
    if (rep.num_complexes < 5 || pairs < 4)
      rep.lint.push_back(
          "reversible bimolecular network with fewer than 5 complexes or fewer "
          "than 4 reversible reactions cannot admit a limit cycle");
  }
  return rep;
}

}  // namespace crn
