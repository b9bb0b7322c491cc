#include "dnapprox/dependency.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dnapprox/errors.hpp"

namespace dnapprox {

IntersectionGraph IntersectionGraph::build(std::vector<std::vector<int>> subsets, int universe) {
  if (subsets.empty()) throw DomainError("IntersectionGraph: no subsets");
  if (universe < 1) throw DomainError("IntersectionGraph: universe must be positive");
  IntersectionGraph g;
  g.universe_ = universe;
  g.inverted_.assign(static_cast<std::size_t>(universe), {});
  for (std::size_t j = 0; j < subsets.size(); ++j) {
    auto& s = subsets[j];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int l : s) {
      if (l < 0 || l >= universe) throw DomainError("IntersectionGraph: element out of range");
      g.inverted_[static_cast<std::size_t>(l)].push_back(static_cast<int>(j));
    }
  }
  g.subsets_ = std::move(subsets);
  g.adjacency_.assign(g.subsets_.size(), {});
  for (std::size_t j = 0; j < g.subsets_.size(); ++j) {
    auto& adj = g.adjacency_[j];
    for (int l : g.subsets_[j]) {
      for (int k : g.inverted_[static_cast<std::size_t>(l)]) {
        if (k != static_cast<int>(j)) adj.push_back(k);
      }
    }
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return g;
}

bool IntersectionGraph::adjacent(int j, int k) const {
  const auto& adj = neighbors(j);
  return std::binary_search(adj.begin(), adj.end(), k);
}

std::size_t IntersectionGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& adj : adjacency_) twice += adj.size();
  return twice / 2;
}

NeighborhoodStats neighborhood_stats(const IntersectionGraph& graph, long m) {
  if (m < 1) throw DomainError("neighborhood_stats: m must be at least 1");
  NeighborhoodStats stats;
  stats.m_used = m;
  long long sum = 0;
  for (int j = 0; j < graph.size(); ++j) {
    const int dj = static_cast<int>(graph.neighbors(j).size());
    stats.degrees.push_back(dj);
    sum += static_cast<long long>(dj + 1) * (dj + 1);
  }
  stats.dbar2 = static_cast<double>(sum) / static_cast<double>(m);
  return stats;
}

DecompositionSets decomposition_sets(const IntersectionGraph& graph, int j, std::optional<int> k) {
  const int n = graph.size();
  if (j < 0 || j >= n) throw DomainError("decomposition_sets: j out of range");
  DecompositionSets sets;
  const auto& nj = graph.neighbors(j);
  sets.zj = nj;
  sets.zj.insert(std::lower_bound(sets.zj.begin(), sets.zj.end(), j), j);
  std::vector<char> in_zj(static_cast<std::size_t>(n), 0);
  for (int i : sets.zj) in_zj[static_cast<std::size_t>(i)] = 1;
  for (int i = 0; i < n; ++i) {
    if (!in_zj[static_cast<std::size_t>(i)]) sets.wj.push_back(i);
  }
  if (!k || *k == j) {
    sets.wjk = sets.wj;
    return sets;
  }
  if (*k < 0 || *k >= n || !graph.adjacent(j, *k)) {
    throw DomainError("decomposition_sets: k must equal j or be a neighbour of j");
  }
  std::vector<char> near(static_cast<std::size_t>(n), 0);
  for (int i : nj) near[static_cast<std::size_t>(i)] = 1;
  for (int i : graph.neighbors(*k)) near[static_cast<std::size_t>(i)] = 1;
  for (int i : sets.wj) {
    (near[static_cast<std::size_t>(i)] ? sets.zjk : sets.wjk).push_back(i);
  }
  return sets;
}

IntersectionGraph read_subsets(std::istream& in, std::optional<int> universe) {
  std::vector<std::vector<int>> subsets;
  int largest = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<int> subset;
    std::string tok;
    while (fields >> tok) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw DomainError("read_subsets: bad integer '" + tok + "' on line " + std::to_string(lineno));
      }
      subset.push_back(v);
      largest = std::max(largest, v);
    }
    subsets.push_back(std::move(subset));
  }
  return IntersectionGraph::build(std::move(subsets), universe.value_or(largest + 1));
}

void write_subsets(std::ostream& out, const IntersectionGraph& graph) {
  for (int j = 0; j < graph.size(); ++j) {
    const auto& s = graph.subset(j);
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
    out << '\n';
  }
}

}  // namespace dnapprox
