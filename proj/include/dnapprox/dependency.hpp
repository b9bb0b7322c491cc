#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace dnapprox {

/// Dependency graph of a sum W = sum_j X^(j) where X^(j) is a function of the
/// independent variables indexed by M_j ⊆ [M]: j ~ k iff M_j ∩ M_k ≠ ∅.
/// Indices are 0-based. Immutable after construction.
class IntersectionGraph {
 public:
  /// Throws DomainError if subsets is empty or an element lies outside
  /// [0, universe). Cost O(sum |M_j| + sum |L_l|^2) via the inverted index
  /// l -> L_l.
  static IntersectionGraph build(std::vector<std::vector<int>> subsets, int universe);

  int size() const { return static_cast<int>(subsets_.size()); }
  int universe() const { return universe_; }
  /// Sorted, duplicate-free M_j.
  const std::vector<int>& subset(int j) const { return subsets_.at(static_cast<std::size_t>(j)); }
  /// Sorted N_j (excludes j).
  const std::vector<int>& neighbors(int j) const { return adjacency_.at(static_cast<std::size_t>(j)); }
  /// Sorted L_l = {j : l ∈ M_j}.
  const std::vector<int>& summands_containing(int l) const { return inverted_.at(static_cast<std::size_t>(l)); }
  bool adjacent(int j, int k) const;
  std::size_t edge_count() const;

 private:
  int universe_ = 0;
  std::vector<std::vector<int>> subsets_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::vector<int>> inverted_;
};

inline IntersectionGraph build_intersection_graph(std::vector<std::vector<int>> subsets, int universe) {
  return IntersectionGraph::build(std::move(subsets), universe);
}

struct NeighborhoodStats {
  std::vector<int> degrees;
  /// m^{-1} sum_j (D_j + 1)^2.
  double dbar2 = 0.0;
  long m_used = 0;
};

NeighborhoodStats neighborhood_stats(const IntersectionGraph& graph, long m);

/// Index sets of the local decompositions W = W^(j) + Z^(j) and
/// W^(j) = W^(j,k) + Z^(j,k). All lists sorted.
struct DecompositionSets {
  std::vector<int> zj;   ///< {j} ∪ N_j
  std::vector<int> wj;   ///< complement of zj
  std::vector<int> wjk;  ///< [n] \ (N_j ∪ N_k); equals wj when k == j
  std::vector<int> zjk;  ///< wj \ wjk; empty when k == j
};

/// Throws DomainError when k is given and is neither j nor adjacent to j.
DecompositionSets decomposition_sets(const IntersectionGraph& graph, int j, std::optional<int> k = std::nullopt);

/// Reads subsets in the edge-list format: one subset per line as
/// whitespace-separated 0-based element ids; blank lines and lines starting
/// with '#' are skipped. The universe defaults to (largest id + 1).
IntersectionGraph read_subsets(std::istream& in, std::optional<int> universe = std::nullopt);
void write_subsets(std::ostream& out, const IntersectionGraph& graph);

}  // namespace dnapprox
