#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace tritilt {

using Vertex = std::uint32_t;
using Count = std::int64_t;
using Edge = std::pair<Vertex, Vertex>;

/// Edge density 2E/n^2 and triangle density 6T/n^3.
struct Densities {
  double edge = 0.0;
  double triangle = 0.0;
};

Densities densities(Vertex n, Count edges, Count triangles) noexcept;

constexpr Count pair_count(Vertex n) noexcept {
  return static_cast<Count>(n) * (static_cast<Count>(n) - 1) / 2;
}

constexpr Count triple_count(Vertex n) noexcept {
  return n < 3 ? 0
               : static_cast<Count>(n) * (static_cast<Count>(n) - 1) *
                     (static_cast<Count>(n) - 2) / 6;
}

/// Dense simple graph stored as packed adjacency rows, with the edge count E
/// and triangle count T kept in sync on every flip.
///
/// The number of common neighbours L_ij of a pair is a word-parallel AND of
/// two rows, and toggling ij changes T by exactly +/- L_ij (L_ij taken before
/// the toggle), so a flip costs O(n/64).
class Graph {
 public:
  explicit Graph(Vertex n);

  /// Throws std::out_of_range for a vertex >= n and std::invalid_argument for
  /// a diagonal, unordered (i >= j) or repeated pair.
  Graph(Vertex n, std::span<const Edge> edges);

  Vertex order() const noexcept { return n_; }
  Count edge_count() const noexcept { return edges_; }
  Count triangle_count() const noexcept { return triangles_; }
  Densities densities() const noexcept {
    return tritilt::densities(n_, edges_, triangles_);
  }

  bool has_edge(Vertex i, Vertex j) const;
  Count common_neighbors(Vertex i, Vertex j) const;

  /// Toggles ij and returns L_ij as it was before the toggle.
  Count flip_edge(Vertex i, Vertex j);

  // Unchecked hot-path variants. Callers guarantee i != j, both < n.
  bool has_edge_unchecked(Vertex i, Vertex j) const noexcept {
    return (row(i)[j >> 6] >> (j & 63)) & 1U;
  }

  Count common_neighbors_unchecked(Vertex i, Vertex j) const noexcept {
    const std::uint64_t* a = row(i);
    const std::uint64_t* b = row(j);
    Count total = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      total += std::popcount(a[w] & b[w]);
    }
    return total;
  }

  /// Toggles ij given its current common-neighbour count.
  /// Precondition: two_stars == common_neighbors(i, j).
  void apply_flip(Vertex i, Vertex j, Count two_stars) noexcept {
    const bool present = has_edge_unchecked(i, j);
    row(i)[j >> 6] ^= std::uint64_t{1} << (j & 63);
    row(j)[i >> 6] ^= std::uint64_t{1} << (i & 63);
    if (present) {
      edges_ -= 1;
      triangles_ -= two_stars;
    } else {
      edges_ += 1;
      triangles_ += two_stars;
    }
  }

  Graph complement() const;
  std::vector<Edge> edge_list() const;

  // Full O(n^2) / O(n^3) recounts, independent of the cached values.
  Count recount_edges() const;
  Count recount_triangles() const;

  bool operator==(const Graph& other) const = default;

 private:
  void check_pair(Vertex i, Vertex j) const;
  std::uint64_t* row(Vertex v) noexcept { return bits_.data() + v * words_; }
  const std::uint64_t* row(Vertex v) const noexcept {
    return bits_.data() + v * words_;
  }

  Vertex n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
  Count edges_ = 0;
  Count triangles_ = 0;
};

}  // namespace tritilt
