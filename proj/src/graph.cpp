#include "tritilt/graph.hpp"

#include <stdexcept>
#include <string>

namespace tritilt {

Densities densities(Vertex n, Count edges, Count triangles) noexcept {
  const double nn = static_cast<double>(n);
  return {2.0 * static_cast<double>(edges) / (nn * nn),
          6.0 * static_cast<double>(triangles) / (nn * nn * nn)};
}

Graph::Graph(Vertex n) : n_(n), words_((n + 63) / 64) {
  if (n < 1) {
    throw std::invalid_argument("graph needs at least one vertex");
  }
  bits_.assign(static_cast<std::size_t>(n) * words_, 0);
}

Graph::Graph(Vertex n, std::span<const Edge> edges) : Graph(n) {
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) {
      throw std::out_of_range("edge (" + std::to_string(i) + "," +
                              std::to_string(j) + ") outside vertex range");
    }
    if (i >= j) {
      throw std::invalid_argument("edge pairs must satisfy i < j");
    }
    if (has_edge_unchecked(i, j)) {
      throw std::invalid_argument("duplicate edge (" + std::to_string(i) +
                                  "," + std::to_string(j) + ")");
    }
    apply_flip(i, j, common_neighbors_unchecked(i, j));
  }
}

void Graph::check_pair(Vertex i, Vertex j) const {
  if (i >= n_ || j >= n_) {
    throw std::out_of_range("vertex outside graph");
  }
  if (i == j) {
    throw std::invalid_argument("pair must have distinct vertices");
  }
}

bool Graph::has_edge(Vertex i, Vertex j) const {
  check_pair(i, j);
  return has_edge_unchecked(i, j);
}

Count Graph::common_neighbors(Vertex i, Vertex j) const {
  check_pair(i, j);
  return common_neighbors_unchecked(i, j);
}

Count Graph::flip_edge(Vertex i, Vertex j) {
  check_pair(i, j);
  const Count two_stars = common_neighbors_unchecked(i, j);
  apply_flip(i, j, two_stars);
  return two_stars;
}

Graph Graph::complement() const {
  Graph out(n_);
  for (Vertex i = 0; i < n_; ++i) {
    for (Vertex j = i + 1; j < n_; ++j) {
      if (!has_edge_unchecked(i, j)) {
        out.apply_flip(i, j, out.common_neighbors_unchecked(i, j));
      }
    }
  }
  return out;
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edges_));
  for (Vertex i = 0; i < n_; ++i) {
    for (Vertex j = i + 1; j < n_; ++j) {
      if (has_edge_unchecked(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

Count Graph::recount_edges() const {
  Count total = 0;
  for (Vertex i = 0; i < n_; ++i) {
    for (Vertex j = i + 1; j < n_; ++j) total += has_edge_unchecked(i, j);
  }
  return total;
}

Count Graph::recount_triangles() const {
  Count total = 0;
  for (Vertex i = 0; i < n_; ++i) {
    for (Vertex j = i + 1; j < n_; ++j) {
      if (!has_edge_unchecked(i, j)) continue;
      for (Vertex k = j + 1; k < n_; ++k) {
        total += has_edge_unchecked(i, k) && has_edge_unchecked(j, k);
      }
    }
  }
  return total;
}

}  // namespace tritilt
