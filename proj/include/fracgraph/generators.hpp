#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "fracgraph/error.hpp"
#include "fracgraph/graph.hpp"
#include "fracgraph/rng.hpp"

namespace fracgraph::gen {

inline Graph path(std::size_t n, bool directed = false) {
  if (n < 2) throw InputError("path needs n >= 2");
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return directed ? Graph(n, true, e) : Graph::undirected(n, e);
}

// Directed cycle uses arcs i -> i+1 (mod n).
inline Graph cycle(std::size_t n, bool directed = false) {
  if (n < 3) throw InputError("cycle needs n >= 3");
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, 1.0});
  return directed ? Graph(n, true, e) : Graph::undirected(n, e);
}

inline Graph star(std::size_t leaves) {
  if (leaves < 1) throw InputError("star needs at least one leaf");
  std::vector<Edge> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.push_back({0, i, 1.0});
  return Graph::undirected(leaves + 1, e);
}

inline Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.push_back({i, j, 1.0});
  return Graph::undirected(n, e);
}

// rows x cols 4-neighbour lattice, node r*cols + c.
inline Graph grid(std::size_t rows, std::size_t cols) {
  if (rows * cols < 2) throw InputError("grid needs at least two nodes");
  std::vector<Edge> e;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t v = r * cols + c;
      if (c + 1 < cols) e.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) e.push_back({v, v + cols, 1.0});
    }
  return Graph::undirected(rows * cols, e);
}

// Points uniform in the unit square, edge when distance <= radius. Not
// necessarily connected; callers usually take the largest component.
inline Graph random_geometric(std::size_t n, double radius, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {uniform01(rng), uniform01(rng)};
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double dx = pts[i].first - pts[j].first, dy = pts[i].second - pts[j].second;
      if (dx * dx + dy * dy <= radius * radius) e.push_back({i, j, 1.0});
    }
  return Graph::undirected(n, e);
}

struct RandomGraphOptions {
  double extra_edge_prob = 0.05;
  bool weighted = false;  // weights uniform in [0.5, 2)
};

// Connected undirected graph: random spanning tree plus Erdos-Renyi extras.
inline Graph random_connected(std::size_t n, std::uint64_t seed, RandomGraphOptions opt = {}) {
  if (n < 2) throw InputError("random graph needs n >= 2");
  Rng rng(seed);
  auto weight = [&] { return opt.weighted ? 0.5 + 1.5 * uniform01(rng) : 1.0; };
  std::set<std::pair<std::size_t, std::size_t>> have;
  std::vector<Edge> e;
  for (std::size_t v = 1; v < n; ++v) {
    auto u = static_cast<std::size_t>(uniform01(rng) * v);
    have.insert({u, v});
    e.push_back({u, v, weight()});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!have.count({i, j}) && uniform01(rng) < opt.extra_edge_prob) e.push_back({i, j, weight()});
  return Graph::undirected(n, e);
}

// Weakly connected digraph: randomly oriented spanning tree plus random arcs.
// Some nodes may end up with zero out-degree (dangling).
inline Graph random_digraph(std::size_t n, std::uint64_t seed, RandomGraphOptions opt = {}) {
  if (n < 2) throw InputError("random graph needs n >= 2");
  Rng rng(seed);
  auto weight = [&] { return opt.weighted ? 0.5 + 1.5 * uniform01(rng) : 1.0; };
  std::set<std::pair<std::size_t, std::size_t>> have;
  std::vector<Edge> e;
  for (std::size_t v = 1; v < n; ++v) {
    auto u = static_cast<std::size_t>(uniform01(rng) * v);
    auto [a, b] = uniform01(rng) < 0.5 ? std::make_pair(u, v) : std::make_pair(v, u);
    have.insert({a, b});
    e.push_back({a, b, weight()});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !have.count({i, j}) && uniform01(rng) < opt.extra_edge_prob)
        e.push_back({i, j, weight()});
  return Graph(n, true, e);
}

}  // namespace fracgraph::gen
