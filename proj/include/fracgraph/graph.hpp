#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fracgraph/error.hpp"
#include "fracgraph/operator.hpp"

namespace fracgraph {

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 1.0;
};

// Immutable weighted graph. Undirected graphs keep both orientations of
// every edge so that the arc list always describes W exactly.
class Graph {
 public:
  Graph() = default;

  Graph(std::size_t n, bool directed, std::vector<Edge> arcs,
        std::vector<std::int64_t> original_ids = {})
      : n_(n), directed_(directed), arcs_(std::move(arcs)), ids_(std::move(original_ids)) {
    if (n_ == 0) throw InputError("graph must have at least one node");
    if (ids_.empty()) {
      ids_.resize(n_);
      std::iota(ids_.begin(), ids_.end(), std::int64_t{0});
    }
    if (ids_.size() != n_) throw InputError("original id map has wrong length");
    validate();
    build_adjacency();
  }

  // Builds an undirected graph from one orientation per edge.
  static Graph undirected(std::size_t n, const std::vector<Edge>& edges,
                          std::vector<std::int64_t> ids = {}) {
    std::vector<Edge> arcs;
    arcs.reserve(2 * edges.size());
    for (const auto& e : edges) {
      arcs.push_back(e);
      arcs.push_back({e.dst, e.src, e.weight});
    }
    return Graph(n, false, std::move(arcs), std::move(ids));
  }

  std::size_t n() const { return n_; }
  bool directed() const { return directed_; }
  const std::vector<Edge>& arcs() const { return arcs_; }
  const std::vector<std::int64_t>& original_ids() const { return ids_; }

  // Adjacency in CSR form, sorted by target.
  const std::vector<std::size_t>& out_offsets() const { return out_off_; }
  const std::vector<std::size_t>& out_targets() const { return out_tgt_; }
  const std::vector<std::size_t>& in_offsets() const { return in_off_; }
  const std::vector<std::size_t>& in_sources() const { return in_src_; }

  Eigen::MatrixXd weight_matrix() const {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& a : arcs_) w(a.src, a.dst) = a.weight;
    return w;
  }

  // One orientation per undirected edge (src < dst); all arcs when directed.
  std::vector<Edge> edges() const {
    if (directed_) return arcs_;
    std::vector<Edge> out;
    for (const auto& a : arcs_)
      if (a.src < a.dst) out.push_back(a);
    return out;
  }

 private:
  void validate() const {
    std::map<std::pair<std::size_t, std::size_t>, double> seen;
    for (const auto& a : arcs_) {
      if (a.src >= n_ || a.dst >= n_) throw InputError("arc endpoint out of range");
      if (a.src == a.dst)
        throw InputError("self-loop at node " + std::to_string(ids_[a.src]));
      if (!(a.weight > 0.0) || !std::isfinite(a.weight))
        throw InputError("arc weights must be positive and finite");
      if (!seen.emplace(std::make_pair(a.src, a.dst), a.weight).second)
        throw InputError("duplicate arc " + std::to_string(ids_[a.src]) + " -> " +
                         std::to_string(ids_[a.dst]));
    }
    if (!directed_) {
      for (const auto& [key, w] : seen) {
        auto it = seen.find({key.second, key.first});
        if (it == seen.end() || it->second != w)
          throw InputError("undirected graph is not symmetric at " +
                           std::to_string(ids_[key.first]) + " - " +
                           std::to_string(ids_[key.second]));
      }
    }
  }

  void build_adjacency() {
    out_off_.assign(n_ + 1, 0);
    in_off_.assign(n_ + 1, 0);
    for (const auto& a : arcs_) {
      ++out_off_[a.src + 1];
      ++in_off_[a.dst + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) {
      out_off_[i + 1] += out_off_[i];
      in_off_[i + 1] += in_off_[i];
    }
    out_tgt_.resize(arcs_.size());
    in_src_.resize(arcs_.size());
    auto op = out_off_, ip = in_off_;
    for (const auto& a : arcs_) {
      out_tgt_[op[a.src]++] = a.dst;
      in_src_[ip[a.dst]++] = a.src;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      std::sort(out_tgt_.begin() + out_off_[i], out_tgt_.begin() + out_off_[i + 1]);
      std::sort(in_src_.begin() + in_off_[i], in_src_.begin() + in_off_[i + 1]);
    }
  }

  std::size_t n_ = 0;
  bool directed_ = true;
  std::vector<Edge> arcs_;
  std::vector<std::int64_t> ids_;
  std::vector<std::size_t> out_off_, out_tgt_, in_off_, in_src_;
};

struct EdgeListOptions {
  bool one_based = false;
  bool force_undirected = false;
};

// Parses "src dst [weight]" lines; '#' starts a comment line.
inline Graph parse_edge_list(std::istream& in, const EdgeListOptions& opt = {},
                             const std::string& name = "<input>") {
  struct Raw {
    std::int64_t s, d;
    double w;
    std::size_t line;
  };
  std::vector<Raw> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
    std::istringstream ls(line);
    std::int64_t s = 0, d = 0;
    double w = 1.0;
    auto where = [&] { return name + ":" + std::to_string(lineno) + ": "; };
    if (!(ls >> s >> d)) throw InputError(where() + "malformed line '" + line + "'");
    std::string tok;
    if (ls >> tok) {
      std::size_t used = 0;
      try {
        w = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw InputError(where() + "malformed weight '" + tok + "'");
      if (ls >> tok) throw InputError(where() + "too many fields");
    }
    if (opt.one_based) {
      --s;
      --d;
    }
    if (s < 0 || d < 0) throw InputError(where() + "negative node id");
    if (s == d) throw InputError(where() + "self-loop at node " + std::to_string(s));
    if (!std::isfinite(w)) throw InputError(where() + "non-finite weight");
    if (w < 0) throw InputError(where() + "negative weight");
    if (w == 0) continue;  // w = 0 means "no edge"
    raw.push_back({s, d, w, lineno});
  }
  if (raw.empty()) throw InputError(name + ": no edges");

  std::vector<std::int64_t> ids;
  for (const auto& r : raw) {
    ids.push_back(r.s);
    ids.push_back(r.d);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index = [&](std::int64_t id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> arcs;
  for (const auto& r : raw) {
    auto key = std::make_pair(index(r.s), index(r.d));
    if (!arcs.emplace(key, std::make_pair(r.w, r.line)).second)
      throw InputError(name + ":" + std::to_string(r.line) + ": duplicate edge " +
                       std::to_string(r.s) + " " + std::to_string(r.d));
  }
  std::vector<Edge> out;
  if (opt.force_undirected) {
    // Symmetric closure. A reverse arc listed explicitly must carry the same weight.
    std::map<std::pair<std::size_t, std::size_t>, double> sym;
    for (const auto& [key, wl] : arcs) {
      auto rev = arcs.find({key.second, key.first});
      if (rev != arcs.end() && rev->second.first != wl.first)
        throw InputError(name + ":" + std::to_string(std::max(wl.second, rev->second.second)) +
                         ": asymmetric weights for undirected edge");
      sym[key] = wl.first;
      sym[{key.second, key.first}] = wl.first;
    }
    for (const auto& [key, w] : sym) out.push_back({key.first, key.second, w});
  } else {
    for (const auto& [key, wl] : arcs) out.push_back({key.first, key.second, wl.first});
  }
  const std::size_t n = ids.size();
  return Graph(n, !opt.force_undirected, std::move(out), std::move(ids));
}

inline Graph load_edge_list(const std::string& path, const EdgeListOptions& opt = {}) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open edge list '" + path + "'");
  return parse_edge_list(f, opt, path);
}

// Subgraph induced by `keep` (any order); relative order of kept nodes is preserved.
inline Graph induced_subgraph(const Graph& g, std::vector<std::size_t> keep) {
  std::sort(keep.begin(), keep.end());
  std::vector<std::size_t> pos(g.n(), g.n());
  for (std::size_t k = 0; k < keep.size(); ++k) pos[keep[k]] = k;
  std::vector<Edge> arcs;
  for (const auto& a : g.arcs())
    if (pos[a.src] < g.n() && pos[a.dst] < g.n()) arcs.push_back({pos[a.src], pos[a.dst], a.weight});
  std::vector<std::int64_t> ids;
  for (auto k : keep) ids.push_back(g.original_ids()[k]);
  return Graph(keep.size(), g.directed(), std::move(arcs), std::move(ids));
}

enum class Connectivity { Weak, Strong };

// Component label per node, labels 0..c-1.
inline std::vector<std::size_t> component_labels(const Graph& g, Connectivity mode,
                                                 std::size_t* count = nullptr) {
  const std::size_t n = g.n();
  const std::size_t none = n;
  std::vector<std::size_t> label(n, none);
  std::size_t c = 0;
  const auto& oo = g.out_offsets();
  const auto& ot = g.out_targets();
  const auto& io = g.in_offsets();
  const auto& is = g.in_sources();
  if (mode == Connectivity::Weak) {
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
      if (label[s] != none) continue;
      label[s] = c;
      stack.push_back(s);
      while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto k = oo[v]; k < oo[v + 1]; ++k)
          if (label[ot[k]] == none) label[ot[k]] = c, stack.push_back(ot[k]);
        for (auto k = io[v]; k < io[v + 1]; ++k)
          if (label[is[k]] == none) label[is[k]] = c, stack.push_back(is[k]);
      }
      ++c;
    }
  } else {
    // Kosaraju: finishing order on G, then sweep G^T.
    std::vector<std::size_t> order;
    std::vector<char> seen(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> st;
    for (std::size_t s = 0; s < n; ++s) {
      if (seen[s]) continue;
      seen[s] = 1;
      st.push_back({s, oo[s]});
      while (!st.empty()) {
        auto& [v, k] = st.back();
        if (k < oo[v + 1]) {
          auto w = ot[k++];
          if (!seen[w]) seen[w] = 1, st.push_back({w, oo[w]});
        } else {
          order.push_back(v);
          st.pop_back();
        }
      }
    }
    std::vector<std::size_t> stack;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (label[*it] != none) continue;
      label[*it] = c;
      stack.push_back(*it);
      while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto k = io[v]; k < io[v + 1]; ++k)
          if (label[is[k]] == none) label[is[k]] = c, stack.push_back(is[k]);
      }
      ++c;
    }
  }
  if (count) *count = c;
  return label;
}

// Largest component; ties go to the component holding the smallest original id.
inline Graph largest_connected_component(const Graph& g, Connectivity mode = Connectivity::Weak) {
  std::size_t c = 0;
  auto label = component_labels(g, mode, &c);
  std::vector<std::size_t> size(c, 0);
  std::vector<std::int64_t> min_id(c, INT64_MAX);
  for (std::size_t v = 0; v < g.n(); ++v) {
    ++size[label[v]];
    min_id[label[v]] = std::min(min_id[label[v]], g.original_ids()[v]);
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < c; ++k)
    if (size[k] > size[best] || (size[k] == size[best] && min_id[k] < min_id[best])) best = k;
  if (c == 1) return g;
  std::vector<std::size_t> keep;
  for (std::size_t v = 0; v < g.n(); ++v)
    if (label[v] == best) keep.push_back(v);
  return induced_subgraph(g, keep);
}

struct DegreeVectors {
  Eigen::VectorXd d;      // total incident weight (the undirected degree)
  Eigen::VectorXd d_in;
  Eigen::VectorXd d_out;
};

// For digraphs d = d_in + d_out; for undirected graphs d = d_in = d_out.
inline DegreeVectors degree_vectors(const Graph& g) {
  DegreeVectors dv{Eigen::VectorXd::Zero(g.n()), Eigen::VectorXd::Zero(g.n()),
                   Eigen::VectorXd::Zero(g.n())};
  for (const auto& a : g.arcs()) {
    dv.d_out[a.src] += a.weight;
    dv.d_in[a.dst] += a.weight;
  }
  dv.d = g.directed() ? Eigen::VectorXd(dv.d_in + dv.d_out) : dv.d_out;
  return dv;
}

struct LaplacianOptions {
  bool dangling_fixup = false;
};

inline DenseOperator build_laplacian(const Graph& g, LaplacianKind kind,
                                     const LaplacianOptions& opt = {}) {
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd w = g.weight_matrix();
  auto dv = degree_vectors(g);
  OperatorMeta meta{kind, opt.dangling_fixup, std::nullopt, "assembled"};
  auto node = [&](Eigen::Index i) { return std::to_string(g.original_ids()[i]); };

  bool undirected_kind = kind == LaplacianKind::UndirectedCombinatorial ||
                         kind == LaplacianKind::UndirectedRandomWalk ||
                         kind == LaplacianKind::UndirectedSymmetricNormalized;
  if (undirected_kind && g.directed())
    throw InputError(std::string(to_string(kind)) + " Laplacian requires an undirected graph");

  // Fixup for dangling nodes: a zero degree becomes 1 and the matching zero
  // row (out) or column (in) of W becomes the constant 1/n.
  auto fix_rows = [&](Eigen::VectorXd& d, bool rows, const char* what) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d[i] > 0) continue;
      if (!opt.dangling_fixup) throw InputError(std::string(what) + " at node " + node(i));
      d[i] = 1.0;
      if (rows)
        w.row(i).setConstant(1.0 / n);
      else
        w.col(i).setConstant(1.0 / n);
    }
  };

  switch (kind) {
    case LaplacianKind::UndirectedCombinatorial:
      return DenseOperator(Eigen::MatrixXd(dv.d.asDiagonal()) - w, meta);
    case LaplacianKind::DirectedOut:
      if (opt.dangling_fixup) fix_rows(dv.d_out, true, "zero out-degree");
      return DenseOperator(Eigen::MatrixXd(dv.d_out.asDiagonal()) - w, meta);
    case LaplacianKind::DirectedIn:
      if (opt.dangling_fixup) fix_rows(dv.d_in, false, "zero in-degree");
      return DenseOperator(Eigen::MatrixXd(dv.d_in.asDiagonal()) - w, meta);
    case LaplacianKind::UndirectedRandomWalk:
    case LaplacianKind::UndirectedSymmetricNormalized: {
      fix_rows(dv.d, true, "zero degree");
      Eigen::MatrixXd lap = Eigen::MatrixXd(dv.d.asDiagonal()) - w;
      if (kind == LaplacianKind::UndirectedRandomWalk)
        return DenseOperator(dv.d.cwiseInverse().asDiagonal() * lap, meta);
      Eigen::VectorXd isq = dv.d.cwiseSqrt().cwiseInverse();
      return DenseOperator(isq.asDiagonal() * lap * isq.asDiagonal(), meta);
    }
    case LaplacianKind::DirectedOutNormalized: {
      fix_rows(dv.d_out, true, "zero out-degree");
      Eigen::MatrixXd lap = Eigen::MatrixXd(dv.d_out.asDiagonal()) - w;
      return DenseOperator(dv.d_out.cwiseInverse().asDiagonal() * lap, meta);
    }
    case LaplacianKind::Other:
      break;
  }
  throw InputError("unsupported Laplacian kind");
}

// n x m incidence matrix, one column per edge (per arc for digraphs).
inline DenseOperator build_incidence(const Graph& g) {
  auto es = g.edges();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(g.n(), es.size());
  for (std::size_t j = 0; j < es.size(); ++j) {
    double s = std::sqrt(es[j].weight);
    b(es[j].src, j) = s;
    b(es[j].dst, j) = -s;
  }
  return DenseOperator(b, {LaplacianKind::Other, false, std::nullopt, "incidence"});
}

}  // namespace fracgraph
