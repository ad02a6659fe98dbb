#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>

#include "fracgraph/error.hpp"

namespace fracgraph {

enum class LaplacianKind {
  UndirectedCombinatorial,
  UndirectedRandomWalk,
  UndirectedSymmetricNormalized,
  DirectedOut,
  DirectedIn,
  DirectedOutNormalized,
  Other,
};

inline const char* to_string(LaplacianKind k) {
  switch (k) {
    case LaplacianKind::UndirectedCombinatorial: return "undirected";
    case LaplacianKind::UndirectedRandomWalk: return "undirected-rw";
    case LaplacianKind::UndirectedSymmetricNormalized: return "undirected-sym";
    case LaplacianKind::DirectedOut: return "directed-out";
    case LaplacianKind::DirectedIn: return "directed-in";
    case LaplacianKind::DirectedOutNormalized: return "directed-out-normalized";
    case LaplacianKind::Other: return "other";
  }
  return "other";
}

inline LaplacianKind laplacian_kind_from_string(const std::string& s) {
  for (auto k : {LaplacianKind::UndirectedCombinatorial, LaplacianKind::UndirectedRandomWalk,
                 LaplacianKind::UndirectedSymmetricNormalized, LaplacianKind::DirectedOut,
                 LaplacianKind::DirectedIn, LaplacianKind::DirectedOutNormalized}) {
    if (s == to_string(k)) return k;
  }
  throw InputError("unknown Laplacian kind '" + s + "'");
}

inline bool is_combinatorial(LaplacianKind k) {
  return k == LaplacianKind::UndirectedCombinatorial || k == LaplacianKind::DirectedOut ||
         k == LaplacianKind::DirectedIn;
}

struct OperatorMeta {
  LaplacianKind kind = LaplacianKind::Other;
  bool dangling_fixup = false;
  std::optional<double> alpha;
  std::string method;  // "assembled", "symmetric-eig", "schur-parlett", ...
};

// Dense real square matrix plus where it came from.
struct DenseOperator {
  Eigen::MatrixXd entries;
  OperatorMeta meta;

  DenseOperator() = default;
  explicit DenseOperator(Eigen::MatrixXd m, OperatorMeta md = {})
      : entries(std::move(m)), meta(std::move(md)) {}

  Eigen::Index n() const { return entries.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries(i, j); }
};

inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

inline bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(1.0, max_abs(m));
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

inline void require_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw InputError(std::string(what) + ": expected a nonempty square matrix");
  if (!m.allFinite()) throw InputError(std::string(what) + ": matrix has non-finite entries");
}

}  // namespace fracgraph
