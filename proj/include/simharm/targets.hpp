#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "simharm/rng.hpp"

namespace simharm {

// Coordinate cap for model points; hyperbolic targets are additionally capped
// at intrinsic dimension 3 (hyperboloid in R^4).
inline constexpr int kMaxModelDim = 16;
// Reduced deck words longer than this raise an error.
inline constexpr int kMaxDeckWord = 64;

enum class TargetKind { Euclidean, Hyperbolic, FlatTorus, Genus2Octagon, MetricTree };

// Row-major 3x3 matrix; all the linear algebra the hyperboloid model of H^2
// needs for its Minkowski isometries.
struct Mat3 {
  std::array<double, 9> a{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return Mat3{}; }
  Mat3 operator*(const Mat3& o) const;
  void apply(const double* x, double* out) const;  // out = M x
  // For Lorentz matrices (J-orthogonal, J = diag(-1,1,1)): inverse = J M^T J.
  Mat3 minkowski_inverse() const;
  double max_abs_diff(const Mat3& o) const;
};

// Deck transformation attached to an edge. The payload depends on the target
// kind: an integer translation for flat tori, a freely reduced generator word
// with its cached isometry matrix for the genus-2 group, nothing for simply
// connected targets and metric trees.
//
// Word convention: letters a..d are the group generators, A..D their
// inverses; "xy" acts as x after y on column vectors, i.e. matrices multiply
// in written order. The empty word is the identity.
struct DeckElement {
  std::vector<std::int32_t> shift;  // flat torus
  std::string word;                 // genus-2
  Mat3 mat;                         // cached matrix for genus-2
};

struct TreeData {
  std::int32_t vertex_count = 0;
  std::vector<std::array<std::int32_t, 2>> edges;
  std::vector<double> lengths;
  std::vector<double> dist;         // vertex distances, row-major V x V
  std::vector<std::int32_t> next;   // next-hop vertex on the path i -> j
};

// Regular hyperbolic octagon with vertex angle pi/4, sides paired by the word
// a b a^-1 b^-1 c d c^-1 d^-1. Generators are the deck transformations of the
// four edge loops at the single quotient vertex; everything is derived from
// the octagon geometry at construction time and cross-checked.
struct Genus2Data {
  std::array<Mat3, 4> gens;      // a, b, c, d
  std::array<Mat3, 4> gens_inv;
  // Extended-precision copies used for word evaluation: generator entries
  // reach ~1e3, so double-precision letter-by-letter products would lose
  // ~1e-10 per letter.
  std::array<std::array<long double, 9>, 4> gens_hi, gens_hi_inv;
  std::array<std::array<double, 3>, 8> octagon;  // vertices P_0..P_7
  // vertex_words[k] maps P_0 to P_k; these are the prefixes of the relator.
  std::array<std::string, 8> vertex_words;
  double circumradius = 0.0;
  double side_length = 0.0;
};

class GeodesicTarget;
using TargetPtr = std::shared_ptr<const GeodesicTarget>;

// A nonpositively curved geodesic space that simplicial maps land in. Points
// are raw coordinate blocks of model_dim() doubles:
//   euclidean(n), flat_torus(n): a point of R^n (for the torus: a lift to the
//     universal cover; distance() is the cover distance, wrapping lives in
//     the deck elements);
//   hyperbolic(n), genus2_octagon: hyperboloid sheet <x,x> = -1, x0 > 0 in
//     Minkowski R^{n,1};
//   metric_tree: (edge id, arclength offset from the edge tail).
// Instances are immutable; share them through TargetPtr.
class GeodesicTarget {
 public:
  TargetKind kind() const { return kind_; }
  int dim() const { return dim_; }              // intrinsic dimension
  int model_dim() const { return model_dim_; }  // coordinates per point
  // 0 for flat targets, -1 for the hyperbolic ones, -inf for trees.
  double curvature_upper_bound() const;
  bool supports_flow() const { return kind_ != TargetKind::MetricTree; }

  double distance(const double* p, const double* q) const;
  void geodesic_eval(const double* p, const double* q, double t, double* out) const;
  // Riemannian log/exp; unavailable on metric trees (std::logic_error).
  void log_map(const double* p, const double* q, double* out) const;
  void exp_map(const double* p, const double* v, double* out) const;
  void project_point(double* p) const;
  void project_tangent(const double* p, double* v) const;
  double tangent_dot(const double* p, const double* u, const double* v) const;
  double tangent_norm(const double* p, const double* v) const;
  // Orthonormal tangent basis at p: dim() rows of model_dim() coordinates.
  void tangent_frame(const double* p, double* frame) const;
  // |<x,x> + 1| on hyperboloid models, 0 elsewhere.
  double model_constraint_residual(const double* p) const;
  void validate_point(const double* p, double tol = 1e-10) const;

  DeckElement deck_identity() const;
  DeckElement deck_compose(const DeckElement& g, const DeckElement& h) const;
  DeckElement deck_inverse(const DeckElement& g) const;
  bool deck_is_identity(const DeckElement& g, double tol = 1e-9) const;
  void deck_apply(const DeckElement& g, const double* p, double* out) const;
  // Differential of the deck action on tangent coordinates.
  void deck_apply_tangent(const DeckElement& g, const double* v, double* out) const;
  DeckElement deck_from_word(const std::string& word) const;
  DeckElement deck_from_shift(std::vector<std::int32_t> shift) const;

  // Fused edge evaluation for the edge from p to g(q). On flat tori the
  // integer shift is added after the coordinate difference, which keeps loop
  // edges exactly translation-invariant.
  double edge_length(const DeckElement& g, const double* p, const double* q) const;
  void edge_log(const DeckElement& g, const double* p, const double* q,
                double* out) const;

  void random_point(Rng& rng, double radius, double* out) const;
  void random_tangent(Rng& rng, const double* p, double norm, double* out) const;

  const TreeData& tree() const;
  const Genus2Data& genus2() const;

  static TargetPtr euclidean(int n);
  static TargetPtr hyperbolic(int n);  // n <= 3
  static TargetPtr flat_torus(int n);
  static TargetPtr genus2_octagon();
  static TargetPtr metric_tree(std::int32_t vertex_count,
                               std::vector<std::array<std::int32_t, 2>> edges,
                               std::vector<double> lengths);

 private:
  GeodesicTarget() = default;
  bool hyperboloid() const {
    return kind_ == TargetKind::Hyperbolic || kind_ == TargetKind::Genus2Octagon;
  }

  TargetKind kind_ = TargetKind::Euclidean;
  int dim_ = 0;
  int model_dim_ = 0;
  std::unique_ptr<TreeData> tree_;
  std::unique_ptr<Genus2Data> genus2_;
};

}  // namespace simharm
