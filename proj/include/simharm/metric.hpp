#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "simharm/complex.hpp"

namespace simharm {

// Edge lengths indexed by edge id. Lengths may be zero (quasi-metric); each
// face must satisfy the non-strict polygon inequality: every edge length is at
// most the sum of the other lengths in that face cycle.
struct SimplicialMetric {
  std::vector<double> lengths;
};

struct MetricViolation {
  std::int32_t face = -1;  // -1: not a face problem (negative or non-finite length)
  std::int32_t slot = -1;  // offending slot within the face, or edge id if face == -1
  double excess = 0.0;     // how far the inequality fails (or the bad length)
};

// Empty result means valid. The polygon inequality is checked with tolerance
// exactly 0; callers must not hand in metrics violated by rounding.
std::vector<MetricViolation> validate_metric(const DeltaComplex& K,
                                             const SimplicialMetric& l);

bool metric_valid(const DeltaComplex& K, const SimplicialMetric& l);

// Strictly positive everywhere (a genuine metric, not just a quasi-metric).
bool metric_positive(const DeltaComplex& K, const SimplicialMetric& l);

// Simplicial area of the metric: sum over all face corners of the product of
// the two corner edge lengths. For a triangle (a,b,c) this is ab+bc+ca; for an
// n-gon the cyclic sum of adjacent products.
double simplicial_area(const DeltaComplex& K, const SimplicialMetric& l);

double face_simplicial_area(const DeltaComplex& K, const SimplicialMetric& l,
                            std::int32_t f);

// Per-edge weights: w_e = (sum over the face slots containing e of the two
// in-face neighbor lengths) / (2 l_e). Positive on every edge of a valid
// positive metric. A zero-length edge has no finite weight and throws
// std::invalid_argument; quasi-metric energy paths handle those edges via the
// zero-stretch conventions instead.
std::vector<double> edge_weights(const DeltaComplex& K, const SimplicialMetric& l);

// edge_weights with zero-length edges given weight 0 instead of throwing;
// matches the quasi-metric energy conventions, where a zero-length edge with
// zero image length contributes nothing.
std::vector<double> edge_weights_quasi(const DeltaComplex& K, const SimplicialMetric& l);

// Euclidean triangle area from side lengths (stable Heron form); degenerate
// and slightly-negative radicands clamp to 0.
double heron_area(double a, double b, double c);

// Conformal subdivision: every triangle splits into four half-scale triangles,
// every quad (a,b,c,d) into four quads whose boundary half-edges inherit half
// the parent length and whose interior cut halves measure (a+c)/4 and (b+d)/4.
// Simplicial area is preserved face by face. Faces of any other arity are not
// supported and raise std::invalid_argument.
//
// Layout of the subdivided complex (deterministic):
//   vertices: parents, then one midpoint per parent edge, then one center per
//             parent quad (in face order);
//   edges:    halves 2e (tail->mid) and 2e+1 (mid->head) per parent edge e,
//             then the interior edges of each face in face order;
//   faces:    per parent face, the corner children in slot order, then (for
//             triangles) the central child.
struct SubdivisionResult {
  DeltaComplex complex;
  SimplicialMetric metric;
  std::vector<std::int32_t> edge_midpoint;              // parent edge -> new vertex
  std::vector<std::array<std::int32_t, 2>> edge_halves; // parent edge -> (2e, 2e+1)
  std::vector<std::int32_t> quad_center;                // parent face -> center vertex or -1
  std::vector<std::vector<std::int32_t>> face_children; // parent face -> child faces
  // Interior edges with enough provenance to prolong maps: for a triangle,
  // child k's cross edge runs from midpoint(slot k) to midpoint(slot k-1); for
  // a quad, cut k runs from midpoint(slot k) to the center (to_slot == -1).
  struct InteriorEdge {
    std::int32_t edge = -1;
    std::int32_t face = -1;
    std::int32_t from_slot = -1;
    std::int32_t to_slot = -1;
  };
  std::vector<InteriorEdge> interior_edges;
};

SubdivisionResult conformal_subdivide(const DeltaComplex& K, const SimplicialMetric& l);

}  // namespace simharm
