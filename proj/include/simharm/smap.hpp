#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "simharm/complex.hpp"
#include "simharm/metric.hpp"
#include "simharm/targets.hpp"

namespace simharm {

using ComplexPtr = std::shared_ptr<const DeltaComplex>;

// Energies and stretch factors use +inf as a first-class value, never an error.
inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

// Simplicial map: one model-space image per vertex plus one deck element per
// edge. Edge e = (u, w) with deck g is carried to the geodesic from image(u)
// to g·image(w) in the universal cover; faces cone off their preferred vertex,
// so the vertex data determines the whole map. The decks encode the homotopy
// class and are never changed by evaluation or flow.
struct SimplicialMap {
  ComplexPtr complex;
  TargetPtr target;
  std::vector<double> vertex_images;    // vertex_count x target->model_dim()
  std::vector<DeckElement> edge_decks;  // one per edge

  const double* image(std::int32_t v) const {
    return vertex_images.data() + static_cast<std::size_t>(v) * target->model_dim();
  }
  double* image(std::int32_t v) {
    return vertex_images.data() + static_cast<std::size_t>(v) * target->model_dim();
  }
};

// Checks array shapes, per-vertex model constraints (point_tol), deck shapes
// for the target kind, and the face cocycle: the signed composition of decks
// around every face must be the identity (cocycle_tol), otherwise the cone
// extension over that face is not well defined. Throws std::invalid_argument.
void validate_map(const SimplicialMap& f, double point_tol = 1e-10,
                  double cocycle_tol = 1e-9);

SimplicialMap make_map(ComplexPtr complex, TargetPtr target,
                       std::vector<double> vertex_images,
                       std::vector<DeckElement> edge_decks);

// L_e = d(image(tail), g_e·image(head)), computed in the cover.
std::vector<double> edge_lengths(const SimplicialMap& f);

// The quasi-metric l_e = L_e. Geodesic image lengths satisfy every polygon
// inequality exactly in exact arithmetic; computed violations up to tol are
// accepted as rounding, anything larger throws std::runtime_error because it
// indicates a distance bug, not bad user data.
SimplicialMetric induced_quasimetric(const SimplicialMap& f, double tol = 1e-9);

// Per-edge stretch sigma_e = L_e / l_e, with the zero-length conventions
// sigma = 0 when l = L = 0 and sigma = kInfinite when l = 0 < L.
struct StretchProfile {
  std::vector<double> sigma;
  bool any_infinite = false;
  double max_finite = 0.0;
};
StretchProfile stretch_factors(const SimplicialMap& f, const SimplicialMetric& l);

// A_S(f): sum over face corners of the products of adjacent image lengths.
// Depends on the map alone, not on any domain metric.
double simplicial_area_of_map(const SimplicialMap& f);

// E_S(f, l) as the corner sum (1/2)(sigma_i^2 + sigma_j^2) l_i l_j over all
// face corners; kInfinite iff some edge has l = 0 < L; corners touching an
// edge with l = L = 0 contribute exactly 0. The metric must be valid (not
// re-checked here).
double simplicial_energy(const SimplicialMap& f, const SimplicialMetric& l);

// The same energy as the weighted edge sum over w_e L_e^2 with
// w_e = (sum of in-face neighbor lengths over e's slots) / (2 l_e); agrees
// with the corner sum to 1e-12 relative and is exposed for that cross-check.
double simplicial_energy_edge_form(const SimplicialMap& f, const SimplicialMetric& l);

// Conformality: stretch factors constant on each component of the
// positive-length subcomplex, where two positive edges are connected whenever
// they meet at a face corner whose other edge is also positive. This is
// exactly the equality case of E_S >= A_S, which holds corner by corner.
struct ConformalReport {
  bool conformal = false;
  bool any_infinite = false;           // some l = 0 < L: never conformal
  double max_deviation = 0.0;          // worst relative sigma spread over components
  std::int32_t component_count = 0;
  std::vector<std::int32_t> component;  // per edge; -1 for zero-length edges
};
ConformalReport is_conformal(const SimplicialMap& f, const SimplicialMetric& l,
                             double tol = 1e-9);

// Riemannian area of the cone extension: each face fans into triangles from
// its preferred vertex (for quads this is the preferred-vertex diagonal), lift
// vertices accumulate decks around the face, and each triangle contributes its
// geodesic-triangle area: Heron for Euclidean and flat-torus targets, the
// angle defect pi - alpha - beta - gamma for hyperbolic ones, 0 for trees.
// Degenerate triangles contribute 0.
double riemannian_area(const SimplicialMap& f);

// Interior angle of each corner's image wedge, indexed like the complex's
// corner tables. Degenerate corners (an incident image edge of zero length)
// yield NaN. Throws std::logic_error for metric-tree targets.
std::vector<double> corner_angles(const SimplicialMap& f);

// Lifts of one face's boundary to the universal cover, model_dim() doubles
// per slot: entry k is the image of the vertex starting slot (preferred + k)
// mod m, carried by the deck product accumulated along the walk from the
// preferred corner. The cocycle condition closes the cycle up. Throws
// std::logic_error for metric-tree targets.
std::vector<double> face_lifts(const SimplicialMap& f, std::int32_t face);

// Replaces image(v) by h·image(v) and conjugates the decks of incident edges
// (tail: g -> h g, head: g -> g h^-1, loop: g -> h g h^-1) so that every image
// length is unchanged and the cocycle is preserved. Exact for flat tori; on
// the hyperboloid the agreement degrades with the coordinate growth of the
// moved lifts (entries scale like e^d, so expect ~1e-9 per short gauge word
// rather than 1e-15). Throws for identity-only targets when h is not the
// identity.
SimplicialMap gauge_transform(const SimplicialMap& f, std::int32_t v,
                              const DeckElement& h);

// 2-skeleton functionals: identical corner sums evaluated on complexes whose
// edges may lie in any number of faces. E2 >= V2 with equality under the same
// per-component constant-stretch condition as the surface case.
double energy2(const SimplicialMap& f, const SimplicialMetric& l);
double volume2(const SimplicialMap& f);
double volume2_metric(const DeltaComplex& K, const SimplicialMetric& l);

// One marked annulus: a closed ring of quads (each quad has two opposite
// "rung" slots shared with its ring neighbors; the other two slots lie on the
// annulus's two side circles) mapped across one tree edge. Side circles map
// to the edge's endpoints, rungs to the whole edge. Orientation is pinned by
// region assignments where the annulus borders marked regions; anchor_edge
// (a side edge) forces its circle to the given endpoint (0 = tail, 1 = head);
// otherwise the circle containing the smallest side edge id maps to the tail.
struct AnnulusMarking {
  std::vector<std::int32_t> faces;
  std::int32_t tree_edge = -1;
  std::int32_t anchor_edge = -1;
  std::int32_t anchor_end = 0;
};

// Builds the standard-type map: faces outside all annuli form regions, each
// region component (ordered by smallest face id) maps to the tree vertex in
// region_vertices; annulus side edges map to points and rungs across their
// tree edge. All decks are identity. With the induced quasi-metric the energy
// is exactly 0, since every corner pairs a zero-length side with a rung.
// Throws std::invalid_argument on any incidence mismatch.
SimplicialMap standard_type_map(ComplexPtr complex, TargetPtr tree,
                                const std::vector<AnnulusMarking>& annuli,
                                const std::vector<std::int32_t>& region_vertices);

// Collapses the subcomplex of zero-length edges (plus triangles all of whose
// edges are zero). Requires a triangulation; every component of the zero
// subcomplex must be contractible, checked as Euler characteristic 1 plus
// identity holonomy around its cycles; zero edges must have zero image
// length. Triangles with exactly one zero edge degenerate to 2-gons whose two
// parallel edges are merged, keeping the lower edge id. Euler characteristic
// is always preserved; energy is preserved exactly when each such 2-gon's
// sides have zero image length (energy_before/energy_after report the values;
// a degenerate triangle with positively-stretched sides loses its corner term
// and the caller sees the drop).
struct CollapseResult {
  SimplicialMap map;
  SimplicialMetric metric;
  std::vector<std::int32_t> vertex_map;  // old vertex -> new vertex
  std::vector<std::int32_t> edge_map;    // old edge -> new edge, -1 = collapsed
  std::vector<std::int32_t> face_map;    // old face -> new face, -1 = collapsed
  double energy_before = 0.0;
  double energy_after = 0.0;
};
CollapseResult collapse_zero_subcomplex(const SimplicialMap& f,
                                        const SimplicialMetric& l);

}  // namespace simharm
