#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simharm/rng.hpp"
#include "simharm/smap.hpp"

namespace simharm {

// Outcome of one structural check. residual is the worst violation measure
// and is always >= 0 (0 when nothing violates); witness is the vertex, face,
// or edge id where the worst residual occurs, -1 when the check is global or
// vacuous. note carries vacuous and degenerate flags in words.
struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::int32_t witness = -1;
  std::string note;
};

// Energy dominates area: E_S(f,l) >= A_S(f) - tol, with equality within tol
// exactly when the map is conformal (stretch factors constant per component).
// The witness is the face with the largest corner-sum gap.
CheckResult check_E_ge_A(const SimplicialMap& f, const SimplicialMetric& l,
                         double tol = 1e-9);

// Harmonic vertices sit at the weighted centroid of their neighbor lifts. Per
// interior vertex the centroid residual is |sum_e w_e log_e| / sum_e w_e,
// the distance to the weighted mean; pass iff the largest one is <= tol.
// Interior means every incident edge bounds two faces. Flat targets only, and
// the metric must be positive. Throws std::invalid_argument otherwise.
CheckResult check_mean_value(const SimplicialMap& f, const SimplicialMetric& l,
                             double tol);

// Each interior vertex image lies in the convex hull of its neighbor lifts;
// for curved targets the hull is read in the tangent plane through the log
// map. residual is the distance from the vertex to the hull (0 inside).
// Implemented for 1- and 2-dimensional targets; throws for others.
CheckResult check_convex_hull(const SimplicialMap& f, const SimplicialMetric& l,
                              double tol = 1e-7);

// Maximum principle for real-valued maps restricted to a subcomplex of faces:
// values at vertices interior to the subcomplex must not pass the boundary
// vertices' range; interior values within tol of the range ends are counted
// as ties in the note. Constant data reports as vacuous. euclidean(1) targets
// only; throws otherwise.
CheckResult check_max_principle(const SimplicialMap& f, const SimplicialMetric& l,
                                const std::vector<std::int32_t>& subcomplex_faces,
                                double tol = 1e-9);

// Area bounds for maps into targets of curvature <= -a. a > 0 checks
// riemannian_area(f) <= 2 pi |chi| / a + tol; a = 0 leaves that form vacuous.
// On all-quad complexes it also checks the metric-free form
// riemannian_area(f) <= A_S(f)/2 + tol, which implies Area <= E_S(f,l)/2 for
// every quasi-metric and needs no harmonicity. Throws when a exceeds the
// target's curvature bound.
CheckResult check_area_bound(const SimplicialMap& f, double a, double tol = 1e-9);

enum class AngleMode { Immersion, Embedding };

// Sums the image corner angles around each interior vertex. Immersion mode
// requires sum >= 2 pi - tol (harmonic maps into negative curvature open the
// corners up); embedding mode requires |sum - 2 pi| <= tol. Degenerate
// corners (a zero-length incident image edge) fail with a per-vertex note.
CheckResult check_vertex_angle_sums(const SimplicialMap& f, AngleMode mode,
                                    double tol = 1e-8);

// Numerical embedding certificate for maps to 2-dimensional targets:
//   (i)   no image edge collapses,
//   (ii)  every face's fan triangles are nondegenerate with one consistent
//         orientation across the complex,
//   (iii) vertex angle sums equal 2 pi within tol,
//   (iv)  no single edge loop or two-edge loop composes to the identity deck
//         (a null homotopic candidate breaks injectivity).
// residual counts violations; the note names the first one.
CheckResult check_embedding(const SimplicialMap& f, double tol = 1e-6);

// One planar Dirichlet problem: a wheel complex whose rim is pinned and whose
// hub is solved for, plus the domain metric the weights are read from.
struct DirichletInstance {
  ComplexPtr complex;
  TargetPtr target;  // euclidean(2)
  SimplicialMetric metric;
  std::vector<std::int32_t> boundary;   // pinned vertex ids
  std::vector<double> boundary_images;  // flattened positions, same order
};

// Head-to-head hull behavior of the simplicial weights against the classical
// cotangent weights (cot t1 + cot t2)/4, with the angles read from Euclidean
// realizations of the domain metric's triangles. Both harmonic solves are
// exact linear systems; a hull violation means the solved hub leaves the
// convex hull of the pinned rim by more than tol. Instances with a degenerate
// realization (cot undefined) or a singular cotangent system are skipped and
// counted; every 50th instance degenerates one face on purpose so the skip
// path stays exercised. The first cotangent violation ships back as witness.
struct WeightReport {
  std::int32_t instances = 0;
  std::int32_t skipped = 0;
  std::int32_t simplicial_violations = 0;
  std::int32_t cotangent_violations = 0;
  std::int32_t first_cotangent_witness = -1;  // instance index, -1 if none
  std::optional<DirichletInstance> witness;
};

WeightReport compare_weights(std::int32_t count, std::uint64_t seed,
                             double tol = 1e-9);

}  // namespace simharm
