#pragma once

#include <cstdint>
#include <vector>

#include "simharm/metric.hpp"
#include "simharm/smap.hpp"

namespace simharm {

// Vertex gradient descent toward simplicial harmonic maps: discrete monotone
// descent with backtracking instead of continuous-time flow, which keeps the
// properties the theory uses (energy never increases, zero-energy maps are
// exact fixed points) with robust numerics.
struct FlowConfig {
  double grad_tol = 1e-8;  // sup over free vertices of the gradient norm.
                           // Euclidean flows reach the default; hyperboloid
                           // energies carry enough rounding noise that a
                           // monotone descent floors near 1e-7, so ask for
                           // 1e-6 there or expect a Stalled report.
  std::int64_t max_iters = 100000;
  double initial_step = 1.0;  // first trial step; later searches resume one
                              // shrink above the last accepted step, capped here
  double shrink = 0.5;
  double armijo = 1e-4;   // sufficient-decrease constant
  double min_step = 1e-16;  // a search that shrinks below this stalls
  std::vector<std::int32_t> fixed_vertices;  // Dirichlet data: never moved
};

enum class FlowTermination { Converged, MaxIters, InfiniteEnergy, Stalled };

// Row 0 describes the input state; row k > 0 the state after accepted step k.
// The energy column is non-increasing by construction. An infinite-energy
// input yields a single row with energy = kInfinite and grad_norm = NaN.
struct FlowReport {
  std::vector<double> energy;
  std::vector<double> grad_norm;
  std::vector<double> step;  // 0.0 in row 0
  FlowTermination termination = FlowTermination::Converged;

  std::int64_t iterations() const {
    return static_cast<std::int64_t>(energy.size()) - 1;
  }
};

// Gradient of the simplicial energy in the vertex images:
//   grad_v = -2 sum over positive-length edges at v of w_e log_{x_v}(q_e),
// where q_e is the deck-translated lift of the opposite endpoint and w_e the
// edge weight of l; loop edges contribute from both ends. Zero-length edges
// carry weight 0 and drop out. Layout: vertex_count x model_dim tangent
// coordinates. Throws std::invalid_argument on tree targets and on infinite
// energy (a zero-length edge with positive image length).
std::vector<double> energy_gradient(const SimplicialMap& f, const SimplicialMetric& l);

// Central differences of the energy along an orthonormal tangent frame at
// each vertex, step h; same layout as energy_gradient. Oracle-grade only.
std::vector<double> finite_diff_gradient(const SimplicialMap& f,
                                         const SimplicialMetric& l, double h = 1e-5);

struct FlowStep {
  SimplicialMap map;
  double step = 0.0;  // accepted step; 0 when the gradient already vanishes
  bool stalled = false;
};

// One descent step: every free vertex moves by exp(-t grad_v) with t found by
// backtracking from cfg.initial_step until the energy drops by the Armijo
// margin. A map with exactly zero gradient comes back bit-identical.
FlowStep flow_step(const SimplicialMap& f, const SimplicialMetric& l,
                   const FlowConfig& cfg = {});

struct FlowResult {
  SimplicialMap map;
  FlowReport report;
};

// Runs flow_step until the free-vertex gradient sup-norm is at most
// cfg.grad_tol. Decks are never modified, so the homotopy class is pinned.
FlowResult flow_to_harmonic(const SimplicialMap& f, const SimplicialMetric& l,
                            const FlowConfig& cfg = {});

struct FamilyResult {
  std::vector<SimplicialMap> maps;
  std::vector<FlowReport> reports;
  // Continuity surrogate: max vertex distance between consecutive outputs.
  std::vector<double> adjacent_distance;
};

// Flows every sample of a family sharing one complex and target. Metrics may
// be empty (each sample then uses its induced quasi-metric) or one per
// sample. Zero-energy samples pass through bit-identical. Samples run
// concurrently unless warm_start, which seeds each sample with the previous
// converged images and is meant for continuity studies only.
FamilyResult flow_family(const std::vector<SimplicialMap>& family,
                         const std::vector<SimplicialMetric>& metrics,
                         const FlowConfig& cfg = {}, bool warm_start = false);

struct MetricFlowResult {
  SimplicialMap map;
  SimplicialMetric metric;  // induced by map, so unit stretch and E == A
  std::vector<double> area_trace;  // non-increasing
  std::vector<FlowReport> reports;
};

// Alternates (a) l <- induced_quasimetric(f), which makes E_S(f, l) equal
// A_S(f) exactly, with (b) the harmonic flow, until one round lowers the
// simplicial area by less than outer_tol. Minimizes over maps in the homotopy
// class and all quasi-metrics at once.
MetricFlowResult minimize_over_metrics(const SimplicialMap& f,
                                       double outer_tol = 1e-10,
                                       const FlowConfig& cfg = {});

// Flows two maps that share complex, target, and decks, and returns the
// largest vertex distance between the converged images. In a negatively
// curved target the harmonic map of a nontrivial class is unique, so this
// probes how tightly the flow reproduces it; the caller asserts that the
// class is nontrivial. Flat and tree targets are refused, since uniqueness
// fails there (translations preserve every loop length).
double uniqueness_probe(const SimplicialMap& fa, const SimplicialMap& fb,
                        const SimplicialMetric& l, const FlowConfig& cfg = {});

}  // namespace simharm
