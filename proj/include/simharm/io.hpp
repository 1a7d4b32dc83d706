#pragma once

#include <string>

#include "json.hpp"
#include "simharm/complex.hpp"
#include "simharm/metric.hpp"
#include "simharm/smap.hpp"
#include "simharm/solver.hpp"
#include "simharm/verify.hpp"

namespace simharm {

// JSON formats, one document per artifact:
//   complex: {"vertices": N, "edges": [[tail,head],...],
//             "faces": [[[edge,dir],...],...], "mode": "surface"|"skeleton"}
//   metric:  {"lengths": [per-edge, edge-id order]}
//   target:  {"type": "euclidean"|"hyperbolic"|"flat_torus", "dim": n}
//            {"type": "genus2_octagon"}
//            {"type": "metric_tree", "vertices": N, "edges": [[t,h],...],
//             "lengths": [...]}
//   map:     {"vertex_images": [[model coords],...], "edge_decks": [...]}
//            deck encodings: "id", an integer array (flat-torus shift), or a
//            generator word such as "aB" (genus-2; the matrix cache is
//            rebuilt from the word on load).
// Doubles are written in shortest round-trip form, so every numeric field
// survives a save/load cycle bit-exactly. Decoders throw
// std::invalid_argument on structurally wrong documents; the builders they
// call re-validate everything else.

nlohmann::json complex_to_json(const DeltaComplex& K);
DeltaComplex complex_from_json(const nlohmann::json& j);

nlohmann::json metric_to_json(const SimplicialMetric& l);
SimplicialMetric metric_from_json(const nlohmann::json& j);

nlohmann::json target_to_json(const GeodesicTarget& T);
TargetPtr target_from_json(const nlohmann::json& j);

nlohmann::json map_to_json(const SimplicialMap& f);  // images and decks only
SimplicialMap map_from_json(const nlohmann::json& j, ComplexPtr complex,
                            TargetPtr target);

// Report encoders (one-way; non-finite numbers become JSON null).
nlohmann::json check_to_json(const CheckResult& r);
nlohmann::json flow_report_to_json(const FlowReport& r);
// "iteration,energy,grad_norm,step" rows, one per accepted state; non-finite
// values print as inf/nan.
std::string flow_trace_csv(const FlowReport& r);

// Whole-file helpers. load_json throws std::runtime_error on unreadable
// files and parse failures (with the path in the message).
nlohmann::json load_json(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);
void save_text(const std::string& text, const std::string& path);

// Wavefront OBJ (v/f records only). Euclidean and flat-torus images are
// written one per vertex, padded to 3 coordinates; hyperboloid images are
// written per face as Poincare-disk projections x -> (x1, x2)/(1 + x0) of
// the face lifts, duplicating shared vertices. Every face fans into
// triangles from its preferred corner, so quads split along the
// preferred-vertex diagonal. Throws std::invalid_argument for metric trees
// and for flat targets with more than 3 coordinates.
std::string obj_export(const SimplicialMap& f);

}  // namespace simharm
