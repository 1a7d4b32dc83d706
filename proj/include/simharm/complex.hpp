#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace simharm {

// Oriented use of an edge inside a face cycle; dir=+1 traverses tail->head.
struct EdgeRef {
  std::int32_t edge = 0;
  std::int8_t dir = +1;
};

// Surface: every edge lies in one or two face slots (boundary edges in one).
// Skeleton: an edge may lie in any positive number of face slots (2-skeleton
// of a higher complex).
enum class ComplexMode { Surface, Skeleton };

// Delta-complex with ordered vertices, an explicit edge list and face boundary
// cycles. Loops, parallel edges, and faces revisiting a vertex or an edge are
// all legal; the face cycles carry the combinatorics that vertex pairs cannot.
//
// Construction goes through make_complex, which validates the data and fills
// every derived field. Instances are immutable afterwards; all surgery returns
// new complexes.
struct DeltaComplex {
  std::int32_t vertex_count = 0;
  std::vector<std::array<std::int32_t, 2>> edges;  // tail, head
  std::vector<std::vector<EdgeRef>> faces;
  ComplexMode mode = ComplexMode::Surface;

  // Derived data (filled by make_complex).
  // face_vertices[f][k] = vertex at the start of slot k's directed edge.
  std::vector<std::vector<std::int32_t>> face_vertices;
  // Slot index of the face's preferred corner: minimum vertex id, ties going
  // to the smallest slot index. Cone constructions fan out from here.
  std::vector<std::int32_t> face_preferred_slot;
  // (face, slot) pairs per edge.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> edge_face_slots;
  // (edge, end) incidences per vertex; end 0 = tail, 1 = head. A loop edge
  // contributes both entries at its vertex.
  std::vector<std::vector<std::pair<std::int32_t, std::int8_t>>> vertex_incidences;
  // Corner tables, flattened across all faces: corner j of a face with arity
  // m pairs slot j and slot (j+1) mod m and sits at the vertex where those two
  // slots meet (the start of slot (j+1) mod m). corner_ea/corner_eb hold the
  // two edge ids (kernel-ready), corner_slot the first slot index j.
  std::vector<std::int32_t> corner_ea, corner_eb, corner_face, corner_slot;
  std::vector<std::int32_t> corner_vertex;
  // [begin, end) range of a face's corners inside the corner tables.
  std::vector<std::pair<std::int32_t, std::int32_t>> face_corner_range;

  std::int32_t edge_count() const { return static_cast<std::int32_t>(edges.size()); }
  std::int32_t face_count() const { return static_cast<std::int32_t>(faces.size()); }
  std::int32_t face_arity(std::int32_t f) const {
    return static_cast<std::int32_t>(faces[f].size());
  }
  bool is_boundary_edge(std::int32_t e) const { return edge_face_slots[e].size() == 1; }
  std::int32_t euler_characteristic() const {
    return vertex_count - edge_count() + face_count();
  }
  // Vertex at the start of slot k (tail if dir=+1, head if dir=-1).
  std::int32_t slot_start(std::int32_t f, std::int32_t k) const {
    const EdgeRef& r = faces[f][k];
    return r.dir > 0 ? edges[r.edge][0] : edges[r.edge][1];
  }
  std::int32_t slot_end(std::int32_t f, std::int32_t k) const {
    const EdgeRef& r = faces[f][k];
    return r.dir > 0 ? edges[r.edge][1] : edges[r.edge][0];
  }
};

// Validates and builds. Throws std::invalid_argument on: ids out of range,
// directions outside {-1,+1}, face arity < 3, face cycles that do not close,
// edges lying in no face slot, or surface-mode edges lying in more than two.
DeltaComplex make_complex(std::int32_t vertex_count,
                          std::vector<std::array<std::int32_t, 2>> edges,
                          std::vector<std::vector<EdgeRef>> faces,
                          ComplexMode mode = ComplexMode::Surface);

// Annulus decomposed into a cycle of n >= 3 quads: two boundary circles of n
// edges each and n rungs joining them. Faces are oriented so that the two
// rungs of a quad sit in opposite slots.
struct AnnulusComplex {
  DeltaComplex complex;
  std::vector<std::int32_t> inner_edges;  // inner circle, cyclic order
  std::vector<std::int32_t> outer_edges;  // outer circle, cyclic order
  std::vector<std::int32_t> rungs;        // rung k joins inner vertex k to outer vertex k
};

AnnulusComplex annulus_quad_complex(std::int32_t n);

}  // namespace simharm
