#include "simharm/complex.hpp"

#include <stdexcept>
#include <string>

namespace simharm {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

DeltaComplex make_complex(std::int32_t vertex_count,
                          std::vector<std::array<std::int32_t, 2>> edges,
                          std::vector<std::vector<EdgeRef>> faces, ComplexMode mode) {
  if (vertex_count < 0) fail("vertex count must be nonnegative");
  DeltaComplex K;
  K.vertex_count = vertex_count;
  K.edges = std::move(edges);
  K.faces = std::move(faces);
  K.mode = mode;

  const std::int32_t E = K.edge_count();
  const std::int32_t F = K.face_count();

  for (std::int32_t e = 0; e < E; ++e) {
    for (int end = 0; end < 2; ++end) {
      const std::int32_t v = K.edges[e][end];
      if (v < 0 || v >= vertex_count)
        fail("edge " + std::to_string(e) + " references vertex " + std::to_string(v) +
             " outside [0, " + std::to_string(vertex_count) + ")");
    }
  }

  K.edge_face_slots.assign(E, {});
  K.face_vertices.resize(F);
  K.face_preferred_slot.assign(F, 0);
  K.face_corner_range.resize(F);

  for (std::int32_t f = 0; f < F; ++f) {
    const auto& cycle = K.faces[f];
    const std::int32_t m = static_cast<std::int32_t>(cycle.size());
    if (m < 3) fail("face " + std::to_string(f) + " has arity " + std::to_string(m) +
                    "; faces need at least 3 slots");
    for (std::int32_t k = 0; k < m; ++k) {
      const EdgeRef& r = cycle[k];
      if (r.edge < 0 || r.edge >= E)
        fail("face " + std::to_string(f) + " slot " + std::to_string(k) +
             " references edge " + std::to_string(r.edge) + " outside [0, " +
             std::to_string(E) + ")");
      if (r.dir != +1 && r.dir != -1)
        fail("face " + std::to_string(f) + " slot " + std::to_string(k) +
             " has direction " + std::to_string(r.dir) + "; must be +1 or -1");
    }
    auto& fv = K.face_vertices[f];
    fv.resize(m);
    for (std::int32_t k = 0; k < m; ++k) {
      fv[k] = K.slot_start(f, k);
      const std::int32_t next = (k + 1 == m) ? 0 : k + 1;
      if (K.slot_end(f, k) != K.slot_start(f, next))
        fail("face " + std::to_string(f) + " cycle breaks between slots " +
             std::to_string(k) + " and " + std::to_string(next));
      K.edge_face_slots[cycle[k].edge].emplace_back(f, k);
    }
    std::int32_t best = 0;
    for (std::int32_t k = 1; k < m; ++k)
      if (fv[k] < fv[best]) best = k;
    K.face_preferred_slot[f] = best;
  }

  for (std::int32_t e = 0; e < E; ++e) {
    const std::size_t uses = K.edge_face_slots[e].size();
    if (uses == 0)
      fail("edge " + std::to_string(e) + " lies in no face slot");
    if (mode == ComplexMode::Surface && uses > 2)
      fail("edge " + std::to_string(e) + " lies in " + std::to_string(uses) +
           " face slots; surface mode allows at most two");
  }

  K.vertex_incidences.assign(vertex_count, {});
  for (std::int32_t e = 0; e < E; ++e) {
    K.vertex_incidences[K.edges[e][0]].emplace_back(e, std::int8_t{0});
    K.vertex_incidences[K.edges[e][1]].emplace_back(e, std::int8_t{1});
  }

  for (std::int32_t f = 0; f < F; ++f) {
    const std::int32_t m = K.face_arity(f);
    const std::int32_t begin = static_cast<std::int32_t>(K.corner_ea.size());
    for (std::int32_t k = 0; k < m; ++k) {
      const std::int32_t next = (k + 1 == m) ? 0 : k + 1;
      K.corner_ea.push_back(K.faces[f][k].edge);
      K.corner_eb.push_back(K.faces[f][next].edge);
      K.corner_face.push_back(f);
      K.corner_slot.push_back(k);
      K.corner_vertex.push_back(K.face_vertices[f][next]);
    }
    K.face_corner_range[f] = {begin, static_cast<std::int32_t>(K.corner_ea.size())};
  }

  return K;
}

AnnulusComplex annulus_quad_complex(std::int32_t n) {
  if (n < 3) fail("annulus_quad_complex needs n >= 3");
  AnnulusComplex A;
  std::vector<std::array<std::int32_t, 2>> edges;
  edges.reserve(3 * n);
  // Inner vertices are 0..n-1, outer vertices n..2n-1. Edge ids: inner circle
  // first, then outer circle, then rungs.
  for (std::int32_t k = 0; k < n; ++k) edges.push_back({k, (k + 1) % n});
  for (std::int32_t k = 0; k < n; ++k) edges.push_back({n + k, n + (k + 1) % n});
  for (std::int32_t k = 0; k < n; ++k) edges.push_back({k, n + k});
  std::vector<std::vector<EdgeRef>> faces;
  faces.reserve(n);
  for (std::int32_t k = 0; k < n; ++k) {
    const std::int32_t inner = k, outer = n + k;
    const std::int32_t rung_k = 2 * n + k, rung_next = 2 * n + (k + 1) % n;
    faces.push_back({EdgeRef{inner, +1}, EdgeRef{rung_next, +1}, EdgeRef{outer, -1},
                     EdgeRef{rung_k, -1}});
  }
  A.complex = make_complex(2 * n, std::move(edges), std::move(faces));
  for (std::int32_t k = 0; k < n; ++k) {
    A.inner_edges.push_back(k);
    A.outer_edges.push_back(n + k);
    A.rungs.push_back(2 * n + k);
  }
  return A;
}

}  // namespace simharm
