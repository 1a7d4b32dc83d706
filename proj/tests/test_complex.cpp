#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <stdexcept>

#include "doctest.h"
#include "simharm/complex.hpp"

using namespace simharm;

namespace {

// One-vertex torus: square word aba^-1b^-1 with diagonal c, two triangles.
DeltaComplex torus_complex() {
  return make_complex(1, {{0, 0}, {0, 0}, {0, 0}},
                      {{EdgeRef{0, +1}, EdgeRef{1, +1}, EdgeRef{2, -1}},
                       {EdgeRef{2, +1}, EdgeRef{0, -1}, EdgeRef{1, -1}}});
}

// Wheel disk: center vertex 0, ring vertices 1..k; spokes then ring edges.
DeltaComplex wheel_complex(std::int32_t k) {
  std::vector<std::array<std::int32_t, 2>> edges;
  for (std::int32_t i = 0; i < k; ++i) edges.push_back({0, i + 1});
  for (std::int32_t i = 0; i < k; ++i) edges.push_back({i + 1, (i + 1) % k + 1});
  std::vector<std::vector<EdgeRef>> faces;
  for (std::int32_t i = 0; i < k; ++i)
    faces.push_back({EdgeRef{i, +1}, EdgeRef{k + i, +1}, EdgeRef{(i + 1) % k, -1}});
  return make_complex(k + 1, std::move(edges), std::move(faces));
}

// Three triangles sharing one edge (0,1); only legal as a skeleton.
DeltaComplex triple_fin(ComplexMode mode) {
  std::vector<std::array<std::int32_t, 2>> edges{{0, 1}};
  std::vector<std::vector<EdgeRef>> faces;
  for (std::int32_t k = 2; k <= 4; ++k) {
    const auto up = static_cast<std::int32_t>(edges.size());
    edges.push_back({1, k});
    edges.push_back({k, 0});
    faces.push_back({EdgeRef{0, +1}, EdgeRef{up, +1}, EdgeRef{up + 1, +1}});
  }
  return make_complex(5, std::move(edges), std::move(faces), mode);
}

}  // namespace

TEST_CASE("one-vertex torus: counts, characteristic, incidences") {
  const DeltaComplex K = torus_complex();
  CHECK(K.vertex_count == 1);
  CHECK(K.edge_count() == 3);
  CHECK(K.face_count() == 2);
  CHECK(K.euler_characteristic() == 0);
  for (std::int32_t e = 0; e < 3; ++e) {
    CHECK_FALSE(K.is_boundary_edge(e));
    CHECK(K.edge_face_slots[e].size() == 2);
  }
  CHECK(K.vertex_incidences[0].size() == 6);  // three loops, two ends each
  CHECK(K.corner_ea.size() == 6);
  for (std::int32_t f = 0; f < 2; ++f) {
    CHECK(K.face_preferred_slot[f] == 0);
    for (std::int32_t v : K.face_vertices[f]) CHECK(v == 0);
  }
}

TEST_CASE("wheel disk: boundary edges and characteristic") {
  const DeltaComplex K = wheel_complex(6);
  CHECK(K.vertex_count == 7);
  CHECK(K.edge_count() == 12);
  CHECK(K.face_count() == 6);
  CHECK(K.euler_characteristic() == 1);
  for (std::int32_t e = 0; e < 6; ++e) CHECK_FALSE(K.is_boundary_edge(e));
  for (std::int32_t e = 6; e < 12; ++e) CHECK(K.is_boundary_edge(e));
}

TEST_CASE("annulus quad complex: spec counts for n=3") {
  const AnnulusComplex A = annulus_quad_complex(3);
  CHECK(A.complex.vertex_count == 6);
  CHECK(A.complex.edge_count() == 9);
  CHECK(A.complex.face_count() == 3);
  CHECK(A.complex.euler_characteristic() == 0);
  for (std::int32_t e : A.inner_edges) CHECK(A.complex.is_boundary_edge(e));
  for (std::int32_t e : A.outer_edges) CHECK(A.complex.is_boundary_edge(e));
  for (std::int32_t e : A.rungs) CHECK_FALSE(A.complex.is_boundary_edge(e));
  // Rungs sit in opposite slots of each quad.
  for (std::int32_t f = 0; f < 3; ++f) {
    CHECK(A.complex.face_arity(f) == 4);
    int rung_slots = 0;
    for (std::int32_t k = 0; k < 4; ++k) {
      const std::int32_t e = A.complex.faces[f][k].edge;
      if (e >= 6) {
        ++rung_slots;
        CHECK(A.complex.faces[f][(k + 2) % 4].edge >= 6);
      }
    }
    CHECK(rung_slots == 2);
  }
  CHECK_THROWS_AS(annulus_quad_complex(2), std::invalid_argument);
}

TEST_CASE("preferred corner picks the smallest vertex, ties to smallest slot") {
  // Triangle with vertex cycle (2, 0, 1).
  const DeltaComplex K =
      make_complex(3, {{2, 0}, {0, 1}, {1, 2}},
                   {{EdgeRef{0, +1}, EdgeRef{1, +1}, EdgeRef{2, +1}}});
  CHECK(K.face_vertices[0] == std::vector<std::int32_t>{2, 0, 1});
  CHECK(K.face_preferred_slot[0] == 1);
  CHECK(K.corner_vertex[0] == 0);  // corner of slots (0,1) sits at vertex 0
}

TEST_CASE("validation rejects malformed input") {
  // Arity below 3.
  CHECK_THROWS_AS(make_complex(1, {{0, 0}, {0, 0}},
                               {{EdgeRef{0, +1}, EdgeRef{1, -1}}}),
                  std::invalid_argument);
  // Broken cycle: two edges that do not chain.
  CHECK_THROWS_AS(make_complex(3, {{0, 1}, {0, 2}, {2, 0}},
                               {{EdgeRef{0, +1}, EdgeRef{1, +1}, EdgeRef{2, +1}}}),
                  std::invalid_argument);
  // Edge outside range.
  CHECK_THROWS_AS(make_complex(1, {{0, 0}},
                               {{EdgeRef{0, +1}, EdgeRef{1, +1}, EdgeRef{0, -1}}}),
                  std::invalid_argument);
  // Vertex outside range.
  CHECK_THROWS_AS(make_complex(1, {{0, 1}, {1, 0}, {0, 0}},
                               {{EdgeRef{0, +1}, EdgeRef{1, +1}, EdgeRef{2, +1}}}),
                  std::invalid_argument);
  // Unused edge.
  CHECK_THROWS_AS(make_complex(1, {{0, 0}, {0, 0}, {0, 0}, {0, 0}},
                               {{EdgeRef{0, +1}, EdgeRef{1, +1}, EdgeRef{2, -1}},
                                {EdgeRef{2, +1}, EdgeRef{0, -1}, EdgeRef{1, -1}}}),
                  std::invalid_argument);
  // Direction flag outside {-1, +1}.
  CHECK_THROWS_AS(make_complex(1, {{0, 0}, {0, 0}, {0, 0}},
                               {{EdgeRef{0, 0}, EdgeRef{1, +1}, EdgeRef{2, -1}},
                                {EdgeRef{2, +1}, EdgeRef{0, -1}, EdgeRef{1, -1}}}),
                  std::invalid_argument);
}

TEST_CASE("an edge in three face slots is a skeleton, not a surface") {
  CHECK_THROWS_AS(triple_fin(ComplexMode::Surface), std::invalid_argument);
  const DeltaComplex K = triple_fin(ComplexMode::Skeleton);
  CHECK(K.edge_face_slots[0].size() == 3);
  CHECK(K.euler_characteristic() == 1);
  CHECK(K.corner_ea.size() == 9);
}
