#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "simharm/rng.hpp"
#include "simharm/solver.hpp"
#include "simharm/verify.hpp"

using namespace simharm;

namespace {

template <typename T>
std::shared_ptr<const DeltaComplex> share(T&& k) {
  return std::make_shared<const DeltaComplex>(std::forward<T>(k));
}

std::vector<DeckElement> identity_decks(const TargetPtr& T, std::size_t n) {
  return std::vector<DeckElement>(n, T->deck_identity());
}

ComplexPtr wheel_complex(std::int32_t n) {
  std::vector<std::array<std::int32_t, 2>> edges;
  for (std::int32_t k = 0; k < n; ++k) edges.push_back({0, k + 1});
  for (std::int32_t k = 0; k < n; ++k) edges.push_back({k + 1, (k + 1) % n + 1});
  std::vector<std::vector<EdgeRef>> faces;
  for (std::int32_t k = 0; k < n; ++k)
    faces.push_back({{k, +1}, {n + k, +1}, {(k + 1) % n, -1}});
  return share(make_complex(n + 1, edges, faces));
}

ComplexPtr torus_complex() {
  return share(make_complex(1, {{0, 0}, {0, 0}, {0, 0}},
                            {{{0, +1}, {1, +1}, {2, -1}},
                             {{2, +1}, {0, -1}, {1, -1}}}));
}

SimplicialMap torus_map(const std::array<std::int32_t, 2>& sa,
                        const std::array<std::int32_t, 2>& sb) {
  TargetPtr T = GeodesicTarget::flat_torus(2);
  const std::array<std::int32_t, 2> sc{sa[0] + sb[0], sa[1] + sb[1]};
  return make_map(torus_complex(), T, {0.25, 0.7},
                  {T->deck_from_shift({sa[0], sa[1]}),
                   T->deck_from_shift({sb[0], sb[1]}),
                   T->deck_from_shift({sc[0], sc[1]})});
}

SimplicialMap genus2_vertex_map(const double* x) {
  TargetPtr T = GeodesicTarget::genus2_octagon();
  ComplexPtr K = share(make_complex(
      1, {{0, 0}, {0, 0}, {0, 0}, {0, 0}},
      {{{0, +1}, {1, +1}, {0, -1}, {1, -1}, {2, +1}, {3, +1}, {2, -1}, {3, -1}}}));
  std::vector<DeckElement> decks;
  for (const char* w : {"a", "b", "c", "d"}) decks.push_back(T->deck_from_word(w));
  return make_map(K, T, {x[0], x[1], x[2]}, decks);
}

SimplicialMap flowed_genus2(std::uint64_t seed) {
  Rng rng(seed);
  double x[3];
  GeodesicTarget::genus2_octagon()->random_point(rng, 0.8, x);
  FlowConfig cfg;
  cfg.grad_tol = 1e-6;
  return flow_to_harmonic(genus2_vertex_map(x), SimplicialMetric{{1, 1, 1, 1}}, cfg).map;
}

// Wheel with 4 spokes, rim pinned at the corners of the [-1,1] square.
SimplicialMap square_wheel(double hub_x, double hub_y) {
  TargetPtr T = GeodesicTarget::euclidean(2);
  return make_map(wheel_complex(4), T,
                  {hub_x, hub_y, 1, 1, -1, 1, -1, -1, 1, -1},
                  identity_decks(T, 8));
}

SimplicialMap line_wheel(double hub, const std::vector<double>& rim) {
  TargetPtr T = GeodesicTarget::euclidean(1);
  std::vector<double> images{hub};
  images.insert(images.end(), rim.begin(), rim.end());
  return make_map(wheel_complex(4), T, images, identity_decks(T, 8));
}

}  // namespace

TEST_CASE("check_E_ge_A: equality iff conformal, strict gaps, infinite energy") {
  const SimplicialMap f = torus_map({1, 0}, {0, 1});

  const CheckResult eq = check_E_ge_A(f, induced_quasimetric(f));
  CHECK(eq.pass);
  CHECK(eq.residual == 0.0);
  CHECK(eq.witness >= 0);

  const CheckResult gap = check_E_ge_A(f, SimplicialMetric{{1, 1, 1}});
  CHECK(gap.pass);  // E > A and not conformal: the equivalence holds
  CHECK(gap.residual == 0.0);

  TargetPtr T = GeodesicTarget::euclidean(2);
  ComplexPtr K = share(make_complex(3, {{0, 1}, {1, 2}, {2, 0}},
                                    {{{0, +1}, {1, +1}, {2, +1}}}));
  const SimplicialMap tri = make_map(K, T, {0, 0, 1, 0, 1, 2},
                                     identity_decks(T, 3));
  const CheckResult strict = check_E_ge_A(tri, SimplicialMetric{{1, 1, 1}});
  CHECK(strict.pass);

  const CheckResult inf = check_E_ge_A(tri, SimplicialMetric{{0.0, 1, 1}});
  CHECK(inf.pass);
  CHECK(inf.residual == 0.0);
  CHECK(!inf.note.empty());

  Rng rng(81);
  for (int it = 0; it < 200; ++it) {
    double p[6];
    for (double& c : p) c = rng.uniform(-2.0, 2.0);
    const SimplicialMap g = make_map(K, T, {p[0], p[1], p[2], p[3], p[4], p[5]},
                                     identity_decks(T, 3));
    SimplicialMetric l{{rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0),
                        rng.uniform(0.1, 2.0)}};
    CHECK(check_E_ge_A(g, l).pass);
  }
}

TEST_CASE("check_mean_value: exact centroid residual on the square wheel") {
  const SimplicialMetric l{{1, 1, 1, 1, 1, 1, 1, 1}};

  const CheckResult at_center = check_mean_value(square_wheel(0.0, 0.0), l, 1e-12);
  CHECK(at_center.pass);
  CHECK(at_center.residual <= 1e-15);
  CHECK(at_center.witness == 0);

  // Equal spoke weights make the residual |hub - mean| = 0.25 exactly.
  const CheckResult off = check_mean_value(square_wheel(0.25, 0.0), l, 1e-12);
  CHECK(!off.pass);
  CHECK(off.residual == 0.25);
  CHECK(off.witness == 0);

  TargetPtr H = GeodesicTarget::hyperbolic(2);
  ComplexPtr K = share(make_complex(3, {{0, 1}, {1, 2}, {2, 0}},
                                    {{{0, +1}, {1, +1}, {2, +1}}}));
  std::vector<double> imgs(9);
  Rng rng(7);
  for (int v = 0; v < 3; ++v) H->random_point(rng, 0.5, &imgs[3 * v]);
  const SimplicialMap h = make_map(K, H, std::move(imgs), identity_decks(H, 3));
  CHECK_THROWS_AS(check_mean_value(h, SimplicialMetric{{1, 1, 1}}, 1e-9),
                  std::invalid_argument);
}

TEST_CASE("check_convex_hull: exact exit distance, 1d intervals, curved targets") {
  const SimplicialMetric l{{1, 1, 1, 1, 1, 1, 1, 1}};

  CHECK(check_convex_hull(square_wheel(0.0, 0.0), l).pass);
  CHECK(check_convex_hull(square_wheel(0.0, 0.0), l).residual == 0.0);

  // Hub at (3,0) sits distance 2 from the square hull of the rim.
  const CheckResult out = check_convex_hull(square_wheel(3.0, 0.0), l);
  CHECK(!out.pass);
  CHECK(out.residual == 2.0);
  CHECK(out.witness == 0);

  CHECK(check_convex_hull(line_wheel(0.5, {0, 1, 0, 1}), l).pass);
  const CheckResult out1 = check_convex_hull(line_wheel(2.0, {0, 1, 0, 1}), l);
  CHECK(!out1.pass);
  CHECK(out1.residual == 1.0);

  // Harmonic maps into negative curvature satisfy the tangent-space hull.
  const SimplicialMap g2 = flowed_genus2(91);
  const CheckResult hyp = check_convex_hull(g2, SimplicialMetric{{1, 1, 1, 1}});
  CHECK(hyp.pass);
  CHECK(hyp.residual == 0.0);

  TargetPtr T3 = GeodesicTarget::euclidean(3);
  ComplexPtr K = share(make_complex(3, {{0, 1}, {1, 2}, {2, 0}},
                                    {{{0, +1}, {1, +1}, {2, +1}}}));
  const SimplicialMap e3 = make_map(K, T3, {0, 0, 0, 1, 0, 0, 0, 1, 0},
                                    identity_decks(T3, 3));
  CHECK_THROWS_AS(check_convex_hull(e3, SimplicialMetric{{1, 1, 1}}),
                  std::invalid_argument);
}

TEST_CASE("check_max_principle: interior values stay inside the boundary range") {
  const SimplicialMetric l{{1, 1, 1, 1, 1, 1, 1, 1}};
  const std::vector<std::int32_t> all{0, 1, 2, 3};

  const CheckResult in = check_max_principle(line_wheel(0.3, {1, -1, 1, -1}), l, all);
  CHECK(in.pass);
  CHECK(in.residual == 0.0);

  const CheckResult spike =
      check_max_principle(line_wheel(2.0, {1, -1, 1, -1}), l, all);
  CHECK(!spike.pass);
  CHECK(spike.residual == 1.0);
  CHECK(spike.witness == 0);

  const CheckResult flat = check_max_principle(line_wheel(5.0, {5, 5, 5, 5}), l, all);
  CHECK(flat.pass);
  CHECK(!flat.note.empty());

  // Octahedron cap: only the top faces belong to the subcomplex, so the apex
  // is its lone interior vertex and the bottom apex value must not matter.
  ComplexPtr oct = share(make_complex(
      6,
      {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {2, 3}, {3, 4}, {4, 1},
       {1, 5}, {2, 5}, {3, 5}, {4, 5}},
      {{{0, +1}, {4, +1}, {1, -1}},
       {{1, +1}, {5, +1}, {2, -1}},
       {{2, +1}, {6, +1}, {3, -1}},
       {{3, +1}, {7, +1}, {0, -1}},
       {{4, +1}, {9, +1}, {8, -1}},
       {{5, +1}, {10, +1}, {9, -1}},
       {{6, +1}, {11, +1}, {10, -1}},
       {{7, +1}, {8, +1}, {11, -1}}}));
  TargetPtr T1 = GeodesicTarget::euclidean(1);
  const SimplicialMap cap = make_map(oct, T1, {0.5, 0, 1, 0, 1, 99},
                                     identity_decks(T1, 12));
  const SimplicialMetric lo{std::vector<double>(12, 1.0)};
  const CheckResult top = check_max_principle(cap, lo, {0, 1, 2, 3});
  CHECK(top.pass);
  CHECK(top.residual == 0.0);

  CHECK_THROWS_AS(check_max_principle(square_wheel(0, 0), l, all),
                  std::invalid_argument);
}

TEST_CASE("check_area_bound: genus-2 cap at 4 pi and the quad energy bound") {
  const SimplicialMap g2 = flowed_genus2(92);
  const CheckResult gb = check_area_bound(g2, 1.0, 1e-6);
  CHECK(gb.pass);
  CHECK(gb.residual <= 1e-6);
  CHECK(std::abs(riemannian_area(g2) - 4.0 * std::numbers::pi) < 1e-6);

  CHECK_THROWS_AS(check_area_bound(g2, 2.0), std::invalid_argument);

  // Random quad maps into the hyperbolic plane: Area <= A_S/2 without any
  // harmonicity, checked through the a = 0 path.
  const AnnulusComplex ann = annulus_quad_complex(4);
  ComplexPtr K = share(ann.complex);
  TargetPtr H = GeodesicTarget::hyperbolic(2);
  Rng rng(83);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> images(static_cast<std::size_t>(K->vertex_count) * 3);
    for (std::int32_t v = 0; v < K->vertex_count; ++v)
      H->random_point(rng, 1.5, &images[3 * v]);
    const SimplicialMap q =
        make_map(K, H, images, identity_decks(H, K->edges.size()));
    const CheckResult r = check_area_bound(q, 0.0);
    CHECK(r.pass);
    CHECK(riemannian_area(q) <= simplicial_area_of_map(q) / 2.0 + 1e-9);
  }

  // Flat torus: a = 0 is vacuous and the complex is not all quads.
  const CheckResult vac = check_area_bound(torus_map({1, 0}, {0, 1}), 0.0);
  CHECK(vac.pass);
  CHECK(!vac.note.empty());
  CHECK_THROWS_AS(check_area_bound(torus_map({1, 0}, {0, 1}), 1.0),
                  std::invalid_argument);
}

TEST_CASE("check_vertex_angle_sums: torus flat cone angles, degenerate corners") {
  const SimplicialMap f = torus_map({1, 0}, {0, 1});
  const CheckResult emb = check_vertex_angle_sums(f, AngleMode::Embedding, 1e-12);
  CHECK(emb.pass);
  CHECK(emb.residual <= 1e-12);
  CHECK(check_vertex_angle_sums(f, AngleMode::Immersion, 1e-12).pass);

  // Zero shift on edge a collapses its image; the cocycle still closes.
  const SimplicialMap collapsed = torus_map({0, 0}, {0, 1});
  const CheckResult deg =
      check_vertex_angle_sums(collapsed, AngleMode::Embedding, 1e-9);
  CHECK(!deg.pass);
  CHECK(deg.note.find("degenerate") != std::string::npos);
  CHECK(deg.witness == 0);

  const SimplicialMap g2 = flowed_genus2(93);
  const CheckResult imm = check_vertex_angle_sums(g2, AngleMode::Immersion, 1e-6);
  CHECK(imm.pass);
  const CheckResult emb2 = check_vertex_angle_sums(g2, AngleMode::Embedding, 1e-5);
  CHECK(emb2.pass);
}

TEST_CASE("check_embedding: pass on the torus, each failure mode isolated") {
  const CheckResult ok = check_embedding(torus_map({1, 0}, {0, 1}));
  CHECK(ok.pass);
  CHECK(ok.residual == 0.0);

  const CheckResult collapsed = check_embedding(torus_map({0, 0}, {0, 1}));
  CHECK(!collapsed.pass);
  CHECK(collapsed.note.find("edge") != std::string::npos);

  // Two triangles glued along two shared edges: the parallel edges 0 and 1
  // both join vertices 0,1 with identity decks, a null homotopic 2-edge loop.
  TargetPtr T = GeodesicTarget::euclidean(2);
  ComplexPtr bigon = share(make_complex(3, {{0, 1}, {0, 1}, {1, 2}, {2, 0}},
                                        {{{0, +1}, {2, +1}, {3, +1}},
                                         {{1, +1}, {2, +1}, {3, +1}}}));
  const SimplicialMap dup = make_map(bigon, T, {0, 0, 1, 0, 0.5, 1},
                                     identity_decks(T, 4));
  const CheckResult loops = check_embedding(dup);
  CHECK(!loops.pass);
  CHECK(loops.note.find("loop") != std::string::npos);

  // Vertex 3 inside triangle 012 flips the second face's orientation.
  ComplexPtr twotri = share(make_complex(
      4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 1}},
      {{{0, +1}, {1, +1}, {2, +1}}, {{3, +1}, {4, +1}, {0, -1}}}));
  const SimplicialMap flip = make_map(
      twotri, T, {0, 0, 1, 0, 0.5, 1, 0.5, 0.5}, identity_decks(T, 5));
  const CheckResult orient = check_embedding(flip);
  CHECK(!orient.pass);
  CHECK(orient.note.find("orientation") != std::string::npos);

  const SimplicialMap g2 = flowed_genus2(94);
  const CheckResult hyp = check_embedding(g2, 1e-5);
  CHECK(hyp.pass);
}

TEST_CASE("compare_weights: simplicial stays in the hull, cotangent does not") {
  const WeightReport w = compare_weights(150, 41);
  CHECK(w.instances == 150);
  CHECK(w.skipped >= 3);  // the forced degenerates at indices 49, 99, 149
  CHECK(w.simplicial_violations == 0);
  CHECK(w.cotangent_violations >= 1);
  CHECK(w.first_cotangent_witness >= 0);
  REQUIRE(w.witness.has_value());
  CHECK(w.witness->boundary.size() * 2 == w.witness->boundary_images.size());
  CHECK(w.witness->metric.lengths.size() == w.witness->complex->edges.size());

  const WeightReport again = compare_weights(150, 41);
  CHECK(again.skipped == w.skipped);
  CHECK(again.cotangent_violations == w.cotangent_violations);
  CHECK(again.first_cotangent_witness == w.first_cotangent_witness);
  CHECK(again.witness->boundary_images == w.witness->boundary_images);
  CHECK(again.witness->metric.lengths == w.witness->metric.lengths);
}

TEST_CASE("mean value and hull hold at 10x grad_tol after Dirichlet flows") {
  TargetPtr T = GeodesicTarget::euclidean(2);
  ComplexPtr K = wheel_complex(6);
  Rng rng(84);
  FlowConfig cfg;
  cfg.fixed_vertices = {1, 2, 3, 4, 5, 6};
  // Edge weights reach ~4 here, which puts the monotone-descent noise floor
  // near gradient 1e-6; stay safely above it.
  cfg.grad_tol = 1e-5;
  for (int it = 0; it < 20; ++it) {
    std::vector<double> images(14, 0.0);
    for (std::int32_t v = 1; v <= 6; ++v) {
      const double ang = 2.0 * std::numbers::pi * (v - 1) / 6.0 +
                         rng.uniform(-0.4, 0.4);
      const double rad = rng.uniform(0.6, 1.6);
      images[2 * v] = rad * std::cos(ang);
      images[2 * v + 1] = rad * std::sin(ang);
    }
    SimplicialMetric l{{}};
    l.lengths.resize(12);
    for (double& s : l.lengths) s = rng.uniform(0.5, 2.0);

    const SimplicialMap f = make_map(K, T, images, identity_decks(T, 12));
    const FlowResult r = flow_to_harmonic(f, l, cfg);
    REQUIRE(r.report.termination == FlowTermination::Converged);
    CHECK(check_mean_value(r.map, l, 10.0 * cfg.grad_tol).pass);
    CHECK(check_convex_hull(r.map, l).pass);
  }
}
