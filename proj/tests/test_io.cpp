#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "simharm/io.hpp"
#include "simharm/solver.hpp"

using namespace simharm;
using nlohmann::json;

namespace {

template <typename T>
std::shared_ptr<const DeltaComplex> share(T&& k) {
  return std::make_shared<const DeltaComplex>(std::forward<T>(k));
}

std::vector<DeckElement> identity_decks(const TargetPtr& T, std::size_t n) {
  return std::vector<DeckElement>(n, T->deck_identity());
}

ComplexPtr torus_complex() {
  return share(make_complex(1, {{0, 0}, {0, 0}, {0, 0}},
                            {{{0, +1}, {1, +1}, {2, -1}},
                             {{2, +1}, {0, -1}, {1, -1}}}));
}

SimplicialMap torus_map() {
  TargetPtr T = GeodesicTarget::flat_torus(2);
  return make_map(torus_complex(), T, {0.25, 0.7},
                  {T->deck_from_shift({1, 0}), T->deck_from_shift({0, 1}),
                   T->deck_from_shift({1, 1})});
}

SimplicialMap genus2_map() {
  TargetPtr T = GeodesicTarget::genus2_octagon();
  ComplexPtr K = share(make_complex(
      1, {{0, 0}, {0, 0}, {0, 0}, {0, 0}},
      {{{0, +1}, {1, +1}, {0, -1}, {1, -1}, {2, +1}, {3, +1}, {2, -1}, {3, -1}}}));
  std::vector<DeckElement> decks;
  for (const char* w : {"a", "b", "c", "d"}) decks.push_back(T->deck_from_word(w));
  return make_map(K, T, {1, 0, 0}, decks);
}

// Serialize, print, and parse back: the full file path minus the filesystem.
json reparse(const json& j) { return json::parse(j.dump(2)); }

int count_lines(const std::string& text, char head) {
  int n = 0;
  for (std::size_t i = 0; i < text.size(); ++i)
    if (text[i] == head && (i == 0 || text[i - 1] == '\n')) ++n;
  return n;
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("complex JSON round-trips the build data bit-exactly") {
  ComplexPtr K = torus_complex();
  const json j = complex_to_json(*K);
  const DeltaComplex back = complex_from_json(reparse(j));
  CHECK(back.vertex_count == K->vertex_count);
  CHECK(back.edges == K->edges);
  CHECK(back.mode == ComplexMode::Surface);
  REQUIRE(back.faces.size() == K->faces.size());
  for (std::size_t f = 0; f < back.faces.size(); ++f) {
    REQUIRE(back.faces[f].size() == K->faces[f].size());
    for (std::size_t k = 0; k < back.faces[f].size(); ++k) {
      CHECK(back.faces[f][k].edge == K->faces[f][k].edge);
      CHECK(back.faces[f][k].dir == K->faces[f][k].dir);
    }
  }
  CHECK(complex_to_json(back) == j);

  // Skeleton mode survives, including an edge with three face slots.
  const DeltaComplex book =
      make_complex(4, {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {3, 0}, {0, 2}},
                   {{{0, +1}, {1, +1}, {2, +1}},
                    {{0, +1}, {3, +1}, {4, +1}},
                    {{0, +1}, {1, +1}, {5, -1}}},
                   ComplexMode::Skeleton);
  const DeltaComplex back2 = complex_from_json(reparse(complex_to_json(book)));
  CHECK(back2.mode == ComplexMode::Skeleton);
  CHECK(back2.edges == book.edges);
  CHECK(complex_to_json(back2) == complex_to_json(book));
}

TEST_CASE("metric JSON preserves doubles bit-exactly") {
  const SimplicialMetric l{{0.1, 1.0 / 3.0, 1e-300, 2.5e17, 0.0, 4.0}};
  const SimplicialMetric back = metric_from_json(reparse(metric_to_json(l)));
  REQUIRE(back.lengths.size() == l.lengths.size());
  for (std::size_t i = 0; i < l.lengths.size(); ++i)
    CHECK(back.lengths[i] == l.lengths[i]);
}

TEST_CASE("target JSON round-trips every kind") {
  std::vector<TargetPtr> targets{
      GeodesicTarget::euclidean(3), GeodesicTarget::hyperbolic(2),
      GeodesicTarget::flat_torus(2), GeodesicTarget::genus2_octagon(),
      GeodesicTarget::metric_tree(4, {{0, 1}, {1, 2}, {1, 3}}, {1.0, 0.5, 2.0})};
  for (const TargetPtr& T : targets) {
    const json j = target_to_json(*T);
    const TargetPtr back = target_from_json(reparse(j));
    CHECK(back->kind() == T->kind());
    CHECK(back->dim() == T->dim());
    CHECK(back->model_dim() == T->model_dim());
    CHECK(target_to_json(*back) == j);
  }

  // Tree geometry survives: distance from edge 0 midpoint to vertex 3.
  const TargetPtr tree = targets.back();
  const TargetPtr tree2 = target_from_json(target_to_json(*tree));
  const double pa[2] = {0, 0.5}, pb[2] = {2, 2.0};
  CHECK(tree2->distance(pa, pb) == tree->distance(pa, pb));

  CHECK_THROWS_AS(target_from_json(json{{"type", "sphere"}}),
                  std::invalid_argument);
}

TEST_CASE("map JSON round-trips images, shifts, and words") {
  const SimplicialMap t = torus_map();
  const SimplicialMap t2 =
      map_from_json(reparse(map_to_json(t)), t.complex, t.target);
  CHECK(t2.vertex_images == t.vertex_images);
  REQUIRE(t2.edge_decks.size() == 3);
  for (std::size_t e = 0; e < 3; ++e)
    CHECK(t2.edge_decks[e].shift == t.edge_decks[e].shift);

  const SimplicialMap g = genus2_map();
  const json jg = map_to_json(g);
  CHECK(jg.at("edge_decks")[0] == "a");
  const SimplicialMap g2 = map_from_json(reparse(jg), g.complex, g.target);
  CHECK(g2.vertex_images == g.vertex_images);
  CHECK(edge_lengths(g2) == edge_lengths(g));
  for (std::size_t e = 0; e < 4; ++e) {
    CHECK(g2.edge_decks[e].word == g.edge_decks[e].word);
    CHECK(g2.edge_decks[e].mat.max_abs_diff(g.edge_decks[e].mat) == 0.0);
  }

  TargetPtr E = GeodesicTarget::euclidean(1);
  ComplexPtr K = share(make_complex(3, {{0, 1}, {1, 2}, {2, 0}},
                                    {{{0, +1}, {1, +1}, {2, +1}}}));
  const SimplicialMap e = make_map(K, E, {0, 1, 2}, identity_decks(E, 3));
  const json je = map_to_json(e);
  CHECK(je.at("edge_decks")[1] == "id");
  const SimplicialMap e2 = map_from_json(je, K, E);
  CHECK(e2.vertex_images == e.vertex_images);
}

TEST_CASE("map decoding rejects structurally broken documents") {
  const SimplicialMap t = torus_map();
  json j = map_to_json(t);
  j["vertex_images"][0] = {0.25};  // one coordinate missing
  CHECK_THROWS_AS(map_from_json(j, t.complex, t.target), std::invalid_argument);

  j = map_to_json(t);
  j["edge_decks"][1] = true;
  CHECK_THROWS_AS(map_from_json(j, t.complex, t.target), std::invalid_argument);

  j = map_to_json(t);
  j["edge_decks"].erase(2);
  CHECK_THROWS_AS(map_from_json(j, t.complex, t.target), std::invalid_argument);

  j = map_to_json(t);
  j.erase("vertex_images");
  CHECK_THROWS_AS(map_from_json(j, t.complex, t.target), std::invalid_argument);

  // Deck shape must match the target kind: a word on a torus edge.
  j = map_to_json(t);
  j["edge_decks"][0] = "aB";
  CHECK_THROWS_AS(map_from_json(j, t.complex, t.target), std::invalid_argument);
}

TEST_CASE("OBJ export: flat targets direct, quads split at the preferred vertex") {
  TargetPtr E = GeodesicTarget::euclidean(2);
  ComplexPtr tri = share(make_complex(3, {{0, 1}, {1, 2}, {2, 0}},
                                      {{{0, +1}, {1, +1}, {2, +1}}}));
  const SimplicialMap f =
      make_map(tri, E, {0, 0, 1, 0, 0, 1}, identity_decks(E, 3));
  CHECK(obj_export(f) == "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");

  ComplexPtr quad = share(make_complex(
      4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}},
      {{{0, +1}, {1, +1}, {2, +1}, {3, +1}}}));
  const SimplicialMap q =
      make_map(quad, E, {0, 0, 1, 0, 1, 1, 0, 1}, identity_decks(E, 4));
  const std::string obj = obj_export(q);
  CHECK(count_lines(obj, 'v') == 4);
  CHECK(count_lines(obj, 'f') == 2);
  CHECK(obj.find("f 1 2 3\n") != std::string::npos);
  CHECK(obj.find("f 1 3 4\n") != std::string::npos);

  // Quotient-torus mesh: v/f records match the complex counts.
  const std::string tobj = obj_export(torus_map());
  CHECK(count_lines(tobj, 'v') == 1);
  CHECK(count_lines(tobj, 'f') == 2);

  TargetPtr E4 = GeodesicTarget::euclidean(4);
  const SimplicialMap wide =
      make_map(tri, E4, std::vector<double>(12, 0.0), identity_decks(E4, 3));
  CHECK_THROWS_AS(obj_export(wide), std::invalid_argument);
}

TEST_CASE("OBJ export: hyperboloid images project to the Poincare disk") {
  TargetPtr H = GeodesicTarget::hyperbolic(2);
  ComplexPtr tri = share(make_complex(3, {{0, 1}, {1, 2}, {2, 0}},
                                      {{{0, +1}, {1, +1}, {2, +1}}}));
  const SimplicialMap o = make_map(tri, H, {1, 0, 0, 1, 0, 0, 1, 0, 0},
                                   identity_decks(H, 3));
  CHECK(obj_export(o) == "v 0 0 0\nv 0 0 0\nv 0 0 0\nf 1 2 3\n");

  // One octagon face: per-face lift block, so 8 vertices and a 6-triangle fan.
  const std::string g = obj_export(genus2_map());
  CHECK(count_lines(g, 'v') == 8);
  CHECK(count_lines(g, 'f') == 6);
  CHECK(g.find("f 1 7 8\n") != std::string::npos);
}

TEST_CASE("flow reports serialize with traces and infinite-energy rows") {
  TargetPtr E = GeodesicTarget::euclidean(1);
  ComplexPtr tri = share(make_complex(3, {{0, 1}, {1, 2}, {2, 0}},
                                      {{{0, +1}, {1, +1}, {2, +1}}}));
  FlowConfig cfg;
  cfg.fixed_vertices = {1, 2};
  const SimplicialMap f = make_map(tri, E, {0.9, 0, 1}, identity_decks(E, 3));
  const FlowResult r = flow_to_harmonic(f, SimplicialMetric{{1, 1, 1}}, cfg);
  REQUIRE(r.report.termination == FlowTermination::Converged);

  const json j = flow_report_to_json(r.report);
  CHECK(j.at("termination") == "converged");
  CHECK(j.at("iterations").get<std::int64_t>() == r.report.iterations());
  REQUIRE(j.at("energy").size() == r.report.energy.size());
  for (std::size_t i = 1; i < r.report.energy.size(); ++i)
    CHECK(j.at("energy")[i].get<double>() <= j.at("energy")[i - 1].get<double>());

  const std::string csv = flow_trace_csv(r.report);
  CHECK(csv.rfind("iteration,energy,grad_norm,step\n", 0) == 0);
  CHECK(count_lines(csv, '0') >= 1);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<std::ptrdiff_t>(r.report.energy.size()) + 1);

  // Zero domain length with positive image length: infinite energy row.
  const FlowResult inf = flow_to_harmonic(f, SimplicialMetric{{0, 1, 1}}, cfg);
  const json ji = flow_report_to_json(inf.report);
  CHECK(ji.at("termination") == "infinite_energy");
  CHECK(ji.at("energy")[0].is_null());
  CHECK(flow_trace_csv(inf.report).find("inf") != std::string::npos);
}

TEST_CASE("JSON files save and load with path-tagged errors") {
  const TempFile tmp{"tmp_io_roundtrip.json"};
  const json j = complex_to_json(*torus_complex());
  save_json(j, tmp.path);
  CHECK(load_json(tmp.path) == j);

  CHECK_THROWS_AS(load_json("missing_dir/nothing.json"), std::runtime_error);

  const TempFile bad{"tmp_io_bad.json"};
  save_text("{\"vertices\": 1,", bad.path);
  CHECK_THROWS_AS(load_json(bad.path), std::runtime_error);
}
