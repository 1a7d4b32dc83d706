#include "simharm/smap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "simharm/kernels.hpp"

namespace simharm {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Deck of an edge as traversed by a face slot: the stored element for forward
// slots, its inverse for reversed ones.
DeckElement signed_deck(const GeodesicTarget& T, const std::vector<DeckElement>& decks,
                        const EdgeRef& r) {
  return r.dir > 0 ? decks[r.edge] : T.deck_inverse(decks[r.edge]);
}

bool deck_payload_empty(const DeckElement& g) {
  return g.shift.empty() && g.word.empty() &&
         g.mat.max_abs_diff(Mat3::identity()) == 0.0;
}

double mat_scale(const DeckElement& g) {
  double m = 0.0;
  for (double v : g.mat.a) m = std::max(m, std::abs(v));
  return m;
}

// Identity test for composed products (cocycles, holonomies). The octagon
// generators satisfy their relation only to ~1e-11, and composing conjugates
// that residual by the intermediate factors, so the comparison scales with
// the largest matrix entry seen along the way. Genuine mismatches sit at a
// group-element distance from the identity and still fail by a wide margin.
bool composed_identity(const GeodesicTarget& T, const DeckElement& acc,
                       double scale, double tol) {
  if (T.kind() == TargetKind::Genus2Octagon)
    return acc.mat.max_abs_diff(Mat3::identity()) <= tol * std::max(1.0, scale);
  return T.deck_is_identity(acc, tol);
}

struct UnionFind {
  std::vector<std::int32_t> parent;

  explicit UnionFind(std::int32_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) { parent[find(a)] = find(b); }
};

// Union-find tracking orientation: each element equals its root traversed
// with the accumulated sign. Used to merge the parallel edges of degenerate
// 2-gons, which may identify an edge with another one reversed.
struct SignedUnionFind {
  std::vector<std::int32_t> parent;
  std::vector<std::int8_t> sign;  // element = parent^sign

  explicit SignedUnionFind(std::int32_t n) : parent(n), sign(n, 1) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::pair<std::int32_t, int> find(std::int32_t x) {
    std::int32_t r = x;
    int s = 1;
    while (parent[r] != r) {
      s *= sign[r];
      r = parent[r];
    }
    int cum = s;
    while (x != r) {
      const std::int32_t next = parent[x];
      const int sx = sign[x];
      parent[x] = r;
      sign[x] = static_cast<std::int8_t>(cum);
      cum *= sx;
      x = next;
    }
    return {r, s};
  }
  // Declare x = y^rel; false when that clashes with the recorded orientations.
  bool unite(std::int32_t x, std::int32_t y, int rel) {
    const auto [rx, sx] = find(x);
    const auto [ry, sy] = find(y);
    if (rx == ry) return sx == rel * sy;
    parent[rx] = ry;
    sign[rx] = static_cast<std::int8_t>(rel * sy * sx);
    return true;
  }
};

}  // namespace

void validate_map(const SimplicialMap& f, double point_tol, double cocycle_tol) {
  if (!f.complex) fail("map has no complex");
  if (!f.target) fail("map has no target");
  const DeltaComplex& K = *f.complex;
  const GeodesicTarget& T = *f.target;
  const int md = T.model_dim();

  if (f.vertex_images.size() != static_cast<std::size_t>(K.vertex_count) * md)
    fail("vertex image array has " + std::to_string(f.vertex_images.size()) +
         " doubles; expected " + std::to_string(K.vertex_count) + " x " +
         std::to_string(md));
  if (f.edge_decks.size() != static_cast<std::size_t>(K.edge_count()))
    fail("deck array has " + std::to_string(f.edge_decks.size()) +
         " elements; expected one per edge (" + std::to_string(K.edge_count()) + ")");

  for (std::int32_t v = 0; v < K.vertex_count; ++v) {
    try {
      T.validate_point(f.image(v), point_tol);
    } catch (const std::invalid_argument& e) {
      fail("vertex " + std::to_string(v) + ": " + e.what());
    }
  }

  const TargetKind kind = T.kind();
  for (std::int32_t e = 0; e < K.edge_count(); ++e) {
    const DeckElement& g = f.edge_decks[e];
    if (kind == TargetKind::FlatTorus) {
      if (static_cast<int>(g.shift.size()) != T.dim() || !g.word.empty())
        fail("edge " + std::to_string(e) + ": deck is not an integer shift of dimension " +
             std::to_string(T.dim()));
    } else if (kind == TargetKind::Genus2Octagon) {
      if (!g.shift.empty())
        fail("edge " + std::to_string(e) + ": deck carries a torus shift");
      const DeckElement ref = T.deck_from_word(g.word);
      if (ref.word != g.word)
        fail("edge " + std::to_string(e) + ": deck word is not freely reduced");
      double scale = 1.0;
      for (double a : ref.mat.a) scale = std::max(scale, std::abs(a));
      if (g.mat.max_abs_diff(ref.mat) > cocycle_tol * scale)
        fail("edge " + std::to_string(e) + ": deck matrix does not match its word");
    } else if (!deck_payload_empty(g)) {
      fail("edge " + std::to_string(e) +
           ": deck payload is nontrivial but the target has a trivial deck group");
    }
  }

  if (kind != TargetKind::FlatTorus && kind != TargetKind::Genus2Octagon) return;
  for (std::int32_t fc = 0; fc < K.face_count(); ++fc) {
    const auto& cycle = K.faces[fc];
    DeckElement acc = signed_deck(T, f.edge_decks, cycle[0]);
    double scale = mat_scale(acc);
    for (std::size_t k = 1; k < cycle.size(); ++k) {
      acc = T.deck_compose(acc, signed_deck(T, f.edge_decks, cycle[k]));
      scale = std::max(scale, mat_scale(acc));
    }
    if (!composed_identity(T, acc, scale, cocycle_tol))
      fail("face " + std::to_string(fc) + ": deck cocycle around the boundary is not the identity");
  }
}

SimplicialMap make_map(ComplexPtr complex, TargetPtr target,
                       std::vector<double> vertex_images,
                       std::vector<DeckElement> edge_decks) {
  SimplicialMap f{std::move(complex), std::move(target), std::move(vertex_images),
                  std::move(edge_decks)};
  validate_map(f);
  return f;
}

std::vector<double> edge_lengths(const SimplicialMap& f) {
  const DeltaComplex& K = *f.complex;
  const GeodesicTarget& T = *f.target;
  std::vector<double> L(K.edge_count());
  for (std::int32_t e = 0; e < K.edge_count(); ++e)
    L[e] = T.edge_length(f.edge_decks[e], f.image(K.edges[e][0]), f.image(K.edges[e][1]));
  return L;
}

SimplicialMetric induced_quasimetric(const SimplicialMap& f, double tol) {
  SimplicialMetric l{edge_lengths(f)};
  for (const MetricViolation& v : validate_metric(*f.complex, l)) {
    if (v.face < 0)
      throw std::runtime_error("induced length of edge " + std::to_string(v.slot) +
                               " is not finite");
    if (v.excess > tol)
      throw std::runtime_error("face " + std::to_string(v.face) + " slot " +
                               std::to_string(v.slot) +
                               ": induced lengths violate the polygon inequality beyond rounding");
  }
  return l;
}

StretchProfile stretch_factors(const SimplicialMap& f, const SimplicialMetric& l) {
  const std::vector<double> L = edge_lengths(f);
  if (l.lengths.size() != L.size())
    fail("length array does not match edge count");
  StretchProfile sp;
  sp.sigma.resize(L.size());
  for (std::size_t e = 0; e < L.size(); ++e) {
    double s;
    if (l.lengths[e] > 0.0) {
      s = L[e] / l.lengths[e];
      sp.max_finite = std::max(sp.max_finite, s);
    } else if (L[e] == 0.0) {
      s = 0.0;
    } else {
      s = kInfinite;
      sp.any_infinite = true;
    }
    sp.sigma[e] = s;
  }
  return sp;
}

double simplicial_area_of_map(const SimplicialMap& f) {
  const DeltaComplex& K = *f.complex;
  const std::vector<double> L = edge_lengths(f);
  return kernels::corner_product_sum(L.data(), K.corner_ea.data(), K.corner_eb.data(),
                                     K.corner_ea.size());
}

double simplicial_energy(const SimplicialMap& f, const SimplicialMetric& l) {
  const DeltaComplex& K = *f.complex;
  if (l.lengths.size() != static_cast<std::size_t>(K.edge_count()))
    fail("length array does not match edge count");
  const std::vector<double> L = edge_lengths(f);
  for (std::int32_t e = 0; e < K.edge_count(); ++e)
    if (l.lengths[e] == 0.0 && L[e] > 0.0) return kInfinite;
  return kernels::corner_energy_sum(l.lengths.data(), L.data(), K.corner_ea.data(),
                                    K.corner_eb.data(), K.corner_ea.size());
}

double simplicial_energy_edge_form(const SimplicialMap& f, const SimplicialMetric& l) {
  const DeltaComplex& K = *f.complex;
  const std::vector<double> w = edge_weights_quasi(K, l);
  const std::vector<double> L = edge_lengths(f);
  for (std::int32_t e = 0; e < K.edge_count(); ++e)
    if (l.lengths[e] == 0.0 && L[e] > 0.0) return kInfinite;
  return kernels::weighted_square_sum(w.data(), L.data(), w.size());
}

ConformalReport is_conformal(const SimplicialMap& f, const SimplicialMetric& l,
                             double tol) {
  const DeltaComplex& K = *f.complex;
  const StretchProfile sp = stretch_factors(f, l);
  const std::int32_t E = K.edge_count();

  UnionFind uf(E);
  for (std::size_t k = 0; k < K.corner_ea.size(); ++k) {
    const std::int32_t ea = K.corner_ea[k], eb = K.corner_eb[k];
    if (l.lengths[ea] > 0.0 && l.lengths[eb] > 0.0) uf.unite(ea, eb);
  }

  ConformalReport r;
  r.any_infinite = sp.any_infinite;
  r.component.assign(E, -1);
  std::vector<std::int32_t> label(E, -1);
  for (std::int32_t e = 0; e < E; ++e) {
    if (l.lengths[e] <= 0.0) continue;
    const std::int32_t root = uf.find(e);
    if (label[root] < 0) label[root] = r.component_count++;
    r.component[e] = label[root];
  }

  std::vector<double> lo(r.component_count, kInfinite);
  std::vector<double> hi(r.component_count, 0.0);
  for (std::int32_t e = 0; e < E; ++e) {
    const std::int32_t c = r.component[e];
    if (c < 0) continue;
    lo[c] = std::min(lo[c], sp.sigma[e]);
    hi[c] = std::max(hi[c], sp.sigma[e]);
  }
  for (std::int32_t c = 0; c < r.component_count; ++c)
    if (hi[c] > 0.0) r.max_deviation = std::max(r.max_deviation, (hi[c] - lo[c]) / hi[c]);
  r.conformal = !r.any_infinite && r.max_deviation <= tol;
  return r;
}

namespace {

double hyp_corner_angle(double opp, double s1, double s2) {
  const double num = std::cosh(s1) * std::cosh(s2) - std::cosh(opp);
  const double den = std::sinh(s1) * std::sinh(s2);
  return std::acos(std::clamp(num / den, -1.0, 1.0));
}

double geodesic_triangle_area(const GeodesicTarget& T, const double* a, const double* b,
                              const double* c) {
  const double ab = T.distance(a, b);
  const double bc = T.distance(b, c);
  const double ca = T.distance(c, a);
  if (ab == 0.0 || bc == 0.0 || ca == 0.0) return 0.0;
  if (T.curvature_upper_bound() < 0.0) {
    const double defect = std::numbers::pi - hyp_corner_angle(bc, ab, ca) -
                          hyp_corner_angle(ca, ab, bc) - hyp_corner_angle(ab, ca, bc);
    return std::max(defect, 0.0);
  }
  return heron_area(ab, bc, ca);
}

}  // namespace

std::vector<double> face_lifts(const SimplicialMap& f, std::int32_t face) {
  const DeltaComplex& K = *f.complex;
  const GeodesicTarget& T = *f.target;
  if (T.kind() == TargetKind::MetricTree)
    throw std::logic_error("metric tree target has no universal cover lifts");
  if (face < 0 || face >= K.face_count())
    fail("face " + std::to_string(face) + " is out of range");
  const int md = T.model_dim();
  const auto& cycle = K.faces[face];
  const std::int32_t m = static_cast<std::int32_t>(cycle.size());
  const std::int32_t p = K.face_preferred_slot[face];

  // Lift the boundary starting at the preferred corner; the deck product
  // around the cycle closes it up (cocycle condition).
  std::vector<double> lifts(static_cast<std::size_t>(m) * md);
  const double* x0 = f.image(K.slot_start(face, p));
  std::copy(x0, x0 + md, lifts.begin());
  DeckElement acc;
  for (std::int32_t k = 0; k + 1 < m; ++k) {
    const std::int32_t slot = (p + k) % m;
    const DeckElement step = signed_deck(T, f.edge_decks, cycle[slot]);
    acc = k == 0 ? step : T.deck_compose(acc, step);
    T.deck_apply(acc, f.image(K.slot_end(face, slot)), &lifts[(k + 1) * md]);
  }
  return lifts;
}

double riemannian_area(const SimplicialMap& f) {
  const DeltaComplex& K = *f.complex;
  const GeodesicTarget& T = *f.target;
  if (T.kind() == TargetKind::MetricTree) return 0.0;
  const int md = T.model_dim();

  double total = 0.0;
  for (std::int32_t fc = 0; fc < K.face_count(); ++fc) {
    const std::vector<double> lifts = face_lifts(f, fc);
    for (std::int32_t k = 1; k + 1 < K.face_arity(fc); ++k)
      total += geodesic_triangle_area(T, lifts.data(), &lifts[k * md],
                                      &lifts[(k + 1) * md]);
  }
  return total;
}

std::vector<double> corner_angles(const SimplicialMap& f) {
  const DeltaComplex& K = *f.complex;
  const GeodesicTarget& T = *f.target;
  if (T.kind() == TargetKind::MetricTree)
    throw std::logic_error("metric tree target has no corner angles");

  std::vector<double> angles(K.corner_ea.size());
  std::array<double, kMaxModelDim> u{}, v{};
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const std::int32_t fc = K.corner_face[k];
    const std::int32_t m = K.face_arity(fc);
    const std::int32_t j = K.corner_slot[k];
    const std::int32_t j2 = (j + 1) % m;
    const double* xw = f.image(K.corner_vertex[k]);

    // Wedge legs at the corner vertex: back along slot j, forward along j+1.
    const EdgeRef back{K.faces[fc][j].edge, static_cast<std::int8_t>(-K.faces[fc][j].dir)};
    T.edge_log(signed_deck(T, f.edge_decks, back), xw, f.image(K.slot_start(fc, j)),
               u.data());
    T.edge_log(signed_deck(T, f.edge_decks, K.faces[fc][j2]), xw,
               f.image(K.slot_end(fc, j2)), v.data());

    const double nu = T.tangent_norm(xw, u.data());
    const double nv = T.tangent_norm(xw, v.data());
    if (nu == 0.0 || nv == 0.0) {
      angles[k] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double c = T.tangent_dot(xw, u.data(), v.data()) / (nu * nv);
    angles[k] = std::acos(std::clamp(c, -1.0, 1.0));
  }
  return angles;
}

SimplicialMap gauge_transform(const SimplicialMap& f, std::int32_t v,
                              const DeckElement& h) {
  const DeltaComplex& K = *f.complex;
  const GeodesicTarget& T = *f.target;
  if (v < 0 || v >= K.vertex_count)
    fail("gauge vertex " + std::to_string(v) + " is out of range");
  const TargetKind kind = T.kind();
  if (kind != TargetKind::FlatTorus && kind != TargetKind::Genus2Octagon) {
    if (!deck_payload_empty(h))
      fail("target has a trivial deck group; only the identity gauge applies");
    return f;
  }

  SimplicialMap g = f;
  std::array<double, kMaxModelDim> moved{};
  T.deck_apply(h, f.image(v), moved.data());
  std::copy(moved.begin(), moved.begin() + T.model_dim(), g.image(v));

  const DeckElement hinv = T.deck_inverse(h);
  for (std::int32_t e = 0; e < K.edge_count(); ++e) {
    const std::int32_t tail = K.edges[e][0], head = K.edges[e][1];
    if (tail != v && head != v) continue;
    DeckElement d = f.edge_decks[e];
    if (tail == v) d = T.deck_compose(h, d);
    if (head == v) d = T.deck_compose(d, hinv);
    g.edge_decks[e] = std::move(d);
  }
  return g;
}

// The corner sums never use the surface condition, so the 2-complex
// functionals are the same evaluations under their own names.
double energy2(const SimplicialMap& f, const SimplicialMetric& l) {
  return simplicial_energy(f, l);
}

double volume2(const SimplicialMap& f) { return simplicial_area_of_map(f); }

double volume2_metric(const DeltaComplex& K, const SimplicialMetric& l) {
  return simplicial_area(K, l);
}

SimplicialMap standard_type_map(ComplexPtr complex, TargetPtr tree,
                                const std::vector<AnnulusMarking>& annuli,
                                const std::vector<std::int32_t>& region_vertices) {
  if (!complex) fail("standard-type map has no complex");
  if (!tree || tree->kind() != TargetKind::MetricTree)
    fail("standard-type maps need a metric tree target");
  const DeltaComplex& K = *complex;
  const TreeData& td = tree->tree();
  const std::int32_t TE = static_cast<std::int32_t>(td.edges.size());
  if (TE == 0) fail("the tree target has no edges; its points cannot be represented");

  // Canonical point of a tree vertex: smallest incident edge, offset 0 at its
  // tail or the full length at its head. Vertices incident to no edge keep
  // edge -1 and are rejected if used.
  std::vector<std::array<double, 2>> tree_point(td.vertex_count, {-1.0, 0.0});
  for (std::int32_t e = TE - 1; e >= 0; --e) {
    tree_point[td.edges[e][0]] = {static_cast<double>(e), 0.0};
    tree_point[td.edges[e][1]] = {static_cast<double>(e), td.lengths[e]};
  }
  auto usable_tree_vertex = [&](std::int32_t tv, const std::string& what) {
    if (tv < 0 || tv >= td.vertex_count)
      fail(what + " references tree vertex " + std::to_string(tv) + " out of range");
    if (tree_point[tv][0] < 0.0)
      fail(what + " references isolated tree vertex " + std::to_string(tv));
  };

  const std::int32_t F = K.face_count();
  const std::int32_t E = K.edge_count();
  std::vector<std::int32_t> face_annulus(F, -1);
  for (std::size_t i = 0; i < annuli.size(); ++i) {
    const AnnulusMarking& a = annuli[i];
    const std::string name = "annulus " + std::to_string(i);
    if (a.faces.empty()) fail(name + " has no faces");
    if (a.tree_edge < 0 || a.tree_edge >= TE)
      fail(name + ": tree edge " + std::to_string(a.tree_edge) + " out of range");
    for (std::int32_t fc : a.faces) {
      if (fc < 0 || fc >= F) fail(name + ": face " + std::to_string(fc) + " out of range");
      if (K.face_arity(fc) != 4)
        fail(name + ": face " + std::to_string(fc) + " is not a quad");
      if (face_annulus[fc] != -1)
        fail("face " + std::to_string(fc) + " is marked twice");
      face_annulus[fc] = static_cast<std::int32_t>(i);
    }
  }

  // An edge between two different annuli would be a side edge of both, and
  // each would pin its own circle on it; reject the ambiguity.
  for (std::int32_t e = 0; e < E; ++e) {
    std::int32_t seen = -1;
    for (const auto& [fc, slot] : K.edge_face_slots[e]) {
      const std::int32_t a = face_annulus[fc];
      if (a < 0) continue;
      if (seen >= 0 && seen != a)
        fail("edge " + std::to_string(e) + " is shared by annuli " + std::to_string(seen) +
             " and " + std::to_string(a));
      seen = a;
    }
  }

  // Unmarked faces fall into region components, labeled in ascending face-id
  // order to match region_vertices.
  UnionFind rf(F);
  for (std::int32_t e = 0; e < E; ++e) {
    std::int32_t first = -1;
    for (const auto& [fc, slot] : K.edge_face_slots[e]) {
      if (face_annulus[fc] >= 0) continue;
      if (first < 0)
        first = fc;
      else
        rf.unite(first, fc);
    }
  }
  std::vector<std::int32_t> region_label(F, -1);
  std::int32_t region_count = 0;
  std::vector<std::int32_t> region_of(F, -1);
  for (std::int32_t fc = 0; fc < F; ++fc) {
    if (face_annulus[fc] >= 0) continue;
    const std::int32_t root = rf.find(fc);
    if (region_label[root] < 0) region_label[root] = region_count++;
    region_of[fc] = region_label[root];
  }
  if (static_cast<std::int32_t>(region_vertices.size()) != region_count)
    fail("expected " + std::to_string(region_count) + " region vertices, got " +
         std::to_string(region_vertices.size()));
  for (std::size_t r = 0; r < region_vertices.size(); ++r)
    usable_tree_vertex(region_vertices[r], "region " + std::to_string(r));

  std::vector<char> pinned(K.vertex_count, 0);
  std::vector<std::array<double, 2>> pin(K.vertex_count, {0.0, 0.0});
  auto pin_vertex = [&](std::int32_t v, const std::array<double, 2>& pt,
                        const std::string& what) {
    if (!pinned[v]) {
      pinned[v] = 1;
      pin[v] = pt;
      return;
    }
    if (pin[v][0] != pt[0] || pin[v][1] != pt[1])
      fail(what + " forces vertex " + std::to_string(v) +
           " onto two different tree points; the markings are inconsistent");
  };

  for (std::int32_t fc = 0; fc < F; ++fc) {
    if (region_of[fc] < 0) continue;
    const auto& pt = tree_point[region_vertices[region_of[fc]]];
    for (std::int32_t k = 0; k < K.face_arity(fc); ++k)
      pin_vertex(K.slot_start(fc, k), pt, "region " + std::to_string(region_of[fc]));
  }

  for (std::size_t i = 0; i < annuli.size(); ++i) {
    const AnnulusMarking& a = annuli[i];
    const std::string name = "annulus " + std::to_string(i);
    const std::int32_t tv0 = td.edges[a.tree_edge][0];
    const std::int32_t tv1 = td.edges[a.tree_edge][1];
    usable_tree_vertex(tv0, name);
    usable_tree_vertex(tv1, name);

    // Edge roles: once in the annulus's slots = side, twice = rung.
    std::vector<std::int32_t> occ(E, 0);
    for (std::int32_t fc : a.faces)
      for (const EdgeRef& r : K.faces[fc]) ++occ[r.edge];
    for (std::int32_t e = 0; e < E; ++e)
      if (occ[e] > 2)
        fail(name + ": edge " + std::to_string(e) + " appears " +
             std::to_string(occ[e]) + " times");

    std::int32_t rung_count = 0;
    std::int32_t min_side = -1;
    for (std::int32_t e = 0; e < E; ++e) {
      if (occ[e] == 2) ++rung_count;
      if (occ[e] == 1 && min_side < 0) min_side = e;
    }
    if (min_side < 0) fail(name + " has no side edges");
    if (rung_count != static_cast<std::int32_t>(a.faces.size()))
      fail(name + " is not a closed ring: " + std::to_string(rung_count) +
           " rungs for " + std::to_string(a.faces.size()) + " quads");

    for (std::int32_t fc : a.faces) {
      const auto& cy = K.faces[fc];
      const bool r0 = occ[cy[0].edge] == 2, r1 = occ[cy[1].edge] == 2;
      const bool r2 = occ[cy[2].edge] == 2, r3 = occ[cy[3].edge] == 2;
      if (!((r0 && r2 && !r1 && !r3) || (r1 && r3 && !r0 && !r2)))
        fail(name + ": face " + std::to_string(fc) +
             " does not have two rungs in opposite slots");
    }

    // Ring connectivity through the rungs.
    {
      std::vector<std::int32_t> local(F, -1);
      for (std::size_t k = 0; k < a.faces.size(); ++k)
        local[a.faces[k]] = static_cast<std::int32_t>(k);
      UnionFind ring(static_cast<std::int32_t>(a.faces.size()));
      for (std::int32_t e = 0; e < E; ++e) {
        if (occ[e] != 2) continue;
        std::int32_t first = -1;
        for (const auto& [fc, slot] : K.edge_face_slots[e]) {
          if (local[fc] < 0) continue;
          if (first < 0)
            first = local[fc];
          else
            ring.unite(first, local[fc]);
        }
      }
      const std::int32_t root = ring.find(0);
      for (std::size_t k = 1; k < a.faces.size(); ++k)
        if (ring.find(static_cast<std::int32_t>(k)) != root)
          fail(name + " is not connected through its rungs");
    }

    // The side edges must form exactly two vertex circles.
    UnionFind cir(K.vertex_count);
    for (std::int32_t e = 0; e < E; ++e)
      if (occ[e] == 1) cir.unite(K.edges[e][0], K.edges[e][1]);
    const std::int32_t root_a = cir.find(K.edges[min_side][0]);
    std::int32_t root_b = -1;
    std::vector<std::int32_t> side_vertices;
    {
      std::vector<char> seen(K.vertex_count, 0);
      for (std::int32_t e = 0; e < E; ++e) {
        if (occ[e] != 1) continue;
        for (int end = 0; end < 2; ++end) {
          const std::int32_t v = K.edges[e][end];
          if (seen[v]) continue;
          seen[v] = 1;
          side_vertices.push_back(v);
          const std::int32_t root = cir.find(v);
          if (root == root_a) continue;
          if (root_b < 0) root_b = root;
          else if (root != root_b)
            fail(name + ": side edges form more than two circles");
        }
      }
    }
    if (root_b < 0) fail(name + ": side edges form a single circle, expected two");

    for (std::int32_t e = 0; e < E; ++e) {
      if (occ[e] != 2) continue;
      const std::int32_t ra = cir.find(K.edges[e][0]);
      const std::int32_t rb = cir.find(K.edges[e][1]);
      if (!((ra == root_a && rb == root_b) || (ra == root_b && rb == root_a)))
        fail(name + ": rung " + std::to_string(e) + " does not join the two side circles");
    }

    // Orientation: circle of min_side maps to the tree edge's tail unless an
    // anchor or an adjacent pinned vertex says otherwise.
    const std::array<double, 2> pt_tail = tree_point[tv0];
    const std::array<double, 2> pt_head = tree_point[tv1];
    std::int32_t forced = -1;  // 0: min_side circle -> tail, 1: -> head
    for (std::int32_t v : side_vertices) {
      if (!pinned[v]) continue;
      const bool at_a = cir.find(v) == root_a;
      std::int32_t o;
      if (pin[v][0] == pt_tail[0] && pin[v][1] == pt_tail[1])
        o = at_a ? 0 : 1;
      else if (pin[v][0] == pt_head[0] && pin[v][1] == pt_head[1])
        o = at_a ? 1 : 0;
      else
        fail(name + ": vertex " + std::to_string(v) +
             " is already pinned off the annulus's tree edge");
      if (forced >= 0 && forced != o)
        fail(name + ": bordering regions pin its circles inconsistently");
      forced = o;
    }
    if (a.anchor_edge >= 0) {
      if (a.anchor_edge >= E || occ[a.anchor_edge] != 1)
        fail(name + ": anchor edge " + std::to_string(a.anchor_edge) +
             " is not one of its side edges");
      if (a.anchor_end != 0 && a.anchor_end != 1)
        fail(name + ": anchor end must be 0 (tail) or 1 (head)");
      const bool at_a = cir.find(K.edges[a.anchor_edge][0]) == root_a;
      const std::int32_t o = (a.anchor_end == 0) == at_a ? 0 : 1;
      if (forced >= 0 && forced != o)
        fail(name + ": anchor contradicts the bordering pins");
      forced = o;
    }
    const std::int32_t orient = forced >= 0 ? forced : 0;

    const std::array<double, 2>& pt_a = orient == 0 ? pt_tail : pt_head;
    const std::array<double, 2>& pt_b = orient == 0 ? pt_head : pt_tail;
    for (std::int32_t v : side_vertices)
      pin_vertex(v, cir.find(v) == root_a ? pt_a : pt_b, name);
  }

  for (std::int32_t v = 0; v < K.vertex_count; ++v)
    if (!pinned[v])
      fail("vertex " + std::to_string(v) + " lies on no face; its image is undetermined");

  std::vector<double> images(static_cast<std::size_t>(K.vertex_count) * 2);
  for (std::int32_t v = 0; v < K.vertex_count; ++v) {
    images[2 * v] = pin[v][0];
    images[2 * v + 1] = pin[v][1];
  }
  std::vector<DeckElement> decks(E, tree->deck_identity());
  return make_map(std::move(complex), std::move(tree), std::move(images),
                  std::move(decks));
}

CollapseResult collapse_zero_subcomplex(const SimplicialMap& f,
                                        const SimplicialMetric& l) {
  const DeltaComplex& K = *f.complex;
  const GeodesicTarget& T = *f.target;
  const std::int32_t V = K.vertex_count;
  const std::int32_t E = K.edge_count();
  const std::int32_t F = K.face_count();

  validate_map(f);
  for (std::int32_t fc = 0; fc < F; ++fc)
    if (K.face_arity(fc) != 3)
      fail("collapse requires a triangulation; face " + std::to_string(fc) +
           " has arity " + std::to_string(K.face_arity(fc)));
  if (!validate_metric(K, l).empty())
    fail("collapse requires a valid quasi-metric");

  const std::vector<double> L = edge_lengths(f);
  auto zero = [&](std::int32_t e) { return l.lengths[e] == 0.0; };
  for (std::int32_t e = 0; e < E; ++e)
    if (zero(e) && L[e] > 0.0)
      fail("zero edge " + std::to_string(e) + " has positive image length");

  const double energy_before = simplicial_energy(f, l);

  bool any_zero = false;
  UnionFind comp(V);
  std::vector<char> touched(V, 0);
  for (std::int32_t e = 0; e < E; ++e) {
    if (!zero(e)) continue;
    any_zero = true;
    comp.unite(K.edges[e][0], K.edges[e][1]);
    touched[K.edges[e][0]] = touched[K.edges[e][1]] = 1;
  }
  if (!any_zero) {
    CollapseResult r{f, l, std::vector<std::int32_t>(V), std::vector<std::int32_t>(E),
                     std::vector<std::int32_t>(F), energy_before, energy_before};
    std::iota(r.vertex_map.begin(), r.vertex_map.end(), 0);
    std::iota(r.edge_map.begin(), r.edge_map.end(), 0);
    std::iota(r.face_map.begin(), r.face_map.end(), 0);
    return r;
  }

  // Contractibility of each zero component: Euler characteristic 1, checked
  // from its vertices, zero edges and all-zero triangles.
  std::vector<std::int32_t> vc(V, 0), ec(V, 0), fc_count(V, 0);
  for (std::int32_t v = 0; v < V; ++v)
    if (touched[v]) ++vc[comp.find(v)];
  for (std::int32_t e = 0; e < E; ++e)
    if (zero(e)) ++ec[comp.find(K.edges[e][0])];
  for (std::int32_t fc = 0; fc < F; ++fc) {
    const auto& cy = K.faces[fc];
    if (zero(cy[0].edge) && zero(cy[1].edge) && zero(cy[2].edge))
      ++fc_count[comp.find(K.slot_start(fc, 0))];
  }
  for (std::int32_t v = 0; v < V; ++v) {
    if (!touched[v] || comp.find(v) != v) continue;
    const std::int32_t chi = vc[v] - ec[v] + fc_count[v];
    if (chi != 1)
      fail("zero subcomplex component containing vertex " + std::to_string(v) +
           " has Euler characteristic " + std::to_string(chi) +
           "; only contractible components collapse");
  }

  // Gauge potentials over each component: h[rep] = id and h[head] = h[tail]*g
  // along a spanning tree of the zero edges, so gauged zero edges carry the
  // identity. Every remaining zero edge is then the holonomy of a cycle and
  // must be the identity too, or the component is not null-homotopic.
  std::vector<std::int32_t> rep(V, -1);
  for (std::int32_t v = 0; v < V; ++v)
    if (touched[v] && rep[comp.find(v)] < 0) rep[comp.find(v)] = v;

  std::vector<std::vector<std::int32_t>> zero_at(V);
  for (std::int32_t e = 0; e < E; ++e) {
    if (!zero(e)) continue;
    zero_at[K.edges[e][0]].push_back(e);
    zero_at[K.edges[e][1]].push_back(e);
  }
  std::vector<DeckElement> h(V, T.deck_identity());
  std::vector<char> visited(V, 0);
  for (std::int32_t v = 0; v < V; ++v) {
    if (!touched[v] || rep[comp.find(v)] != v) continue;
    visited[v] = 1;
    std::vector<std::int32_t> stack{v};
    while (!stack.empty()) {
      const std::int32_t u = stack.back();
      stack.pop_back();
      for (std::int32_t e : zero_at[u]) {
        const std::int32_t tail = K.edges[e][0], head = K.edges[e][1];
        const std::int32_t other = tail == u ? head : tail;
        if (visited[other]) continue;
        visited[other] = 1;
        h[other] = other == head ? T.deck_compose(h[u], f.edge_decks[e])
                                 : T.deck_compose(h[u], T.deck_inverse(f.edge_decks[e]));
        stack.push_back(other);
      }
    }
  }
  for (std::int32_t e = 0; e < E; ++e) {
    if (!zero(e)) continue;
    const DeckElement part = T.deck_compose(h[K.edges[e][0]], f.edge_decks[e]);
    const DeckElement res = T.deck_compose(part, T.deck_inverse(h[K.edges[e][1]]));
    const double scale = std::max({mat_scale(h[K.edges[e][0]]), mat_scale(part),
                                   mat_scale(h[K.edges[e][1]]), mat_scale(res)});
    if (!composed_identity(T, res, scale, 1e-9))
      fail("zero subcomplex has nonidentity holonomy around a cycle through edge " +
           std::to_string(e));
  }

  // Face classification. Exactly one zero edge leaves a 2-gon whose parallel
  // sides get identified; the relative orientation comes from the face cycle.
  SignedUnionFind edge_cls(E);
  std::vector<char> face_survives(F, 0);
  for (std::int32_t fc = 0; fc < F; ++fc) {
    const auto& cy = K.faces[fc];
    std::int32_t zslot = -1, zcount = 0;
    for (std::int32_t k = 0; k < 3; ++k)
      if (zero(cy[k].edge)) {
        zslot = k;
        ++zcount;
      }
    if (zcount == 0) {
      face_survives[fc] = 1;
      continue;
    }
    if (zcount != 1) continue;  // all-zero triangle: dropped with its component
    const EdgeRef& p = cy[(zslot + 1) % 3];
    const EdgeRef& q = cy[(zslot + 2) % 3];
    if (!edge_cls.unite(p.edge, q.edge, -p.dir * q.dir))
      fail("collapsing face " + std::to_string(fc) +
           " identifies edge " + std::to_string(p.edge) + " with itself reversed");
  }

  // Renumber: surviving vertices are the component representatives plus
  // everything untouched; surviving edges are the class representatives
  // (smallest id) of the positive edges.
  CollapseResult out;
  out.vertex_map.assign(V, -1);
  std::vector<std::int32_t> survivors;
  for (std::int32_t v = 0; v < V; ++v)
    if (!touched[v] || rep[comp.find(v)] == v) {
      out.vertex_map[v] = static_cast<std::int32_t>(survivors.size());
      survivors.push_back(v);
    }
  for (std::int32_t v = 0; v < V; ++v)
    if (out.vertex_map[v] < 0) out.vertex_map[v] = out.vertex_map[rep[comp.find(v)]];

  out.edge_map.assign(E, -1);
  std::vector<std::array<std::int32_t, 2>> new_edges;
  std::vector<DeckElement> new_decks;
  std::vector<double> new_lengths;
  std::vector<std::int32_t> cls_new(E, -1);
  std::vector<std::int8_t> cls_sign(E, 1);
  std::vector<std::int32_t> new_to_old;
  for (std::int32_t e = 0; e < E; ++e) {
    if (zero(e)) continue;
    const auto [root, s] = edge_cls.find(e);
    if (cls_new[root] < 0) {
      cls_new[root] = static_cast<std::int32_t>(new_edges.size());
      cls_sign[root] = static_cast<std::int8_t>(s);  // rep = root^s
      const std::int32_t tail = K.edges[e][0], head = K.edges[e][1];
      new_edges.push_back({out.vertex_map[tail], out.vertex_map[head]});
      new_decks.push_back(T.deck_compose(T.deck_compose(h[tail], f.edge_decks[e]),
                                         T.deck_inverse(h[head])));
      new_lengths.push_back(l.lengths[e]);
      new_to_old.push_back(e);
    }
    out.edge_map[e] = cls_new[root];
  }

  out.face_map.assign(F, -1);
  std::vector<std::vector<EdgeRef>> new_faces;
  for (std::int32_t fc = 0; fc < F; ++fc) {
    if (!face_survives[fc]) continue;
    std::vector<EdgeRef> cy = K.faces[fc];
    for (EdgeRef& r : cy) {
      const auto [root, s] = edge_cls.find(r.edge);
      r.dir = static_cast<std::int8_t>(r.dir * s * cls_sign[root]);
      r.edge = cls_new[root];
    }
    out.face_map[fc] = static_cast<std::int32_t>(new_faces.size());
    new_faces.push_back(std::move(cy));
  }

  DeltaComplex newK;
  try {
    newK = make_complex(static_cast<std::int32_t>(survivors.size()),
                        std::move(new_edges), std::move(new_faces), K.mode);
  } catch (const std::invalid_argument& e) {
    fail(std::string("collapsed complex is invalid: ") + e.what());
  }
  if (newK.euler_characteristic() != K.euler_characteristic())
    fail("collapse would change the Euler characteristic from " +
         std::to_string(K.euler_characteristic()) + " to " +
         std::to_string(newK.euler_characteristic()));

  const int md = T.model_dim();
  std::vector<double> images(survivors.size() * md);
  for (std::size_t s = 0; s < survivors.size(); ++s)
    std::copy(f.image(survivors[s]), f.image(survivors[s]) + md, &images[s * md]);

  out.map = make_map(std::make_shared<const DeltaComplex>(std::move(newK)), f.target,
                     std::move(images), std::move(new_decks));
  out.metric = SimplicialMetric{std::move(new_lengths)};
  out.energy_before = energy_before;
  out.energy_after = simplicial_energy(out.map, out.metric);

  const std::vector<double> newL = edge_lengths(out.map);
  for (std::size_t e = 0; e < newL.size(); ++e) {
    const double old = L[new_to_old[e]];
    if (std::abs(newL[e] - old) > 1e-9 * std::max(1.0, old))
      throw std::logic_error("collapse changed the image length of edge " +
                             std::to_string(new_to_old[e]));
  }
  return out;
}

}  // namespace simharm
