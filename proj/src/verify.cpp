#include "simharm/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "simharm/targets.hpp"

namespace simharm {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Interior = every incident edge bounds exactly two face slots. Isolated
// vertices do not count.
std::vector<char> interior_mask(const DeltaComplex& K) {
  std::vector<char> interior(K.vertex_count, 1);
  for (std::int32_t v = 0; v < K.vertex_count; ++v) {
    if (K.vertex_incidences[v].empty()) {
      interior[v] = 0;
      continue;
    }
    for (const auto& [e, end] : K.vertex_incidences[v])
      if (K.edge_face_slots[e].size() != 2) {
        interior[v] = 0;
        break;
      }
  }
  return interior;
}

// Tangent directions from image(v) to each neighbor lift, one per incidence
// (loops contribute both ends), paired with the incident edge weights.
struct Star {
  std::vector<std::array<double, kMaxModelDim>> dirs;
  std::vector<double> weights;
};

Star vertex_star(const SimplicialMap& f, const std::vector<double>& w,
                 std::int32_t v) {
  const GeodesicTarget& T = *f.target;
  Star s;
  for (const auto& [e, end] : f.complex->vertex_incidences[v]) {
    std::array<double, kMaxModelDim> u{};
    const auto [a, b] = f.complex->edges[e];
    if (end == 0)
      T.edge_log(f.edge_decks[e], f.image(a), f.image(b), u.data());
    else
      T.edge_log(T.deck_inverse(f.edge_decks[e]), f.image(b), f.image(a), u.data());
    s.dirs.push_back(u);
    s.weights.push_back(w[e]);
  }
  return s;
}

double seg_distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? -(a[0] * dx + a[1] * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(a[0] + t * dx, a[1] + t * dy);
}

// Distance from the origin to the convex hull of pts; 0 inside or on the
// boundary. Monotone-chain hull, then a sign walk around the CCW cycle.
double hull_distance_2d(std::vector<std::array<double, 2>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n == 0) return 0.0;
  if (n == 1) return std::hypot(pts[0][0], pts[0][1]);

  auto turn = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                 const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<double, 2>> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);

  if (h.size() == 1) return std::hypot(h[0][0], h[0][1]);
  if (h.size() == 2) return seg_distance(h[0], h[1]);

  bool inside = true;
  for (std::size_t i = 0; i < h.size() && inside; ++i) {
    const auto& a = h[i];
    const auto& b = h[(i + 1) % h.size()];
    if ((b[0] - a[0]) * (-a[1]) - (b[1] - a[1]) * (-a[0]) < 0.0) inside = false;
  }
  if (inside) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size(); ++i)
    d = std::min(d, seg_distance(h[i], h[(i + 1) % h.size()]));
  return d;
}

double hull_distance_1d(const Star& s) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& u : s.dirs) {
    lo = std::min(lo, u[0]);
    hi = std::max(hi, u[0]);
  }
  if (lo <= 0.0 && hi >= 0.0) return 0.0;
  return lo > 0.0 ? lo : -hi;
}

// Star directions in orthonormal tangent coordinates (2d targets).
std::vector<std::array<double, 2>> star_plane(const SimplicialMap& f,
                                              const Star& s, std::int32_t v) {
  const GeodesicTarget& T = *f.target;
  std::vector<std::array<double, 2>> pts;
  pts.reserve(s.dirs.size());
  if (T.model_dim() == 2) {
    for (const auto& u : s.dirs) pts.push_back({u[0], u[1]});
    return pts;
  }
  std::array<double, 2 * kMaxModelDim> frame{};
  T.tangent_frame(f.image(v), frame.data());
  const double* e1 = frame.data();
  const double* e2 = frame.data() + T.model_dim();
  for (const auto& u : s.dirs)
    pts.push_back({T.tangent_dot(f.image(v), u.data(), e1),
                   T.tangent_dot(f.image(v), u.data(), e2)});
  return pts;
}

double det3(const double* a, const double* b, const double* c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace

CheckResult check_E_ge_A(const SimplicialMap& f, const SimplicialMetric& l,
                         double tol) {
  validate_map(f);
  CheckResult r;
  r.name = "energy-dominates-area";
  r.pass = true;

  const double E = simplicial_energy(f, l);
  const double A = simplicial_area_of_map(f);
  const ConformalReport c = is_conformal(f, l, tol);
  if (E == kInfinite) {
    r.pass = !c.conformal;
    r.note = "infinite energy: zero-length edge with positive image length";
    return r;
  }

  r.residual = std::max(0.0, A - E);
  if (r.residual > tol) r.pass = false;
  const bool equal = std::abs(E - A) <= tol;
  if (equal != c.conformal) {
    r.pass = false;
    r.note = "equality and conformality disagree";
  }

  // Witness: the face with the largest corner gap (1/2)(sa - sb)^2 la lb.
  const DeltaComplex& K = *f.complex;
  const StretchProfile sp = stretch_factors(f, l);
  double worst = -1.0;
  for (std::int32_t fc = 0; fc < K.face_count(); ++fc) {
    double gap = 0.0;
    const auto [b, e] = K.face_corner_range[fc];
    for (std::int32_t k = b; k < e; ++k) {
      const double la = l.lengths[K.corner_ea[k]], lb = l.lengths[K.corner_eb[k]];
      const double ds = sp.sigma[K.corner_ea[k]] - sp.sigma[K.corner_eb[k]];
      gap += 0.5 * ds * ds * la * lb;
    }
    if (gap > worst) {
      worst = gap;
      r.witness = fc;
    }
  }
  return r;
}

CheckResult check_mean_value(const SimplicialMap& f, const SimplicialMetric& l,
                             double tol) {
  validate_map(f);
  const GeodesicTarget& T = *f.target;
  if (!T.supports_flow() || T.curvature_upper_bound() != 0.0)
    fail("mean value needs a flat target");

  const std::vector<double> w = edge_weights(*f.complex, l);
  const std::vector<char> interior = interior_mask(*f.complex);
  CheckResult r;
  r.name = "mean-value";
  r.pass = true;

  bool any = false;
  for (std::int32_t v = 0; v < f.complex->vertex_count; ++v) {
    if (!interior[v]) continue;
    const Star s = vertex_star(f, w, v);
    if (s.dirs.empty()) continue;
    any = true;
    double S = 0.0;
    std::array<double, kMaxModelDim> m{};
    for (std::size_t j = 0; j < s.dirs.size(); ++j) {
      S += s.weights[j];
      for (int d = 0; d < T.model_dim(); ++d) m[d] += s.weights[j] * s.dirs[j][d];
    }
    const double res = T.tangent_norm(f.image(v), m.data()) / S;
    if (r.witness < 0 || res > r.residual) {
      r.residual = res;
      r.witness = v;
    }
  }
  if (!any) r.note = "no interior vertices: vacuous";
  r.pass = r.residual <= tol;
  return r;
}

CheckResult check_convex_hull(const SimplicialMap& f, const SimplicialMetric& l,
                              double tol) {
  validate_map(f);
  const GeodesicTarget& T = *f.target;
  if (!T.supports_flow() || T.dim() > 2)
    fail("convex hull check handles 1- and 2-dimensional targets");

  // The lemma's premise is a positive metric (positive weights); computing
  // them validates that even though the hull itself is metric-free.
  const std::vector<double> w = edge_weights(*f.complex, l);
  const std::vector<char> interior = interior_mask(*f.complex);
  CheckResult r;
  r.name = "convex-hull";
  r.pass = true;

  bool any = false;
  for (std::int32_t v = 0; v < f.complex->vertex_count; ++v) {
    if (!interior[v]) continue;
    const Star s = vertex_star(f, w, v);
    if (s.dirs.empty()) continue;
    any = true;
    const double res = T.dim() == 1 ? hull_distance_1d(s)
                                    : hull_distance_2d(star_plane(f, s, v));
    if (r.witness < 0 || res > r.residual) {
      r.residual = res;
      r.witness = v;
    }
  }
  if (!any) r.note = "no interior vertices: vacuous";
  r.pass = r.residual <= tol;
  return r;
}

CheckResult check_max_principle(const SimplicialMap& f, const SimplicialMetric& l,
                                const std::vector<std::int32_t>& subcomplex_faces,
                                double tol) {
  validate_map(f);
  const GeodesicTarget& T = *f.target;
  if (T.kind() != TargetKind::Euclidean || T.dim() != 1)
    fail("max principle check needs a euclidean(1) target");
  edge_weights(*f.complex, l);  // the lemma's premise: a positive metric

  const DeltaComplex& K = *f.complex;
  std::vector<char> in_E(K.face_count(), 0);
  for (std::int32_t fc : subcomplex_faces) {
    if (fc < 0 || fc >= K.face_count()) fail("subcomplex face id out of range");
    in_E[fc] = 1;
  }

  std::vector<char> in_V(K.vertex_count, 0), interior(K.vertex_count, 0);
  for (std::int32_t fc = 0; fc < K.face_count(); ++fc) {
    if (!in_E[fc]) continue;
    for (std::int32_t k = 0; k < K.face_arity(fc); ++k) in_V[K.slot_start(fc, k)] = 1;
  }
  for (std::int32_t v = 0; v < K.vertex_count; ++v) {
    if (!in_V[v]) continue;
    bool inner = true;
    for (const auto& [e, end] : K.vertex_incidences[v]) {
      const auto& slots = K.edge_face_slots[e];
      if (slots.size() != 2 || !in_E[slots[0].first] || !in_E[slots[1].first]) {
        inner = false;
        break;
      }
    }
    interior[v] = inner;
  }

  CheckResult r;
  r.name = "max-principle";
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::int32_t v = 0; v < K.vertex_count; ++v)
    if (in_V[v]) {
      lo = std::min(lo, f.image(v)[0]);
      hi = std::max(hi, f.image(v)[0]);
    }
  if (!(hi - lo > tol)) {
    r.pass = true;
    r.note = "constant values: principle vacuous";
    return r;
  }

  double bhi = -std::numeric_limits<double>::infinity(), blo = -bhi;
  bool have_boundary = false;
  for (std::int32_t v = 0; v < K.vertex_count; ++v)
    if (in_V[v] && !interior[v]) {
      have_boundary = true;
      blo = std::min(blo, f.image(v)[0]);
      bhi = std::max(bhi, f.image(v)[0]);
    }
  if (!have_boundary) {
    r.pass = false;
    r.note = "subcomplex has no boundary vertices";
    return r;
  }

  std::int32_t ties = 0;
  for (std::int32_t v = 0; v < K.vertex_count; ++v) {
    if (!interior[v]) continue;
    const double x = f.image(v)[0];
    const double viol = std::max(x - bhi, blo - x);
    if (viol > r.residual) {
      r.residual = viol;
      r.witness = v;
    }
    if (viol > -tol) ++ties;
  }
  r.pass = r.residual <= tol;
  if (ties > 0)
    r.note = std::to_string(ties) + " interior value(s) tie the boundary range";
  return r;
}

CheckResult check_area_bound(const SimplicialMap& f, double a, double tol) {
  validate_map(f);
  if (a < 0.0) fail("curvature bound a must be nonnegative");
  if (a > -f.target->curvature_upper_bound())
    fail("target curvature does not reach -a");

  CheckResult r;
  r.name = "area-bound";
  r.pass = true;
  const double area = riemannian_area(f);

  if (a > 0.0) {
    const double chi = std::abs(f.complex->euler_characteristic());
    const double bound = 2.0 * std::numbers::pi * chi / a;
    r.residual = std::max(0.0, area - bound);
  } else {
    r.note = "a = 0: curvature area bound vacuous";
  }

  bool all_quads = true;
  for (std::int32_t fc = 0; fc < f.complex->face_count(); ++fc)
    if (f.complex->face_arity(fc) != 4) {
      all_quads = false;
      break;
    }
  if (all_quads && f.complex->face_count() > 0) {
    // Metric-free quad bound: area <= A_S/2, hence <= E_S(f,l)/2 for every l.
    const double gap = std::max(0.0, area - simplicial_area_of_map(f) / 2.0);
    r.residual = std::max(r.residual, gap);
  } else if (a == 0.0) {
    r.note += "; not a quad complex, nothing to check";
  }
  r.pass = r.residual <= tol;
  return r;
}

CheckResult check_vertex_angle_sums(const SimplicialMap& f, AngleMode mode,
                                    double tol) {
  validate_map(f);
  const std::vector<double> angles = corner_angles(f);
  const DeltaComplex& K = *f.complex;
  const std::vector<char> interior = interior_mask(K);

  std::vector<double> sums(K.vertex_count, 0.0);
  std::vector<char> degenerate(K.vertex_count, 0);
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const std::int32_t v = K.corner_vertex[k];
    if (!interior[v]) continue;
    if (std::isnan(angles[k]))
      degenerate[v] = 1;
    else
      sums[v] += angles[k];
  }

  CheckResult r;
  r.name = "vertex-angle-sums";
  std::int32_t bad = 0;
  bool any = false;
  for (std::int32_t v = 0; v < K.vertex_count; ++v) {
    if (!interior[v]) continue;
    any = true;
    if (degenerate[v]) {
      ++bad;
      if (r.witness < 0) r.witness = v;
      continue;
    }
    const double dev = mode == AngleMode::Immersion
                           ? std::max(0.0, 2.0 * std::numbers::pi - sums[v])
                           : std::abs(sums[v] - 2.0 * std::numbers::pi);
    if (dev > r.residual) {
      r.residual = dev;
      if (bad == 0) r.witness = v;
    }
  }
  if (!any) {
    r.pass = true;
    r.note = "no interior vertices: vacuous";
    return r;
  }
  if (bad > 0) {
    r.pass = false;
    r.note = std::to_string(bad) + " vertex/vertices with degenerate corners";
    return r;
  }
  r.pass = r.residual <= tol;
  return r;
}

CheckResult check_embedding(const SimplicialMap& f, double tol) {
  validate_map(f);
  const GeodesicTarget& T = *f.target;
  if (!T.supports_flow() || T.dim() != 2)
    fail("embedding check needs a 2-dimensional target");
  const DeltaComplex& K = *f.complex;
  const int md = T.model_dim();

  CheckResult r;
  r.name = "embedding";
  std::int32_t violations = 0;
  auto report = [&](const std::string& what, std::int32_t id) {
    ++violations;
    if (r.witness < 0) r.witness = id;
    if (r.note.find(what) == std::string::npos) {
      if (!r.note.empty()) r.note += "; ";
      r.note += what + " (first at id " + std::to_string(id) + ")";
    }
  };

  const std::vector<double> L = edge_lengths(f);
  for (std::int32_t e = 0; e < K.edge_count(); ++e)
    if (L[e] == 0.0) report("collapsed image edge", e);

  double ref = 0.0;
  std::array<double, kMaxModelDim> u{}, v{};
  for (std::int32_t fc = 0; fc < K.face_count(); ++fc) {
    const std::vector<double> lifts = face_lifts(f, fc);
    const std::int32_t m = K.face_arity(fc);
    for (std::int32_t k = 1; k + 1 < m; ++k) {
      T.log_map(lifts.data(), &lifts[static_cast<std::size_t>(k) * md], u.data());
      T.log_map(lifts.data(), &lifts[static_cast<std::size_t>(k + 1) * md], v.data());
      const double det = md == 2 ? u[0] * v[1] - u[1] * v[0]
                                 : det3(lifts.data(), u.data(), v.data());
      if (det == 0.0) {
        report("degenerate face triangle", fc);
        continue;
      }
      if (ref == 0.0) {
        ref = det;
      } else if ((det > 0.0) != (ref > 0.0)) {
        report("inconsistent face orientation", fc);
      }
    }
  }

  const CheckResult sums = check_vertex_angle_sums(f, AngleMode::Embedding, tol);
  if (!sums.pass) report("vertex angle sums off 2 pi", std::max(sums.witness, 0));

  // Null homotopic candidates: loops and two-edge loops with identity decks.
  constexpr double kDeckTol = 1e-6;
  std::map<std::pair<std::int32_t, std::int32_t>, std::vector<std::int32_t>> pairs;
  std::map<std::int32_t, std::vector<std::int32_t>> loops;
  for (std::int32_t e = 0; e < K.edge_count(); ++e) {
    const auto [a, b] = K.edges[e];
    if (a == b) {
      if (T.deck_is_identity(f.edge_decks[e], kDeckTol))
        report("identity deck on edge loop", e);
      loops[a].push_back(e);
    } else {
      pairs[{std::min(a, b), std::max(a, b)}].push_back(e);
    }
  }
  for (const auto& [ends, group] : pairs)
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        // Orient both edges from ends.first; the loop composes one with the
        // other's inverse.
        DeckElement gi = f.edge_decks[group[i]];
        if (K.edges[group[i]][0] != ends.first) gi = T.deck_inverse(gi);
        DeckElement gj = f.edge_decks[group[j]];
        if (K.edges[group[j]][0] != ends.first) gj = T.deck_inverse(gj);
        if (T.deck_is_identity(T.deck_compose(gi, T.deck_inverse(gj)), kDeckTol))
          report("identity deck on two-edge loop", group[i]);
      }
  for (const auto& [at, group] : loops)
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const DeckElement& gi = f.edge_decks[group[i]];
        const DeckElement& gj = f.edge_decks[group[j]];
        if (T.deck_is_identity(T.deck_compose(gi, gj), kDeckTol) ||
            T.deck_is_identity(T.deck_compose(gi, T.deck_inverse(gj)), kDeckTol))
          report("identity deck on two-edge loop", group[i]);
      }

  r.residual = violations;
  r.pass = violations == 0;
  return r;
}

namespace {

ComplexPtr wheel(std::int32_t n) {
  std::vector<std::array<std::int32_t, 2>> edges;
  for (std::int32_t k = 0; k < n; ++k) edges.push_back({0, k + 1});
  for (std::int32_t k = 0; k < n; ++k) edges.push_back({k + 1, (k + 1) % n + 1});
  std::vector<std::vector<EdgeRef>> faces;
  for (std::int32_t k = 0; k < n; ++k)
    faces.push_back({{k, +1}, {n + k, +1}, {(k + 1) % n, -1}});
  return std::make_shared<const DeltaComplex>(make_complex(n + 1, edges, faces));
}

// cot of the angle opposite side a in the triangle (a, b, c).
double cot_opposite(double a, double b, double c) {
  const double cosv = (b * b + c * c - a * a) / (2.0 * b * c);
  const double sinv = std::sqrt(std::max(0.0, 1.0 - cosv * cosv));
  return cosv / sinv;
}

}  // namespace

WeightReport compare_weights(std::int32_t count, std::uint64_t seed, double tol) {
  if (count < 0) fail("instance count must be nonnegative");
  WeightReport rep;
  Rng rng(seed);
  TargetPtr T = GeodesicTarget::euclidean(2);

  for (std::int32_t k = 0; k < count; ++k) {
    ++rep.instances;
    const std::int32_t n = 4 + static_cast<std::int32_t>(rng.index(4));
    ComplexPtr K = wheel(n);

    std::vector<double> rim(2 * static_cast<std::size_t>(n));
    for (std::int32_t j = 0; j < n; ++j) {
      const double ang =
          2.0 * std::numbers::pi * j / n + rng.uniform(-0.35, 0.35);
      const double rad = rng.uniform(0.7, 1.5);
      rim[2 * j] = rad * std::cos(ang);
      rim[2 * j + 1] = rad * std::sin(ang);
    }

    // Alternating long and short spokes breed obtuse rim corners, which is
    // where the cotangent weights go negative.
    SimplicialMetric l;
    l.lengths.resize(2 * static_cast<std::size_t>(n));
    for (std::int32_t j = 0; j < n; ++j)
      l.lengths[j] = j % 2 == 0 ? rng.uniform(1.4, 1.9) : rng.uniform(0.8, 1.1);
    for (std::int32_t j = 0; j < n; ++j) {
      const double s1 = l.lengths[j], s2 = l.lengths[(j + 1) % n];
      const double lo = std::abs(s1 - s2) * 1.05 + 0.05;
      const double hi = (s1 + s2) * 0.95;
      // Cubic bias toward the short end: the flatter the triangle, the more
      // obtuse the corner opposite the long spoke and the more negative its
      // cotangent.
      const double u = rng.unit();
      l.lengths[n + j] = lo + (hi - lo) * u * u * u;
    }
    if (k % 50 == 49) l.lengths[n] = l.lengths[0] + l.lengths[1];

    bool degenerate = false;
    for (std::int32_t j = 0; j < n && !degenerate; ++j)
      if (heron_area(l.lengths[j], l.lengths[n + j], l.lengths[(j + 1) % n]) == 0.0)
        degenerate = true;
    if (degenerate) {
      ++rep.skipped;
      continue;
    }

    const std::vector<double> ws = edge_weights(*K, l);
    // Cotangent weight of spoke j: the opposite angles live at the two rim
    // ends of the adjacent triangles (j-1, j).
    std::vector<double> wc(n);
    for (std::int32_t j = 0; j < n; ++j) {
      const std::int32_t prev = (j + n - 1) % n;
      const double c1 =
          cot_opposite(l.lengths[j], l.lengths[n + prev], l.lengths[prev]);
      const double c2 =
          cot_opposite(l.lengths[j], l.lengths[n + j], l.lengths[(j + 1) % n]);
      wc[j] = (c1 + c2) / 4.0;
    }

    auto solve = [&](auto weight_of) -> std::optional<std::array<double, 2>> {
      double S = 0.0, bx = 0.0, by = 0.0;
      double scale = 0.0;
      for (std::int32_t j = 0; j < n; ++j) {
        const double w = weight_of(j);
        S += w;
        bx += w * rim[2 * j];
        by += w * rim[2 * j + 1];
        scale += std::abs(w);
      }
      if (!(std::abs(S) > 1e-12 * scale)) return std::nullopt;
      return std::array<double, 2>{bx / S, by / S};
    };
    const auto hub_s = solve([&](std::int32_t j) { return ws[j]; });
    const auto hub_c = solve([&](std::int32_t j) { return wc[j]; });
    if (!hub_s || !hub_c) {
      ++rep.skipped;
      continue;
    }

    auto violates = [&](const std::array<double, 2>& hub) {
      std::vector<std::array<double, 2>> pts;
      for (std::int32_t j = 0; j < n; ++j)
        pts.push_back({rim[2 * j] - hub[0], rim[2 * j + 1] - hub[1]});
      return hull_distance_2d(std::move(pts)) > tol;
    };
    if (violates(*hub_s)) ++rep.simplicial_violations;
    if (violates(*hub_c)) {
      ++rep.cotangent_violations;
      if (rep.first_cotangent_witness < 0) {
        rep.first_cotangent_witness = k;
        DirichletInstance inst;
        inst.complex = K;
        inst.target = T;
        inst.metric = l;
        for (std::int32_t j = 1; j <= n; ++j) inst.boundary.push_back(j);
        inst.boundary_images = rim;
        rep.witness = std::move(inst);
      }
    }
  }
  return rep;
}

}  // namespace simharm
