#include "simharm/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "simharm/kernels.hpp"

namespace simharm {

std::vector<MetricViolation> validate_metric(const DeltaComplex& K,
                                             const SimplicialMetric& l) {
  std::vector<MetricViolation> out;
  const std::int32_t E = K.edge_count();
  if (static_cast<std::int32_t>(l.lengths.size()) != E) {
    out.push_back({-1, -1, static_cast<double>(l.lengths.size())});
    return out;
  }
  for (std::int32_t e = 0; e < E; ++e) {
    const double v = l.lengths[e];
    if (!(v >= 0.0) || !std::isfinite(v)) out.push_back({-1, e, v});
  }
  if (!out.empty()) return out;
  for (std::int32_t f = 0; f < K.face_count(); ++f) {
    const auto& cycle = K.faces[f];
    double total = 0.0;
    for (const EdgeRef& r : cycle) total += l.lengths[r.edge];
    for (std::int32_t k = 0; k < static_cast<std::int32_t>(cycle.size()); ++k) {
      const double lk = l.lengths[cycle[k].edge];
      const double others = total - lk;
      if (lk > others) out.push_back({f, k, lk - others});
    }
  }
  return out;
}

bool metric_valid(const DeltaComplex& K, const SimplicialMetric& l) {
  return validate_metric(K, l).empty();
}

bool metric_positive(const DeltaComplex& K, const SimplicialMetric& l) {
  if (!metric_valid(K, l)) return false;
  for (double v : l.lengths)
    if (v <= 0.0) return false;
  return true;
}

double simplicial_area(const DeltaComplex& K, const SimplicialMetric& l) {
  return kernels::corner_product_sum(l.lengths.data(), K.corner_ea.data(),
                                     K.corner_eb.data(), K.corner_ea.size());
}

double face_simplicial_area(const DeltaComplex& K, const SimplicialMetric& l,
                            std::int32_t f) {
  const auto [begin, end] = K.face_corner_range[f];
  return kernels::corner_product_sum_scalar(l.lengths.data(), K.corner_ea.data() + begin,
                                            K.corner_eb.data() + begin,
                                            static_cast<std::size_t>(end - begin));
}

namespace {

// Per-edge sum over the edge's face slots of the two in-face neighbor lengths.
std::vector<double> neighbor_length_sums(const DeltaComplex& K, const SimplicialMetric& l) {
  if (l.lengths.size() != static_cast<std::size_t>(K.edge_count()))
    throw std::invalid_argument("edge_weights: length array does not match edge count");
  std::vector<double> sums(K.edge_count(), 0.0);
  for (std::int32_t f = 0; f < K.face_count(); ++f) {
    const auto& cycle = K.faces[f];
    const std::int32_t m = static_cast<std::int32_t>(cycle.size());
    for (std::int32_t k = 0; k < m; ++k) {
      const double prev = l.lengths[cycle[(k + m - 1) % m].edge];
      const double next = l.lengths[cycle[(k + 1) % m].edge];
      sums[cycle[k].edge] += prev + next;
    }
  }
  return sums;
}

}  // namespace

std::vector<double> edge_weights(const DeltaComplex& K, const SimplicialMetric& l) {
  std::vector<double> w = neighbor_length_sums(K, l);
  for (std::int32_t e = 0; e < K.edge_count(); ++e) {
    if (l.lengths[e] <= 0.0)
      throw std::invalid_argument("edge_weights: edge " + std::to_string(e) +
                                  " has zero length, weight undefined");
    w[e] /= 2.0 * l.lengths[e];
  }
  return w;
}

std::vector<double> edge_weights_quasi(const DeltaComplex& K, const SimplicialMetric& l) {
  std::vector<double> w = neighbor_length_sums(K, l);
  for (std::int32_t e = 0; e < K.edge_count(); ++e)
    w[e] = l.lengths[e] > 0.0 ? w[e] / (2.0 * l.lengths[e]) : 0.0;
  return w;
}

double heron_area(double a, double b, double c) {
  if (a < b) std::swap(a, b);
  if (a < c) std::swap(a, c);
  if (b < c) std::swap(b, c);
  // a >= b >= c; Kahan's ordering keeps the radicand stable near degeneracy.
  const double r = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  if (r <= 0.0) return 0.0;
  return 0.25 * std::sqrt(r);
}

SubdivisionResult conformal_subdivide(const DeltaComplex& K, const SimplicialMetric& l) {
  if (!metric_valid(K, l))
    throw std::invalid_argument("conformal_subdivide: metric violates the polygon inequality");
  for (std::int32_t f = 0; f < K.face_count(); ++f) {
    const std::int32_t m = K.face_arity(f);
    if (m != 3 && m != 4)
      throw std::invalid_argument("conformal_subdivide: face " + std::to_string(f) +
                                  " has arity " + std::to_string(m) +
                                  "; only triangles and quads subdivide conformally");
  }

  const std::int32_t V = K.vertex_count, E = K.edge_count(), F = K.face_count();
  SubdivisionResult R;
  R.edge_midpoint.resize(E);
  R.edge_halves.resize(E);
  R.quad_center.assign(F, -1);
  R.face_children.resize(F);

  std::int32_t quads = 0;
  for (std::int32_t f = 0; f < F; ++f)
    if (K.face_arity(f) == 4) R.quad_center[f] = V + E + quads++;
  const std::int32_t V2 = V + E + quads;

  std::vector<std::array<std::int32_t, 2>> edges2;
  std::vector<double> len2;
  edges2.reserve(2 * E + 4 * F);
  len2.reserve(2 * E + 4 * F);
  for (std::int32_t e = 0; e < E; ++e) {
    const std::int32_t mid = V + e;
    R.edge_midpoint[e] = mid;
    R.edge_halves[e] = {2 * e, 2 * e + 1};
    edges2.push_back({K.edges[e][0], mid});
    edges2.push_back({mid, K.edges[e][1]});
    len2.push_back(l.lengths[e] * 0.5);
    len2.push_back(l.lengths[e] * 0.5);
  }

  // Oriented half-edge covering slot k's first or second half in traversal
  // order: v_k -> m_k, respectively m_k -> v_{k+1}.
  const auto first_half = [&](std::int32_t f, std::int32_t k) -> EdgeRef {
    const EdgeRef& r = K.faces[f][k];
    return r.dir > 0 ? EdgeRef{2 * r.edge, +1} : EdgeRef{2 * r.edge + 1, -1};
  };
  const auto second_half = [&](std::int32_t f, std::int32_t k) -> EdgeRef {
    const EdgeRef& r = K.faces[f][k];
    return r.dir > 0 ? EdgeRef{2 * r.edge + 1, +1} : EdgeRef{2 * r.edge, -1};
  };

  std::vector<std::vector<EdgeRef>> faces2;
  faces2.reserve(4 * F);

  for (std::int32_t f = 0; f < F; ++f) {
    const std::int32_t m = K.face_arity(f);
    const auto slot_len = [&](std::int32_t k) {
      return l.lengths[K.faces[f][((k % m) + m) % m].edge];
    };
    const auto midpoint = [&](std::int32_t k) {
      return R.edge_midpoint[K.faces[f][((k % m) + m) % m].edge];
    };
    if (m == 3) {
      // Cross edge of corner child k joins m_k to m_{k-1} and is parallel to
      // slot k+1, so it inherits half that slot's length.
      std::array<std::int32_t, 3> cross{};
      for (std::int32_t k = 0; k < 3; ++k) {
        cross[k] = static_cast<std::int32_t>(edges2.size());
        edges2.push_back({midpoint(k), midpoint(k + 2)});
        len2.push_back(slot_len(k + 1) * 0.5);
        R.interior_edges.push_back({cross[k], f, k, (k + 2) % 3});
      }
      for (std::int32_t k = 0; k < 3; ++k) {
        faces2.push_back({first_half(f, k), EdgeRef{cross[k], +1},
                          second_half(f, (k + 2) % 3)});
        R.face_children[f].push_back(static_cast<std::int32_t>(faces2.size()) - 1);
      }
      faces2.push_back({EdgeRef{cross[1], -1}, EdgeRef{cross[2], -1}, EdgeRef{cross[0], -1}});
      R.face_children[f].push_back(static_cast<std::int32_t>(faces2.size()) - 1);
    } else {
      // Cut k joins m_k to the center; both cuts of an axis share one length,
      // a quarter of the sum of the two slots the axis does not touch.
      const std::int32_t z = R.quad_center[f];
      std::array<std::int32_t, 4> cut{};
      for (std::int32_t k = 0; k < 4; ++k) {
        cut[k] = static_cast<std::int32_t>(edges2.size());
        edges2.push_back({midpoint(k), z});
        len2.push_back((slot_len(k + 1) + slot_len(k + 3)) * 0.25);
        R.interior_edges.push_back({cut[k], f, k, -1});
      }
      for (std::int32_t k = 0; k < 4; ++k) {
        faces2.push_back({first_half(f, k), EdgeRef{cut[k], +1},
                          EdgeRef{cut[(k + 3) % 4], -1}, second_half(f, (k + 3) % 4)});
        R.face_children[f].push_back(static_cast<std::int32_t>(faces2.size()) - 1);
      }
    }
  }

  R.complex = make_complex(V2, std::move(edges2), std::move(faces2), K.mode);
  R.metric.lengths = std::move(len2);
  return R;
}

}  // namespace simharm
