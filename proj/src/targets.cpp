#include "simharm/targets.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace simharm {
namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// ---- Minkowski helpers (signature -,+,...,+; x0 is the timelike coordinate) ----

double mink(const double* p, const double* q, int md) {
  double s = -p[0] * q[0];
  for (int i = 1; i < md; ++i) s += p[i] * q[i];
  return s;
}

// d(p,q) = arcosh(-<p,q>), computed through u = -<p,q> - 1 = <p-q,p-q>/2 >= 0.
// The difference form keeps full relative precision for short distances and
// returns exactly 0 for coordinate-identical points.
double hyp_distance(const double* p, const double* q, int md) {
  double d2 = 0.0;
  for (int i = 0; i < md; ++i) {
    const double di = p[i] - q[i];
    d2 += (i == 0 ? -1.0 : 1.0) * di * di;
  }
  double u = 0.5 * d2;
  if (u < 0.0) u = 0.0;
  return std::log1p(u + std::sqrt(u * (u + 2.0)));
}

void hyp_project_point(double* p, int md) {
  double s = -mink(p, p, md);
  if (!(s > 0.0)) fail("hyperboloid projection needs a timelike vector");
  double inv = 1.0 / std::sqrt(s);
  if (p[0] < 0.0) inv = -inv;
  for (int i = 0; i < md; ++i) p[i] *= inv;
}

void hyp_project_tangent(const double* p, double* v, int md) {
  // Tangent space at p is the Minkowski orthogonal complement; <p,p> = -1.
  double c = mink(p, v, md);
  for (int i = 0; i < md; ++i) v[i] += c * p[i];
}

void hyp_log(const double* p, const double* q, double* out, int md) {
  double d = hyp_distance(p, q, md);
  // w = q + <p,q> p is tangent at p and points toward q with |w| = sinh d.
  double c = mink(p, q, md);
  double w2 = 0.0;
  for (int i = 0; i < md; ++i) {
    out[i] = q[i] + c * p[i];
    w2 += (i == 0 ? -1.0 : 1.0) * out[i] * out[i];
  }
  double wn = std::sqrt(std::max(w2, 0.0));
  double scale = wn > 0.0 ? d / wn : 0.0;
  for (int i = 0; i < md; ++i) out[i] *= scale;
}

void hyp_exp(const double* p, const double* v, double* out, int md) {
  double n2 = mink(v, v, md);
  double n = std::sqrt(std::max(n2, 0.0));
  if (n == 0.0) {
    std::copy(p, p + md, out);
    return;
  }
  double ch = std::cosh(n), sh = std::sinh(n) / n;
  for (int i = 0; i < md; ++i) out[i] = ch * p[i] + sh * v[i];
  hyp_project_point(out, md);
}

void hyp_geodesic(const double* p, const double* q, double t, double* out, int md) {
  double d = hyp_distance(p, q, md);
  if (d == 0.0) {
    std::copy(p, p + md, out);
    return;
  }
  double sd = std::sinh(d);
  double cp = std::sinh((1.0 - t) * d) / sd;
  double cq = std::sinh(t * d) / sd;
  for (int i = 0; i < md; ++i) out[i] = cp * p[i] + cq * q[i];
  hyp_project_point(out, md);
}

// Orthonormal tangent frame at p, rows of `frame`, via Gram-Schmidt against
// the ambient basis vectors (skipping e0, which is never tangent-dominant).
void hyp_frame(const double* p, double* frame, int md) {
  int rows = md - 1;
  std::vector<double> cand(md);
  int filled = 0;
  for (int k = 1; k < md && filled < rows; ++k) {
    std::fill(cand.begin(), cand.end(), 0.0);
    cand[k] = 1.0;
    hyp_project_tangent(p, cand.data(), md);
    for (int r = 0; r < filled; ++r) {
      const double* fr = frame + r * md;
      double c = mink(fr, cand.data(), md);
      for (int i = 0; i < md; ++i) cand[i] -= c * fr[i];
    }
    double n2 = mink(cand.data(), cand.data(), md);
    if (n2 < 1e-20) continue;
    double inv = 1.0 / std::sqrt(n2);
    double* fr = frame + filled * md;
    for (int i = 0; i < md; ++i) fr[i] = cand[i] * inv;
    ++filled;
  }
  if (filled != rows) fail("degenerate tangent frame");
}

// ---- genus-2 octagon construction ----
//
// The construction runs in long double: the relator multiplies 8 matrices
// with entries up to cosh(2R) ~ 67, which amplifies per-generator rounding by
// about four orders of magnitude. Building the generators at 80-bit precision
// and rounding once keeps the double-precision relator residual near 1e-13.

using ld = long double;

struct M3L {
  std::array<ld, 9> a{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

M3L mulL(const M3L& x, const M3L& y) {
  M3L r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      ld s = 0;
      for (int k = 0; k < 3; ++k) s += x.a[3 * i + k] * y.a[3 * k + j];
      r.a[3 * i + j] = s;
    }
  return r;
}

M3L minkinvL(const M3L& m) {
  M3L r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      ld s = (i == 0 ? -1.0L : 1.0L) * (j == 0 ? -1.0L : 1.0L);
      r.a[3 * i + j] = s * m.a[3 * j + i];
    }
  return r;
}

void applyL(const M3L& m, const ld* x, ld* out) {
  for (int i = 0; i < 3; ++i)
    out[i] = m.a[3 * i] * x[0] + m.a[3 * i + 1] * x[1] + m.a[3 * i + 2] * x[2];
}

ld det3L(const M3L& m) {
  const auto& a = m.a;
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

ld minkL(const ld* p, const ld* q) { return -p[0] * q[0] + p[1] * q[1] + p[2] * q[2]; }

// Unnormalized tangent at P toward Q: Q + <P,Q> P.
void towardL(const ld* P, const ld* Q, ld* out) {
  ld c = minkL(P, Q);
  for (int i = 0; i < 3; ++i) out[i] = Q[i] + c * P[i];
}

// Minkowski-orthonormal frame [P | u | w]: u is the unit tangent at P toward
// Q, w completes it with positive orientation (det +1). Mapping one such
// frame onto another transports the segment PQ isometrically.
M3L segment_frameL(const ld* P, const ld* Q) {
  std::array<ld, 3> u{}, w{};
  towardL(P, Q, u.data());
  ld n2 = minkL(u.data(), u.data());
  if (n2 < 1e-24L) fail("octagon frame: coincident points");
  ld inv = 1.0L / std::sqrt(n2);
  for (ld& x : u) x *= inv;
  // Complete the frame from the best-conditioned ambient direction.
  ld best = -1;
  for (int k = 1; k < 3; ++k) {
    std::array<ld, 3> c{};
    c[k] = 1;
    ld cp = minkL(P, c.data());
    for (int i = 0; i < 3; ++i) c[i] += cp * P[i];
    ld cu = minkL(u.data(), c.data());
    for (int i = 0; i < 3; ++i) c[i] -= cu * u[i];
    ld m2 = minkL(c.data(), c.data());
    if (m2 > best) {
      best = m2;
      w = c;
    }
  }
  if (best < 1e-20L) fail("octagon frame: degenerate completion");
  ld wi = 1.0L / std::sqrt(best);
  for (ld& x : w) x *= wi;
  M3L f;
  for (int i = 0; i < 3; ++i) {
    f.a[3 * i + 0] = P[i];
    f.a[3 * i + 1] = u[i];
    f.a[3 * i + 2] = w[i];
  }
  if (det3L(f) < 0)
    for (int i = 0; i < 3; ++i) f.a[3 * i + 2] = -f.a[3 * i + 2];
  return f;
}

int letter_index(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': return 0;
    case 'b': return 1;
    case 'c': return 2;
    case 'd': return 3;
    default: return -1;
  }
}

bool letters_cancel(char x, char y) {
  return x != y && std::tolower(static_cast<unsigned char>(x)) ==
                       std::tolower(static_cast<unsigned char>(y));
}

std::string reduce_word(const std::string& w) {
  std::string out;
  out.reserve(w.size());
  for (char c : w) {
    if (letter_index(c) < 0) fail("deck word has letters outside a..d, A..D");
    if (!out.empty() && letters_cancel(out.back(), c))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

Mat3 word_matrix(const std::string& reduced, const Genus2Data& g2) {
  M3L m;
  for (char c : reduced) {
    int k = letter_index(c);
    M3L g;
    g.a = std::isupper(static_cast<unsigned char>(c)) ? g2.gens_hi_inv[k]
                                                      : g2.gens_hi[k];
    m = mulL(m, g);
  }
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = static_cast<double>(m.a[i]);
  return r;
}

std::unique_ptr<Genus2Data> build_genus2() {
  auto g2 = std::make_unique<Genus2Data>();
  // Regular octagon, vertex angle pi/4. Central triangle over one side has
  // apex angle pi/4 and base angles pi/8, which fixes the circumradius.
  const ld piL = 3.141592653589793238462643383279502884L;
  const ld A = piL / 4, B = piL / 8;
  ld coshR = std::cos(B) * (1 + std::cos(A)) / (std::sin(A) * std::sin(B));
  ld R = std::acosh(coshR);
  ld sinhR = std::sinh(R);
  std::array<ld, 3> P[8];
  for (int k = 0; k < 8; ++k) {
    ld t = piL / 4 * k;
    P[k] = {coshR, sinhR * std::cos(t), sinhR * std::sin(t)};
    for (int i = 0; i < 3; ++i) g2->octagon[k][i] = static_cast<double>(P[k][i]);
  }
  g2->circumradius = static_cast<double>(R);
  g2->side_length =
      hyp_distance(g2->octagon[0].data(), g2->octagon[1].data(), 3);

  // Side pairing from the boundary word a b a^-1 b^-1 c d c^-1 d^-1: the side
  // at position j (carrying the inverse letter) is glued onto the side at
  // position i with reversed arrows, so the pairing map sends P_j -> P_{i+1}
  // and P_{j+1} -> P_i.
  const int pos_fwd[4] = {0, 1, 4, 5};
  const int pos_bwd[4] = {2, 3, 6, 7};
  M3L T[4];
  for (int g = 0; g < 4; ++g) {
    int i = pos_fwd[g], j = pos_bwd[g];
    M3L from = segment_frameL(P[j].data(), P[(j + 1) % 8].data());
    M3L to = segment_frameL(P[(i + 1) % 8].data(), P[i].data());
    T[g] = mulL(to, minkinvL(from));
  }

  // Lifts gamma_k with gamma_k(P_0) = P_k, chained through the pairings:
  // gamma_{i+1} = T gamma_j and gamma_i = T gamma_{j+1}.
  M3L gamma[8];
  gamma[0] = M3L{};
  gamma[3] = minkinvL(T[0]);                // T_a gamma_3 = gamma_0
  gamma[2] = mulL(T[1], gamma[3]);          // T_b gamma_3 = gamma_2
  gamma[1] = mulL(T[0], gamma[2]);          // T_a gamma_2 = gamma_1
  gamma[4] = mulL(minkinvL(T[1]), gamma[1]);  // T_b gamma_4 = gamma_1
  gamma[5] = T[3];                          // T_d gamma_0 = gamma_5
  gamma[6] = mulL(minkinvL(T[2]), gamma[5]);  // T_c gamma_6 = gamma_5
  gamma[7] = mulL(minkinvL(T[3]), gamma[6]);  // T_d gamma_7 = gamma_6

  // Generators are the edge decks gamma_m^-1 gamma_{m+1} at the positive
  // boundary positions.
  M3L gensL[4] = {gamma[1], mulL(minkinvL(gamma[1]), gamma[2]),
                  mulL(minkinvL(gamma[4]), gamma[5]),
                  mulL(minkinvL(gamma[5]), gamma[6])};
  for (int g = 0; g < 4; ++g) {
    g2->gens_hi[g] = gensL[g].a;
    g2->gens_hi_inv[g] = minkinvL(gensL[g]).a;
    for (int i = 0; i < 9; ++i)
      g2->gens[g].a[i] = static_cast<double>(gensL[g].a[i]);
    g2->gens_inv[g] = g2->gens[g].minkowski_inverse();
  }

  const char* relator = "abABcdCD";
  for (int k = 0; k < 8; ++k) g2->vertex_words[k] = std::string(relator, relator + k);

  // Consistency checks. The relator and the k=7 vertex word are genuine
  // tests: they hold only if the pairing maps satisfy the octagon's cycle
  // relation, which Poincare's angle condition (vertex angle sum 2 pi)
  // guarantees for the exact geometry.
  auto check = [&](double residual, double tol, const char* what) {
    if (!(residual <= tol)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3e", residual);
      fail(std::string("genus-2 octagon construction failed: ") + what +
           " (residual " + buf + ")");
    }
  };
  Mat3 rel = word_matrix(relator, *g2);
  check(rel.max_abs_diff(Mat3::identity()), 1e-9, "relator is not the identity");
  for (int k = 0; k < 8; ++k) {
    Mat3 wk = word_matrix(g2->vertex_words[k], *g2);
    std::array<double, 3> img{};
    wk.apply(g2->octagon[0].data(), img.data());
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
      err = std::max(err, std::abs(img[i] - g2->octagon[k][i]));
    check(err, 1e-9, "vertex word does not reach its vertex");
  }
  for (int g = 0; g < 4; ++g) {
    // Side transport: the pairing map built above must carry side j onto
    // side i with reversed endpoints.
    int i = pos_fwd[g], j = pos_bwd[g];
    std::array<ld, 3> img{};
    double e = 0.0;
    applyL(T[g], P[j].data(), img.data());
    for (int k = 0; k < 3; ++k)
      e = std::max(e, std::abs(static_cast<double>(img[k] - P[(i + 1) % 8][k])));
    applyL(T[g], P[(j + 1) % 8].data(), img.data());
    for (int k = 0; k < 3; ++k)
      e = std::max(e, std::abs(static_cast<double>(img[k] - P[i][k])));
    check(e, 1e-9, "side pairing misses its target side");
  }
  // Total angle defect of the octagon equals 4 pi (all 8 corners meet at one
  // point with angle sum 2 pi).
  double angle_sum = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double* P = g2->octagon[k].data();
    std::array<double, 3> u{}, v{};
    hyp_log(P, g2->octagon[(k + 1) % 8].data(), u.data(), 3);
    hyp_log(P, g2->octagon[(k + 7) % 8].data(), v.data(), 3);
    double c = mink(u.data(), v.data(), 3) /
               std::sqrt(mink(u.data(), u.data(), 3) * mink(v.data(), v.data(), 3));
    angle_sum += std::acos(std::clamp(c, -1.0, 1.0));
  }
  check(std::abs(angle_sum - 2.0 * kPi), 1e-9, "octagon angle sum is not 2 pi");
  double area = 6.0 * kPi - angle_sum;  // defect of an octagon
  check(std::abs(area - 4.0 * kPi), 1e-9, "octagon area is not 4 pi");
  return g2;
}

}  // namespace

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[3 * i + k] * o.a[3 * k + j];
      r.a[3 * i + j] = s;
    }
  return r;
}

void Mat3::apply(const double* x, double* out) const {
  for (int i = 0; i < 3; ++i)
    out[i] = a[3 * i] * x[0] + a[3 * i + 1] * x[1] + a[3 * i + 2] * x[2];
}

Mat3 Mat3::minkowski_inverse() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = (i == 0 ? -1.0 : 1.0) * (j == 0 ? -1.0 : 1.0);
      r.a[3 * i + j] = s * a[3 * j + i];
    }
  return r;
}

double Mat3::max_abs_diff(const Mat3& o) const {
  double m = 0.0;
  for (int i = 0; i < 9; ++i) m = std::max(m, std::abs(a[i] - o.a[i]));
  return m;
}

double GeodesicTarget::curvature_upper_bound() const {
  switch (kind_) {
    case TargetKind::Euclidean:
    case TargetKind::FlatTorus:
      return 0.0;
    case TargetKind::Hyperbolic:
    case TargetKind::Genus2Octagon:
      return -1.0;
    case TargetKind::MetricTree:
      return -std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double GeodesicTarget::distance(const double* p, const double* q) const {
  if (hyperboloid()) return hyp_distance(p, q, model_dim_);
  if (kind_ == TargetKind::MetricTree) {
    const TreeData& t = *tree_;
    auto ep = static_cast<std::int32_t>(p[0]);
    auto eq = static_cast<std::int32_t>(q[0]);
    if (ep == eq) return std::abs(p[1] - q[1]);
    const std::int32_t V = t.vertex_count;
    double best = std::numeric_limits<double>::infinity();
    for (int sp = 0; sp < 2; ++sp)
      for (int sq = 0; sq < 2; ++sq) {
        double a = sp == 0 ? p[1] : t.lengths[ep] - p[1];
        double b = sq == 0 ? q[1] : t.lengths[eq] - q[1];
        double mid = t.dist[t.edges[ep][sp] * V + t.edges[eq][sq]];
        best = std::min(best, a + mid + b);
      }
    return best;
  }
  double s = 0.0;
  for (int i = 0; i < model_dim_; ++i) {
    double d = q[i] - p[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void GeodesicTarget::geodesic_eval(const double* p, const double* q, double t,
                                   double* out) const {
  if (hyperboloid()) {
    hyp_geodesic(p, q, t, out, model_dim_);
    return;
  }
  if (kind_ == TargetKind::MetricTree) {
    const TreeData& tr = *tree_;
    auto ep = static_cast<std::int32_t>(p[0]);
    auto eq = static_cast<std::int32_t>(q[0]);
    if (ep == eq) {
      out[0] = p[0];
      out[1] = p[1] + t * (q[1] - p[1]);
      return;
    }
    const std::int32_t V = tr.vertex_count;
    double best = std::numeric_limits<double>::infinity();
    int bsp = 0, bsq = 0;
    for (int sp = 0; sp < 2; ++sp)
      for (int sq = 0; sq < 2; ++sq) {
        double a = sp == 0 ? p[1] : tr.lengths[ep] - p[1];
        double b = sq == 0 ? q[1] : tr.lengths[eq] - q[1];
        double cand = a + tr.dist[tr.edges[ep][sp] * V + tr.edges[eq][sq]] + b;
        if (cand < best) {
          best = cand;
          bsp = sp;
          bsq = sq;
        }
      }
    double s = t * best;
    double a = bsp == 0 ? p[1] : tr.lengths[ep] - p[1];
    if (s <= a) {
      // Still on p's edge, moving toward the chosen endpoint.
      out[0] = p[0];
      out[1] = bsp == 0 ? p[1] - s : p[1] + s;
      return;
    }
    s -= a;
    std::int32_t u = tr.edges[ep][bsp];
    std::int32_t goal = tr.edges[eq][bsq];
    while (u != goal) {
      std::int32_t v = tr.next[u * V + goal];
      // Find the edge u-v; trees are small, linear scan is fine.
      std::int32_t e = -1;
      bool from_tail = false;
      for (std::size_t k = 0; k < tr.edges.size(); ++k) {
        if (tr.edges[k][0] == u && tr.edges[k][1] == v) {
          e = static_cast<std::int32_t>(k);
          from_tail = true;
          break;
        }
        if (tr.edges[k][1] == u && tr.edges[k][0] == v) {
          e = static_cast<std::int32_t>(k);
          from_tail = false;
          break;
        }
      }
      assert(e >= 0);
      double len = tr.lengths[e];
      if (s <= len) {
        out[0] = static_cast<double>(e);
        out[1] = from_tail ? s : len - s;
        return;
      }
      s -= len;
      u = v;
    }
    // Remaining arc lies on q's edge, walking inward from `goal`.
    out[0] = q[0];
    out[1] = bsq == 0 ? s : tr.lengths[eq] - s;
    double lo = 0.0, hi = tr.lengths[eq];
    out[1] = std::clamp(out[1], lo, hi);
    return;
  }
  for (int i = 0; i < model_dim_; ++i) out[i] = p[i] + t * (q[i] - p[i]);
}

void GeodesicTarget::log_map(const double* p, const double* q, double* out) const {
  if (kind_ == TargetKind::MetricTree)
    throw std::logic_error("metric tree target has no log map");
  if (hyperboloid()) {
    hyp_log(p, q, out, model_dim_);
    return;
  }
  for (int i = 0; i < model_dim_; ++i) out[i] = q[i] - p[i];
}

void GeodesicTarget::exp_map(const double* p, const double* v, double* out) const {
  if (kind_ == TargetKind::MetricTree)
    throw std::logic_error("metric tree target has no exp map");
  if (hyperboloid()) {
    hyp_exp(p, v, out, model_dim_);
    return;
  }
  for (int i = 0; i < model_dim_; ++i) out[i] = p[i] + v[i];
}

void GeodesicTarget::project_point(double* p) const {
  if (hyperboloid()) hyp_project_point(p, model_dim_);
}

void GeodesicTarget::project_tangent(const double* p, double* v) const {
  if (kind_ == TargetKind::MetricTree)
    throw std::logic_error("metric tree target has no tangent spaces");
  if (hyperboloid()) hyp_project_tangent(p, v, model_dim_);
}

double GeodesicTarget::tangent_dot(const double* p, const double* u,
                                   const double* v) const {
  if (kind_ == TargetKind::MetricTree)
    throw std::logic_error("metric tree target has no tangent spaces");
  if (hyperboloid()) return mink(u, v, model_dim_);
  (void)p;
  double s = 0.0;
  for (int i = 0; i < model_dim_; ++i) s += u[i] * v[i];
  return s;
}

double GeodesicTarget::tangent_norm(const double* p, const double* v) const {
  return std::sqrt(std::max(tangent_dot(p, v, v), 0.0));
}

void GeodesicTarget::tangent_frame(const double* p, double* frame) const {
  if (kind_ == TargetKind::MetricTree)
    throw std::logic_error("metric tree target has no tangent spaces");
  if (hyperboloid()) {
    hyp_frame(p, frame, model_dim_);
    return;
  }
  std::fill(frame, frame + dim_ * model_dim_, 0.0);
  for (int i = 0; i < dim_; ++i) frame[i * model_dim_ + i] = 1.0;
}

double GeodesicTarget::model_constraint_residual(const double* p) const {
  if (hyperboloid()) return std::abs(mink(p, p, model_dim_) + 1.0);
  return 0.0;
}

void GeodesicTarget::validate_point(const double* p, double tol) const {
  for (int i = 0; i < model_dim_; ++i)
    if (!std::isfinite(p[i])) fail("point has non-finite coordinates");
  if (hyperboloid()) {
    if (model_constraint_residual(p) > tol || p[0] <= 0.0)
      fail("point is off the hyperboloid sheet");
    return;
  }
  if (kind_ == TargetKind::MetricTree) {
    const TreeData& t = *tree_;
    double e = p[0];
    if (e != std::floor(e) || e < 0.0 || e >= static_cast<double>(t.edges.size()))
      fail("tree point has an invalid edge id");
    auto ei = static_cast<std::int32_t>(e);
    if (p[1] < -1e-9 || p[1] > t.lengths[ei] + 1e-9)
      fail("tree point offset is outside its edge");
  }
}

DeckElement GeodesicTarget::deck_identity() const {
  DeckElement g;
  if (kind_ == TargetKind::FlatTorus)
    g.shift.assign(static_cast<std::size_t>(dim_), 0);
  return g;
}

DeckElement GeodesicTarget::deck_compose(const DeckElement& g,
                                         const DeckElement& h) const {
  if (kind_ == TargetKind::FlatTorus) {
    DeckElement r = g;
    for (int i = 0; i < dim_; ++i) r.shift[i] += h.shift[i];
    return r;
  }
  if (kind_ == TargetKind::Genus2Octagon) return deck_from_word(g.word + h.word);
  return deck_identity();
}

DeckElement GeodesicTarget::deck_inverse(const DeckElement& g) const {
  if (kind_ == TargetKind::FlatTorus) {
    DeckElement r = g;
    for (auto& s : r.shift) s = -s;
    return r;
  }
  if (kind_ == TargetKind::Genus2Octagon) {
    std::string w(g.word.rbegin(), g.word.rend());
    for (char& c : w)
      c = std::isupper(static_cast<unsigned char>(c))
              ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
              : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return deck_from_word(w);
  }
  return deck_identity();
}

bool GeodesicTarget::deck_is_identity(const DeckElement& g, double tol) const {
  if (kind_ == TargetKind::FlatTorus)
    return std::all_of(g.shift.begin(), g.shift.end(),
                       [](std::int32_t s) { return s == 0; });
  if (kind_ == TargetKind::Genus2Octagon)
    // Nontrivial reduced words still exist for the identity element (the
    // relator and its conjugates), so test the matrix, not the word.
    return g.mat.max_abs_diff(Mat3::identity()) <= tol;
  return true;
}

void GeodesicTarget::deck_apply(const DeckElement& g, const double* p,
                                double* out) const {
  if (kind_ == TargetKind::FlatTorus) {
    for (int i = 0; i < dim_; ++i) out[i] = p[i] + static_cast<double>(g.shift[i]);
    return;
  }
  if (kind_ == TargetKind::Genus2Octagon) {
    g.mat.apply(p, out);
    return;
  }
  std::copy(p, p + model_dim_, out);
}

void GeodesicTarget::deck_apply_tangent(const DeckElement& g, const double* v,
                                        double* out) const {
  if (kind_ == TargetKind::Genus2Octagon) {
    g.mat.apply(v, out);
    return;
  }
  std::copy(v, v + model_dim_, out);
}

DeckElement GeodesicTarget::deck_from_word(const std::string& word) const {
  if (kind_ != TargetKind::Genus2Octagon)
    fail("deck words only apply to the genus-2 target");
  DeckElement g;
  g.word = reduce_word(word);
  if (g.word.size() > static_cast<std::size_t>(kMaxDeckWord))
    fail("deck word exceeds the reduced length cap");
  g.mat = word_matrix(g.word, *genus2_);
  return g;
}

DeckElement GeodesicTarget::deck_from_shift(std::vector<std::int32_t> shift) const {
  if (kind_ != TargetKind::FlatTorus)
    fail("integer shifts only apply to flat torus targets");
  if (static_cast<int>(shift.size()) != dim_)
    fail("shift dimension does not match the torus");
  DeckElement g;
  g.shift = std::move(shift);
  return g;
}

double GeodesicTarget::edge_length(const DeckElement& g, const double* p,
                                   const double* q) const {
  if (kind_ == TargetKind::FlatTorus) {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double d = (q[i] - p[i]) + static_cast<double>(g.shift[i]);
      s += d * d;
    }
    return std::sqrt(s);
  }
  if (kind_ == TargetKind::Genus2Octagon) {
    std::array<double, 3> gq{};
    g.mat.apply(q, gq.data());
    return hyp_distance(p, gq.data(), 3);
  }
  return distance(p, q);
}

void GeodesicTarget::edge_log(const DeckElement& g, const double* p,
                              const double* q, double* out) const {
  if (kind_ == TargetKind::MetricTree)
    throw std::logic_error("metric tree target has no log map");
  if (kind_ == TargetKind::FlatTorus) {
    for (int i = 0; i < dim_; ++i)
      out[i] = (q[i] - p[i]) + static_cast<double>(g.shift[i]);
    return;
  }
  if (kind_ == TargetKind::Genus2Octagon) {
    std::array<double, 3> gq{};
    g.mat.apply(q, gq.data());
    hyp_log(p, gq.data(), out, 3);
    return;
  }
  log_map(p, q, out);
}

void GeodesicTarget::random_point(Rng& rng, double radius, double* out) const {
  if (kind_ == TargetKind::MetricTree) {
    const TreeData& t = *tree_;
    auto e = static_cast<std::int32_t>(rng.index(t.edges.size()));
    out[0] = static_cast<double>(e);
    out[1] = rng.uniform(0.0, t.lengths[e]);
    return;
  }
  if (hyperboloid()) {
    std::vector<double> origin(model_dim_, 0.0);
    origin[0] = 1.0;
    std::vector<double> v(model_dim_, 0.0);
    random_tangent(rng, origin.data(), rng.uniform(0.0, radius), v.data());
    hyp_exp(origin.data(), v.data(), out, model_dim_);
    return;
  }
  for (int i = 0; i < model_dim_; ++i) out[i] = rng.uniform(-radius, radius);
}

void GeodesicTarget::random_tangent(Rng& rng, const double* p, double norm,
                                    double* out) const {
  if (kind_ == TargetKind::MetricTree)
    throw std::logic_error("metric tree target has no tangent spaces");
  std::vector<double> frame(static_cast<std::size_t>(dim_) * model_dim_);
  tangent_frame(p, frame.data());
  std::vector<double> c(dim_);
  double n2 = 0.0;
  for (int i = 0; i < dim_; ++i) {
    c[i] = rng.normal();
    n2 += c[i] * c[i];
  }
  double scale = n2 > 0.0 ? norm / std::sqrt(n2) : 0.0;
  std::fill(out, out + model_dim_, 0.0);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < model_dim_; ++j)
      out[j] += scale * c[i] * frame[i * model_dim_ + j];
}

const TreeData& GeodesicTarget::tree() const {
  if (!tree_) fail("target is not a metric tree");
  return *tree_;
}

const Genus2Data& GeodesicTarget::genus2() const {
  if (!genus2_) fail("target is not the genus-2 octagon");
  return *genus2_;
}

TargetPtr GeodesicTarget::euclidean(int n) {
  if (n < 1 || n > kMaxModelDim) fail("euclidean dimension out of range");
  auto t = std::shared_ptr<GeodesicTarget>(new GeodesicTarget());
  t->kind_ = TargetKind::Euclidean;
  t->dim_ = n;
  t->model_dim_ = n;
  return t;
}

TargetPtr GeodesicTarget::hyperbolic(int n) {
  if (n < 1 || n > 3) fail("hyperbolic dimension out of range (1..3)");
  auto t = std::shared_ptr<GeodesicTarget>(new GeodesicTarget());
  t->kind_ = TargetKind::Hyperbolic;
  t->dim_ = n;
  t->model_dim_ = n + 1;
  return t;
}

TargetPtr GeodesicTarget::flat_torus(int n) {
  if (n < 1 || n > kMaxModelDim) fail("torus dimension out of range");
  auto t = std::shared_ptr<GeodesicTarget>(new GeodesicTarget());
  t->kind_ = TargetKind::FlatTorus;
  t->dim_ = n;
  t->model_dim_ = n;
  return t;
}

TargetPtr GeodesicTarget::genus2_octagon() {
  auto t = std::shared_ptr<GeodesicTarget>(new GeodesicTarget());
  t->kind_ = TargetKind::Genus2Octagon;
  t->dim_ = 2;
  t->model_dim_ = 3;
  t->genus2_ = build_genus2();
  return t;
}

TargetPtr GeodesicTarget::metric_tree(std::int32_t vertex_count,
                                      std::vector<std::array<std::int32_t, 2>> edges,
                                      std::vector<double> lengths) {
  if (vertex_count < 1) fail("metric tree needs at least one vertex");
  if (edges.size() != lengths.size()) fail("tree edge and length counts differ");
  if (edges.size() + 1 != static_cast<std::size_t>(vertex_count))
    fail("tree must have exactly vertex_count - 1 edges");
  for (double l : lengths)
    if (!(l > 0.0) || !std::isfinite(l)) fail("tree edge lengths must be positive");
  for (auto& e : edges) {
    if (e[0] < 0 || e[0] >= vertex_count || e[1] < 0 || e[1] >= vertex_count)
      fail("tree edge endpoint out of range");
    if (e[0] == e[1]) fail("tree edges cannot be loops");
  }
  auto td = std::make_unique<TreeData>();
  td->vertex_count = vertex_count;
  td->edges = std::move(edges);
  td->lengths = std::move(lengths);
  const std::int32_t V = vertex_count;
  const double inf = std::numeric_limits<double>::infinity();
  td->dist.assign(static_cast<std::size_t>(V) * V, inf);
  td->next.assign(static_cast<std::size_t>(V) * V, -1);
  for (std::int32_t i = 0; i < V; ++i) {
    td->dist[i * V + i] = 0.0;
    td->next[i * V + i] = i;
  }
  for (std::size_t k = 0; k < td->edges.size(); ++k) {
    auto [u, v] = td->edges[k];
    double l = td->lengths[k];
    if (l < td->dist[u * V + v]) {
      td->dist[u * V + v] = td->dist[v * V + u] = l;
      td->next[u * V + v] = v;
      td->next[v * V + u] = u;
    }
  }
  for (std::int32_t k = 0; k < V; ++k)
    for (std::int32_t i = 0; i < V; ++i)
      for (std::int32_t j = 0; j < V; ++j) {
        double via = td->dist[i * V + k] + td->dist[k * V + j];
        if (via < td->dist[i * V + j]) {
          td->dist[i * V + j] = via;
          td->next[i * V + j] = td->next[i * V + k];
        }
      }
  for (std::int32_t i = 0; i < V; ++i)
    for (std::int32_t j = 0; j < V; ++j)
      if (!std::isfinite(td->dist[i * V + j]))
        fail("tree is not connected");

  auto t = std::shared_ptr<GeodesicTarget>(new GeodesicTarget());
  t->kind_ = TargetKind::MetricTree;
  t->dim_ = 1;
  t->model_dim_ = 2;
  t->tree_ = std::move(td);
  return t;
}

}  // namespace simharm
