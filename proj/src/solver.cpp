#include "simharm/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "simharm/targets.hpp"

namespace simharm {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_config(const FlowConfig& cfg, std::int32_t vertex_count) {
  if (!(cfg.grad_tol > 0.0)) fail("grad_tol must be positive");
  if (cfg.max_iters < 0) fail("max_iters must be nonnegative");
  if (!(cfg.initial_step > 0.0)) fail("initial_step must be positive");
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0)) fail("shrink must lie in (0,1)");
  if (!(cfg.armijo > 0.0 && cfg.armijo < 1.0))
    fail("the sufficient-decrease constant must lie in (0,1)");
  if (!(cfg.min_step > 0.0)) fail("min_step must be positive");
  for (std::int32_t v : cfg.fixed_vertices)
    if (v < 0 || v >= vertex_count)
      fail("fixed vertex " + std::to_string(v) + " is out of range");
}

// Per-(map, metric) state shared by the inner loop: quasi edge weights (zero
// on zero-length edges, which therefore exert no force), deck inverses for
// the head-side pull of each edge, and the free-vertex mask.
struct FlowContext {
  const DeltaComplex* K;
  const GeodesicTarget* T;
  int md;
  std::vector<double> w;
  std::vector<DeckElement> inv;
  std::vector<char> free_v;

  const double* img(const std::vector<double>& images, std::int32_t v) const {
    return images.data() + static_cast<std::size_t>(v) * md;
  }
  double* img(std::vector<double>& images, std::int32_t v) const {
    return images.data() + static_cast<std::size_t>(v) * md;
  }
};

FlowContext make_context(const SimplicialMap& f, const SimplicialMetric& l,
                         const FlowConfig* cfg) {
  const GeodesicTarget& T = *f.target;
  if (!T.supports_flow())
    fail("metric tree targets have no tangent structure to flow in");
  FlowContext ctx;
  ctx.K = f.complex.get();
  ctx.T = &T;
  ctx.md = T.model_dim();
  ctx.w = edge_weights_quasi(*ctx.K, l);
  ctx.inv.reserve(f.edge_decks.size());
  for (const DeckElement& g : f.edge_decks) ctx.inv.push_back(T.deck_inverse(g));
  ctx.free_v.assign(ctx.K->vertex_count, 1);
  if (cfg)
    for (std::int32_t v : cfg->fixed_vertices) ctx.free_v[v] = 0;
  return ctx;
}

bool has_infinite_energy(const FlowContext& ctx, const SimplicialMap& f,
                         const SimplicialMetric& l) {
  for (std::int32_t e = 0; e < ctx.K->edge_count(); ++e) {
    if (l.lengths[e] != 0.0) continue;
    const auto [u, v] = ctx.K->edges[e];
    if (ctx.T->edge_length(f.edge_decks[e], ctx.img(f.vertex_images, u),
                           ctx.img(f.vertex_images, v)) > 0.0)
      return true;
  }
  return false;
}

double edge_form_energy(const FlowContext& ctx, const std::vector<DeckElement>& decks,
                        const std::vector<double>& images) {
  double E = 0.0;
  for (std::int32_t e = 0; e < ctx.K->edge_count(); ++e) {
    if (ctx.w[e] == 0.0) continue;
    const auto [u, v] = ctx.K->edges[e];
    const double L = ctx.T->edge_length(decks[e], ctx.img(images, u), ctx.img(images, v));
    E += ctx.w[e] * L * L;
  }
  return E;
}

std::vector<double> gradient(const FlowContext& ctx, const std::vector<DeckElement>& decks,
                             const std::vector<double>& images) {
  std::vector<double> g(images.size(), 0.0);
  std::array<double, kMaxModelDim> lg{};
  for (std::int32_t e = 0; e < ctx.K->edge_count(); ++e) {
    if (ctx.w[e] == 0.0) continue;
    const auto [u, v] = ctx.K->edges[e];
    const double s = 2.0 * ctx.w[e];
    ctx.T->edge_log(decks[e], ctx.img(images, u), ctx.img(images, v), lg.data());
    for (int d = 0; d < ctx.md; ++d) g[u * ctx.md + d] -= s * lg[d];
    ctx.T->edge_log(ctx.inv[e], ctx.img(images, v), ctx.img(images, u), lg.data());
    for (int d = 0; d < ctx.md; ++d) g[v * ctx.md + d] -= s * lg[d];
  }
  return g;
}

double grad_sup(const FlowContext& ctx, const std::vector<double>& images,
                const std::vector<double>& g) {
  double m = 0.0;
  for (std::int32_t v = 0; v < ctx.K->vertex_count; ++v)
    if (ctx.free_v[v])
      m = std::max(m, ctx.T->tangent_norm(ctx.img(images, v), &g[v * ctx.md]));
  return m;
}

double grad_norm2(const FlowContext& ctx, const std::vector<double>& images,
                  const std::vector<double>& g) {
  double s = 0.0;
  for (std::int32_t v = 0; v < ctx.K->vertex_count; ++v)
    if (ctx.free_v[v])
      s += ctx.T->tangent_dot(ctx.img(images, v), &g[v * ctx.md], &g[v * ctx.md]);
  return s;
}

// Furthest any vertex moves in one trial. Beyond a few units the hyperboloid
// coordinates grow like e^d and the Minkowski norm of the moved point drowns
// in cancellation, so the trial would throw instead of merely being rejected.
constexpr double kMaxMove = 8.0;

// Backtracking line search along -grad; returns false when the step shrinks
// below cfg.min_step without the Armijo decrease (a stall). exp_map already
// lands on the model surface, so no extra projection happens here; near the
// minimum the Armijo margin rounds away and the test degrades gracefully to
// "did not increase", with an accepted-but-unmoved candidate ending the flow.
bool try_step(const FlowContext& ctx, const FlowConfig& cfg,
              const std::vector<DeckElement>& decks, const std::vector<double>& images,
              const std::vector<double>& g, double E0, double gnorm2, double first_step,
              std::vector<double>& cand, double& step, double& E1) {
  std::array<double, kMaxModelDim> dir{};
  for (double t = first_step; t >= cfg.min_step; t *= cfg.shrink) {
    cand = images;
    for (std::int32_t v = 0; v < ctx.K->vertex_count; ++v) {
      if (!ctx.free_v[v]) continue;
      for (int d = 0; d < ctx.md; ++d) dir[d] = -t * g[v * ctx.md + d];
      ctx.T->exp_map(ctx.img(images, v), dir.data(), ctx.img(cand, v));
    }
    E1 = edge_form_energy(ctx, decks, cand);
    if (E1 <= E0 - cfg.armijo * t * gnorm2) {
      if (cand == images) return false;
      step = t;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<double> energy_gradient(const SimplicialMap& f, const SimplicialMetric& l) {
  validate_map(f);
  const FlowContext ctx = make_context(f, l, nullptr);
  if (has_infinite_energy(ctx, f, l))
    fail("energy is infinite: a zero-length edge has positive image length");
  return gradient(ctx, f.edge_decks, f.vertex_images);
}

std::vector<double> finite_diff_gradient(const SimplicialMap& f,
                                         const SimplicialMetric& l, double h) {
  if (!(h > 0.0)) fail("finite difference step must be positive");
  validate_map(f);
  const FlowContext ctx = make_context(f, l, nullptr);
  if (has_infinite_energy(ctx, f, l))
    fail("energy is infinite: a zero-length edge has positive image length");

  const GeodesicTarget& T = *f.target;
  std::vector<double> out(f.vertex_images.size(), 0.0);
  std::vector<double> frame(static_cast<std::size_t>(T.dim()) * ctx.md);
  std::vector<double> images = f.vertex_images;
  std::array<double, kMaxModelDim> v{};
  for (std::int32_t p = 0; p < ctx.K->vertex_count; ++p) {
    T.tangent_frame(ctx.img(f.vertex_images, p), frame.data());
    for (int k = 0; k < T.dim(); ++k) {
      const double* u = &frame[static_cast<std::size_t>(k) * ctx.md];
      double side[2];
      for (int s = 0; s < 2; ++s) {
        for (int d = 0; d < ctx.md; ++d) v[d] = (s == 0 ? h : -h) * u[d];
        T.exp_map(ctx.img(f.vertex_images, p), v.data(), ctx.img(images, p));
        side[s] = edge_form_energy(ctx, f.edge_decks, images);
      }
      std::copy(ctx.img(f.vertex_images, p), ctx.img(f.vertex_images, p) + ctx.md,
                ctx.img(images, p));
      const double c = (side[0] - side[1]) / (2.0 * h);
      for (int d = 0; d < ctx.md; ++d) out[p * ctx.md + d] += c * u[d];
    }
  }
  return out;
}

FlowStep flow_step(const SimplicialMap& f, const SimplicialMetric& l,
                   const FlowConfig& cfg) {
  check_config(cfg, f.complex->vertex_count);
  validate_map(f);
  const FlowContext ctx = make_context(f, l, &cfg);
  if (has_infinite_energy(ctx, f, l))
    fail("energy is infinite: a zero-length edge has positive image length");

  const std::vector<double> g = gradient(ctx, f.edge_decks, f.vertex_images);
  if (grad_sup(ctx, f.vertex_images, g) == 0.0) return FlowStep{f, 0.0, false};

  const double E0 = edge_form_energy(ctx, f.edge_decks, f.vertex_images);
  const double gnorm2 = grad_norm2(ctx, f.vertex_images, g);
  const double first = std::min(cfg.initial_step,
                                kMaxMove / grad_sup(ctx, f.vertex_images, g));
  std::vector<double> cand;
  double t = 0.0, E1 = 0.0;
  if (!try_step(ctx, cfg, f.edge_decks, f.vertex_images, g, E0, gnorm2, first,
                cand, t, E1))
    return FlowStep{f, 0.0, true};
  FlowStep out{f, t, false};
  out.map.vertex_images = std::move(cand);
  return out;
}

FlowResult flow_to_harmonic(const SimplicialMap& f, const SimplicialMetric& l,
                            const FlowConfig& cfg) {
  check_config(cfg, f.complex->vertex_count);
  validate_map(f);
  const FlowContext ctx = make_context(f, l, &cfg);

  FlowResult res{f, {}};
  FlowReport& rep = res.report;
  if (has_infinite_energy(ctx, f, l)) {
    rep.energy = {kInfinite};
    rep.grad_norm = {std::numeric_limits<double>::quiet_NaN()};
    rep.step = {0.0};
    rep.termination = FlowTermination::InfiniteEnergy;
    return res;
  }

  std::vector<double>& images = res.map.vertex_images;
  double E = edge_form_energy(ctx, f.edge_decks, images);
  std::vector<double> g = gradient(ctx, f.edge_decks, images);
  double gn = grad_sup(ctx, images, g);
  rep.energy.push_back(E);
  rep.grad_norm.push_back(gn);
  rep.step.push_back(0.0);

  // Each search starts one shrink above the previously accepted step, capped
  // by the configured initial step, so well-scaled steps carry over.
  double start = cfg.initial_step;
  std::int64_t accepted = 0;
  std::vector<double> cand;
  while (true) {
    if (gn <= cfg.grad_tol) {
      rep.termination = FlowTermination::Converged;
      break;
    }
    if (accepted >= cfg.max_iters) {
      rep.termination = FlowTermination::MaxIters;
      break;
    }
    const double gnorm2 = grad_norm2(ctx, images, g);
    double t = 0.0, E1 = 0.0;
    if (!try_step(ctx, cfg, f.edge_decks, images, g, E, gnorm2,
                  std::min(start, kMaxMove / gn), cand, t, E1)) {
      rep.termination = FlowTermination::Stalled;
      break;
    }
    images.swap(cand);
    E = E1;
    g = gradient(ctx, f.edge_decks, images);
    gn = grad_sup(ctx, images, g);
    rep.energy.push_back(E);
    rep.grad_norm.push_back(gn);
    rep.step.push_back(t);
    start = std::min(cfg.initial_step, t / cfg.shrink);
    ++accepted;
  }
  return res;
}

namespace {

bool compatible_family(const SimplicialMap& a, const SimplicialMap& b) {
  return a.complex->vertex_count == b.complex->vertex_count &&
         a.complex->edges == b.complex->edges &&
         a.target->kind() == b.target->kind() &&
         a.target->model_dim() == b.target->model_dim();
}

}  // namespace

FamilyResult flow_family(const std::vector<SimplicialMap>& family,
                         const std::vector<SimplicialMetric>& metrics,
                         const FlowConfig& cfg, bool warm_start) {
  const std::size_t n = family.size();
  if (!metrics.empty() && metrics.size() != n)
    fail("expected one metric per family sample or none at all");
  FamilyResult out;
  if (n == 0) return out;
  for (std::size_t i = 1; i < n; ++i)
    if (!compatible_family(family[0], family[i]))
      fail("family samples must share one complex and one target");

  out.maps.resize(n);
  out.reports.resize(n);

  auto sample_energy = [&](std::size_t i, const SimplicialMetric& li) {
    const FlowContext ctx = make_context(family[i], li, &cfg);
    if (has_infinite_energy(ctx, family[i], li)) return kInfinite;
    return edge_form_energy(ctx, family[i].edge_decks, family[i].vertex_images);
  };
  auto run = [&](std::size_t i, const std::vector<double>* seed) {
    const SimplicialMetric li =
        metrics.empty() ? induced_quasimetric(family[i]) : metrics[i];
    SimplicialMap start = family[i];
    if (seed && sample_energy(i, li) > 0.0) start.vertex_images = *seed;
    FlowResult r = flow_to_harmonic(start, li, cfg);
    out.maps[i] = std::move(r.map);
    out.reports[i] = std::move(r.report);
  };

  if (!warm_start && n > 1) {
    std::vector<std::future<void>> jobs;
    jobs.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      jobs.push_back(std::async(std::launch::async, run, i, nullptr));
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t i = 0; i < n; ++i)
      run(i, warm_start && i > 0 ? &out.maps[i - 1].vertex_images : nullptr);
  }

  const GeodesicTarget& T = *family[0].target;
  out.adjacent_distance.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double m = 0.0;
    for (std::int32_t v = 0; v < family[0].complex->vertex_count; ++v)
      m = std::max(m, T.distance(out.maps[i].image(v), out.maps[i + 1].image(v)));
    out.adjacent_distance[i] = m;
  }
  return out;
}

MetricFlowResult minimize_over_metrics(const SimplicialMap& f, double outer_tol,
                                       const FlowConfig& cfg) {
  if (!(outer_tol > 0.0)) fail("outer_tol must be positive");
  MetricFlowResult res;
  SimplicialMap cur = f;
  res.area_trace.push_back(simplicial_area_of_map(cur));

  constexpr int kMaxOuter = 500;
  for (int round = 0; round < kMaxOuter; ++round) {
    const SimplicialMetric l = induced_quasimetric(cur);
    FlowResult r = flow_to_harmonic(cur, l, cfg);
    res.reports.push_back(std::move(r.report));
    const double A = simplicial_area_of_map(r.map);
    const double prev = res.area_trace.back();
    // E >= A makes each round non-increasing in exact arithmetic; a
    // rounding-level uptick means the previous map was already minimal.
    if (A > prev) break;
    cur = std::move(r.map);
    res.area_trace.push_back(A);
    if (prev - A < outer_tol) break;
  }
  res.metric = induced_quasimetric(cur);
  res.map = std::move(cur);
  return res;
}

double uniqueness_probe(const SimplicialMap& fa, const SimplicialMap& fb,
                        const SimplicialMetric& l, const FlowConfig& cfg) {
  if (!compatible_family(fa, fb) || fa.complex->edges != fb.complex->edges)
    fail("uniqueness probe requires two maps of one complex into one target");
  const GeodesicTarget& T = *fa.target;
  if (!T.supports_flow() || !(T.curvature_upper_bound() < 0.0))
    fail("uniqueness is only claimed in negative curvature; flat and tree "
         "targets carry translation families of minimizers");
  for (std::size_t e = 0; e < fa.edge_decks.size(); ++e) {
    const DeckElement& ga = fa.edge_decks[e];
    const DeckElement& gb = fb.edge_decks[e];
    if (ga.shift != gb.shift || ga.word != gb.word ||
        ga.mat.max_abs_diff(gb.mat) != 0.0)
      fail("uniqueness probe requires identical decks; edge " + std::to_string(e) +
           " differs");
  }

  const FlowResult ra = flow_to_harmonic(fa, l, cfg);
  const FlowResult rb = flow_to_harmonic(fb, l, cfg);
  double m = 0.0;
  for (std::int32_t v = 0; v < fa.complex->vertex_count; ++v)
    m = std::max(m, T.distance(ra.map.image(v), rb.map.image(v)));
  return m;
}

}  // namespace simharm
