#include "simharm/io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "simharm/targets.hpp"

namespace simharm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Field access and type errors inside body become std::invalid_argument so
// callers see one exception type for every structural problem.
template <typename F>
auto decode(const char* what, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(); }

const char* termination_name(FlowTermination t) {
  switch (t) {
    case FlowTermination::Converged: return "converged";
    case FlowTermination::MaxIters: return "max_iters";
    case FlowTermination::InfiniteEnergy: return "infinite_energy";
    case FlowTermination::Stalled: return "stalled";
  }
  return "unknown";
}

}  // namespace

json complex_to_json(const DeltaComplex& K) {
  json j;
  j["vertices"] = K.vertex_count;
  j["edges"] = json::array();
  for (const auto& e : K.edges) j["edges"].push_back({e[0], e[1]});
  j["faces"] = json::array();
  for (const auto& face : K.faces) {
    json cycle = json::array();
    for (const EdgeRef& r : face)
      cycle.push_back({r.edge, static_cast<int>(r.dir)});
    j["faces"].push_back(std::move(cycle));
  }
  j["mode"] = K.mode == ComplexMode::Surface ? "surface" : "skeleton";
  return j;
}

DeltaComplex complex_from_json(const json& j) {
  return decode("complex", [&] {
    const auto n = j.at("vertices").get<std::int32_t>();
    std::vector<std::array<std::int32_t, 2>> edges;
    for (const auto& e : j.at("edges"))
      edges.push_back({e.at(0).get<std::int32_t>(), e.at(1).get<std::int32_t>()});
    std::vector<std::vector<EdgeRef>> faces;
    for (const auto& cycle : j.at("faces")) {
      std::vector<EdgeRef> face;
      for (const auto& r : cycle)
        face.push_back({r.at(0).get<std::int32_t>(),
                        static_cast<std::int8_t>(r.at(1).get<int>())});
      faces.push_back(std::move(face));
    }
    const std::string mode = j.value("mode", "surface");
    if (mode != "surface" && mode != "skeleton")
      fail("complex: unknown mode " + mode);
    return make_complex(n, std::move(edges), std::move(faces),
                        mode == "surface" ? ComplexMode::Surface
                                          : ComplexMode::Skeleton);
  });
}

json metric_to_json(const SimplicialMetric& l) {
  return json{{"lengths", l.lengths}};
}

SimplicialMetric metric_from_json(const json& j) {
  return decode("metric", [&] {
    return SimplicialMetric{j.at("lengths").get<std::vector<double>>()};
  });
}

json target_to_json(const GeodesicTarget& T) {
  switch (T.kind()) {
    case TargetKind::Euclidean:
      return json{{"type", "euclidean"}, {"dim", T.dim()}};
    case TargetKind::Hyperbolic:
      return json{{"type", "hyperbolic"}, {"dim", T.dim()}};
    case TargetKind::FlatTorus:
      return json{{"type", "flat_torus"}, {"dim", T.dim()}};
    case TargetKind::Genus2Octagon:
      return json{{"type", "genus2_octagon"}};
    case TargetKind::MetricTree: {
      const TreeData& t = T.tree();
      json edges = json::array();
      for (const auto& e : t.edges) edges.push_back({e[0], e[1]});
      return json{{"type", "metric_tree"},
                  {"vertices", t.vertex_count},
                  {"edges", std::move(edges)},
                  {"lengths", t.lengths}};
    }
  }
  fail("target: unknown kind");
}

TargetPtr target_from_json(const json& j) {
  return decode("target", [&]() -> TargetPtr {
    const auto type = j.at("type").get<std::string>();
    if (type == "euclidean") return GeodesicTarget::euclidean(j.at("dim").get<int>());
    if (type == "hyperbolic")
      return GeodesicTarget::hyperbolic(j.at("dim").get<int>());
    if (type == "flat_torus")
      return GeodesicTarget::flat_torus(j.at("dim").get<int>());
    if (type == "genus2_octagon") return GeodesicTarget::genus2_octagon();
    if (type == "metric_tree") {
      std::vector<std::array<std::int32_t, 2>> edges;
      for (const auto& e : j.at("edges"))
        edges.push_back({e.at(0).get<std::int32_t>(), e.at(1).get<std::int32_t>()});
      return GeodesicTarget::metric_tree(j.at("vertices").get<std::int32_t>(),
                                         std::move(edges),
                                         j.at("lengths").get<std::vector<double>>());
    }
    fail("target: unknown type " + type);
  });
}

json map_to_json(const SimplicialMap& f) {
  const GeodesicTarget& T = *f.target;
  const int md = T.model_dim();
  json images = json::array();
  for (std::int32_t v = 0; v < f.complex->vertex_count; ++v) {
    const double* x = f.image(v);
    images.push_back(json(std::vector<double>(x, x + md)));
  }
  json decks = json::array();
  for (const DeckElement& g : f.edge_decks) {
    switch (T.kind()) {
      case TargetKind::FlatTorus:
        decks.push_back(json(g.shift));
        break;
      case TargetKind::Genus2Octagon:
        decks.push_back(g.word.empty() ? "id" : g.word);
        break;
      default:
        decks.push_back("id");
    }
  }
  return json{{"vertex_images", std::move(images)},
              {"edge_decks", std::move(decks)}};
}

SimplicialMap map_from_json(const json& j, ComplexPtr complex, TargetPtr target) {
  return decode("map", [&] {
    const int md = target->model_dim();
    std::vector<double> images;
    for (const auto& point : j.at("vertex_images")) {
      if (static_cast<int>(point.size()) != md)
        fail("map: a vertex image has " + std::to_string(point.size()) +
             " coordinates, target has " + std::to_string(md));
      for (const auto& c : point) images.push_back(c.get<double>());
    }
    std::vector<DeckElement> decks;
    for (const auto& enc : j.at("edge_decks")) {
      if (enc.is_string()) {
        const auto s = enc.get<std::string>();
        decks.push_back(s == "id" ? target->deck_identity()
                                  : target->deck_from_word(s));
      } else if (enc.is_array()) {
        decks.push_back(
            target->deck_from_shift(enc.get<std::vector<std::int32_t>>()));
      } else {
        fail("map: deck encodings are \"id\", an integer array, or a word");
      }
    }
    return make_map(std::move(complex), std::move(target), std::move(images),
                    std::move(decks));
  });
}

json check_to_json(const CheckResult& r) {
  return json{{"name", r.name},
              {"pass", r.pass},
              {"residual", number_or_null(r.residual)},
              {"witness", r.witness},
              {"note", r.note}};
}

json flow_report_to_json(const FlowReport& r) {
  json energy = json::array(), grad = json::array(), step = json::array();
  for (double x : r.energy) energy.push_back(number_or_null(x));
  for (double x : r.grad_norm) grad.push_back(number_or_null(x));
  for (double x : r.step) step.push_back(number_or_null(x));
  return json{{"termination", termination_name(r.termination)},
              {"iterations", r.iterations()},
              {"energy", std::move(energy)},
              {"grad_norm", std::move(grad)},
              {"step", std::move(step)}};
}

std::string flow_trace_csv(const FlowReport& r) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "iteration,energy,grad_norm,step\n";
  for (std::size_t i = 0; i < r.energy.size(); ++i)
    os << i << ',' << r.energy[i] << ',' << r.grad_norm[i] << ',' << r.step[i]
       << '\n';
  return os.str();
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_text(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

void save_json(const json& j, const std::string& path) {
  save_text(j.dump(2) + "\n", path);
}

std::string obj_export(const SimplicialMap& f) {
  const DeltaComplex& K = *f.complex;
  const GeodesicTarget& T = *f.target;
  const int md = T.model_dim();
  const bool curved = T.kind() == TargetKind::Hyperbolic ||
                      T.kind() == TargetKind::Genus2Octagon;
  if (T.kind() == TargetKind::MetricTree)
    fail("metric tree images have no mesh export");
  if (!curved && md > 3) fail("OBJ export carries at most 3 coordinates");

  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  auto vline = [&](const double* x, int n) {
    os << 'v';
    for (int i = 0; i < 3; ++i) os << ' ' << (i < n ? x[i] : 0.0);
    os << '\n';
  };

  if (!curved) {
    for (std::int32_t v = 0; v < K.vertex_count; ++v) vline(f.image(v), md);
    for (std::int32_t fc = 0; fc < K.face_count(); ++fc) {
      const std::int32_t m = K.face_arity(fc), p = K.face_preferred_slot[fc];
      for (std::int32_t k = 1; k + 1 < m; ++k)
        os << "f " << K.slot_start(fc, p) + 1 << ' '
           << K.slot_start(fc, (p + k) % m) + 1 << ' '
           << K.slot_start(fc, (p + k + 1) % m) + 1 << '\n';
    }
    return os.str();
  }

  // Hyperboloid sheet -> Poincare ball, one vertex block per face since the
  // lifts of a shared vertex differ between faces.
  std::int64_t base = 1;
  for (std::int32_t fc = 0; fc < K.face_count(); ++fc) {
    const std::vector<double> lifts = face_lifts(f, fc);
    const std::int32_t m = K.face_arity(fc);
    for (std::int32_t k = 0; k < m; ++k) {
      const double* x = &lifts[static_cast<std::size_t>(k) * md];
      std::array<double, 3> disk{};
      for (int i = 0; i + 1 < md; ++i) disk[i] = x[i + 1] / (1.0 + x[0]);
      vline(disk.data(), md - 1);
    }
    for (std::int32_t k = 1; k + 1 < m; ++k)
      os << "f " << base << ' ' << base + k << ' ' << base + k + 1 << '\n';
    base += m;
  }
  return os.str();
}

}  // namespace simharm
