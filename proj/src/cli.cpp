#include "simharm/cli.hpp"

#include <glob.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "simharm/io.hpp"
#include "simharm/solver.hpp"
#include "simharm/verify.hpp"

namespace simharm {

namespace {

using nlohmann::json;

json jnum(double x) { return std::isfinite(x) ? json(x) : json(); }

json manifest_json(const RunManifest& m) {
  json inputs = json::object(), overrides = json::object();
  for (const auto& [role, path] : m.inputs) inputs[role] = path;
  for (const auto& [flag, value] : m.overrides) overrides[flag] = value;
  return json{{"subcommand", m.subcommand},
              {"inputs", std::move(inputs)},
              {"overrides", std::move(overrides)},
              {"seed", m.seed},
              {"out_dir", m.out_dir}};
}

// Prints the report and mirrors it under out_dir when one was given.
int emit(const RunManifest& m, json report, int code, std::ostream& out) {
  report["manifest"] = manifest_json(m);
  out << report.dump(2) << '\n';
  if (!m.out_dir.empty()) save_json(report, m.out_dir + "/report.json");
  return code;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  ::glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> paths;
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
  ::globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH)
    throw std::runtime_error("glob failed on " + pattern);
  if (paths.empty()) throw std::runtime_error("no files match " + pattern);
  return paths;
}

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.%s", stem, i, ext);
  return buf;
}

// Option values for all subcommands; each registers only what it uses.
struct Opts {
  std::string complex_path, metric_path, target_path, map_path;
  std::string family, checks, out_dir, output;
  double tol = -1.0;  // <0: keep the FlowConfig default
  std::int64_t max_iters = -1;
  double outer_tol = 1e-10;
  std::vector<std::int32_t> fixed;
  bool warm_start = false;
  std::uint64_t seed = 0;
};

FlowConfig flow_config(const Opts& o) {
  FlowConfig cfg;
  if (o.tol > 0.0) cfg.grad_tol = o.tol;
  if (o.max_iters >= 0) cfg.max_iters = o.max_iters;
  cfg.fixed_vertices = o.fixed;
  return cfg;
}

void note_overrides(RunManifest& m, const CLI::App& sub, const Opts& o) {
  auto given = [&](const char* flag) {
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  auto num_str = [](double v) {
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << v;
    return os.str();
  };
  if (given("--tol")) m.overrides.emplace_back("tol", num_str(o.tol));
  if (given("--max-iters"))
    m.overrides.emplace_back("max_iters", std::to_string(o.max_iters));
  if (given("--outer-tol"))
    m.overrides.emplace_back("outer_tol", num_str(o.outer_tol));
  if (given("--fixed")) {
    std::string s;
    for (std::int32_t v : o.fixed) s += (s.empty() ? "" : ",") + std::to_string(v);
    m.overrides.emplace_back("fixed", s);
  }
  if (given("--warm-start")) m.overrides.emplace_back("warm_start", "true");
  if (given("--checks")) m.overrides.emplace_back("checks", o.checks);
}

struct Loaded {
  ComplexPtr complex;
  TargetPtr target;
  SimplicialMetric metric;
  SimplicialMap map;
};

ComplexPtr load_complex(RunManifest& m, const std::string& path) {
  m.inputs.emplace_back("complex", path);
  return std::make_shared<const DeltaComplex>(complex_from_json(load_json(path)));
}

SimplicialMetric load_metric(RunManifest& m, const std::string& path) {
  m.inputs.emplace_back("metric", path);
  return metric_from_json(load_json(path));
}

TargetPtr load_target(RunManifest& m, const std::string& path) {
  m.inputs.emplace_back("target", path);
  return target_from_json(load_json(path));
}

SimplicialMap load_map(RunManifest& m, const std::string& path, ComplexPtr K,
                       TargetPtr T) {
  m.inputs.emplace_back("map", path);
  return map_from_json(load_json(path), std::move(K), std::move(T));
}

int cmd_validate(RunManifest m, const Opts& o, std::ostream& out) {
  ComplexPtr K = load_complex(m, o.complex_path);
  const SimplicialMetric l = load_metric(m, o.metric_path);
  const std::vector<MetricViolation> bad = validate_metric(*K, l);

  json report;
  report["valid"] = bad.empty();
  report["violations"] = json::array();
  for (const MetricViolation& v : bad)
    report["violations"].push_back(
        {{"face", v.face}, {"slot", v.slot}, {"excess", jnum(v.excess)}});
  return emit(m, std::move(report), bad.empty() ? 0 : 1, out);
}

int cmd_energy(RunManifest m, const Opts& o, std::ostream& out) {
  ComplexPtr K = load_complex(m, o.complex_path);
  const SimplicialMetric l = load_metric(m, o.metric_path);
  TargetPtr T = load_target(m, o.target_path);
  const SimplicialMap f = load_map(m, o.map_path, K, T);

  const double E = simplicial_energy(f, l);
  const StretchProfile sp = stretch_factors(f, l);
  json report;
  report["status"] = E == kInfinite ? "infinite" : "finite";
  report["energy_corner"] = jnum(E);
  report["energy_edge"] = jnum(simplicial_energy_edge_form(f, l));
  report["map_area"] = jnum(simplicial_area_of_map(f));
  report["metric_area"] = jnum(simplicial_area(*K, l));
  report["riemannian_area"] = jnum(riemannian_area(f));
  report["stretch"] = {{"any_infinite", sp.any_infinite},
                       {"max_finite", jnum(sp.max_finite)}};
  if (K->mode == ComplexMode::Skeleton) {
    report["energy2"] = jnum(energy2(f, l));
    report["volume2"] = jnum(volume2(f));
  }
  return emit(m, std::move(report), 0, out);
}

int cmd_flow(RunManifest m, const Opts& o, std::ostream& out) {
  ComplexPtr K = load_complex(m, o.complex_path);
  TargetPtr T = load_target(m, o.target_path);
  const FlowConfig cfg = flow_config(o);
  const bool have_metric = !o.metric_path.empty();
  SimplicialMetric l;
  if (have_metric) l = load_metric(m, o.metric_path);

  json report;
  bool converged = true;
  if (o.family.empty()) {
    if (!have_metric) throw std::runtime_error("flow needs --metric");
    if (o.map_path.empty()) throw std::runtime_error("flow needs --map or --family");
    const SimplicialMap f = load_map(m, o.map_path, K, T);
    const FlowResult r = flow_to_harmonic(f, l, cfg);
    converged = r.report.termination == FlowTermination::Converged;
    report["flow"] = flow_report_to_json(r.report);
    report["final_energy"] = jnum(r.report.energy.back());
    report["map_area"] = jnum(simplicial_area_of_map(r.map));
    if (!m.out_dir.empty()) {
      save_json(map_to_json(r.map), m.out_dir + "/map.json");
      save_text(flow_trace_csv(r.report), m.out_dir + "/trace.csv");
    }
  } else {
    std::vector<SimplicialMap> family;
    for (const std::string& path : expand_glob(o.family))
      family.push_back(load_map(m, path, K, T));
    std::vector<SimplicialMetric> metrics;
    if (have_metric) metrics.assign(family.size(), l);
    const FamilyResult r = flow_family(family, metrics, cfg, o.warm_start);
    report["samples"] = family.size();
    report["reports"] = json::array();
    for (std::size_t i = 0; i < r.reports.size(); ++i) {
      converged &= r.reports[i].termination == FlowTermination::Converged;
      report["reports"].push_back(flow_report_to_json(r.reports[i]));
      if (!m.out_dir.empty()) {
        save_json(map_to_json(r.maps[i]), m.out_dir + "/" + indexed("map", i, "json"));
        save_text(flow_trace_csv(r.reports[i]),
                  m.out_dir + "/" + indexed("trace", i, "csv"));
      }
    }
    report["adjacent_distance"] = r.adjacent_distance;
  }
  return emit(m, std::move(report), converged ? 0 : 1, out);
}

int cmd_optimize_metric(RunManifest m, const Opts& o, std::ostream& out) {
  ComplexPtr K = load_complex(m, o.complex_path);
  TargetPtr T = load_target(m, o.target_path);
  const SimplicialMap f = load_map(m, o.map_path, K, T);
  const MetricFlowResult r = minimize_over_metrics(f, o.outer_tol, flow_config(o));

  json report;
  report["rounds"] = r.reports.size();
  report["area_trace"] = r.area_trace;
  report["final_area"] = jnum(r.area_trace.back());
  const double E = simplicial_energy(r.map, r.metric);
  report["final_energy"] = jnum(E);
  report["energy_area_gap"] = jnum(std::abs(E - r.area_trace.back()));

  std::int32_t zero_edges = 0;
  for (double v : r.metric.lengths) zero_edges += v == 0.0;
  report["zero_edges"] = zero_edges;
  if (zero_edges > 0) {
    // Zero edges mean the minimum lives on a smaller complex; suggest it.
    try {
      const CollapseResult c = collapse_zero_subcomplex(r.map, r.metric);
      report["collapse"] = {
          {"vertices", c.map.complex->vertex_count},
          {"edges", c.map.complex->edge_count()},
          {"faces", c.map.complex->face_count()},
          {"chi", c.map.complex->euler_characteristic()},
          {"energy_before", jnum(c.energy_before)},
          {"energy_after", jnum(c.energy_after)}};
      if (!m.out_dir.empty()) {
        save_json(complex_to_json(*c.map.complex),
                  m.out_dir + "/collapsed_complex.json");
        save_json(map_to_json(c.map), m.out_dir + "/collapsed_map.json");
        save_json(metric_to_json(c.metric), m.out_dir + "/collapsed_metric.json");
      }
    } catch (const std::invalid_argument& e) {
      report["collapse"] = {{"error", e.what()}};
    }
  }

  bool converged = true;
  for (const FlowReport& rep : r.reports)
    converged &= rep.termination == FlowTermination::Converged;
  if (!m.out_dir.empty()) {
    save_json(map_to_json(r.map), m.out_dir + "/map.json");
    save_json(metric_to_json(r.metric), m.out_dir + "/metric.json");
    std::string csv = "round,area\n";
    for (std::size_t i = 0; i < r.area_trace.size(); ++i) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, r.area_trace[i]);
      csv += buf;
    }
    save_text(csv, m.out_dir + "/area_trace.csv");
  }
  return emit(m, std::move(report), converged ? 0 : 1, out);
}

int cmd_verify(RunManifest m, const Opts& o, std::ostream& out) {
  ComplexPtr K = load_complex(m, o.complex_path);
  const SimplicialMetric l = load_metric(m, o.metric_path);
  TargetPtr T = load_target(m, o.target_path);
  const SimplicialMap f = load_map(m, o.map_path, K, T);

  std::vector<std::string> names;
  if (o.checks.empty()) {
    // Checks whose hypotheses this target satisfies.
    names.push_back("e_ge_a");
    if (T->supports_flow() && T->curvature_upper_bound() == 0.0)
      names.push_back("mean_value");
    if (T->supports_flow() && T->dim() <= 2) names.push_back("convex_hull");
    if (T->kind() == TargetKind::Euclidean && T->dim() == 1)
      names.push_back("max_principle");
    names.push_back("area_bound");
  } else {
    std::string item;
    for (char c : o.checks + ",") {
      if (c != ',') {
        item += c;
        continue;
      }
      if (!item.empty()) names.push_back(std::exchange(item, ""));
    }
  }

  std::vector<std::int32_t> all_faces(K->face_count());
  for (std::int32_t i = 0; i < K->face_count(); ++i) all_faces[i] = i;
  const double a =
      T->curvature_upper_bound() == -1.0 ? 1.0 : 0.0;

  json checks = json::array();
  bool pass = true;
  for (const std::string& name : names) {
    CheckResult r;
    if (name == "e_ge_a") {
      r = check_E_ge_A(f, l);
    } else if (name == "mean_value") {
      r = check_mean_value(f, l, 1e-7);
    } else if (name == "convex_hull") {
      r = check_convex_hull(f, l);
    } else if (name == "max_principle") {
      r = check_max_principle(f, l, all_faces);
    } else if (name == "area_bound") {
      r = check_area_bound(f, a);
    } else if (name == "angle_sums_immersion") {
      r = check_vertex_angle_sums(f, AngleMode::Immersion);
    } else if (name == "angle_sums_embedding") {
      r = check_vertex_angle_sums(f, AngleMode::Embedding);
    } else if (name == "embedding") {
      r = check_embedding(f);
    } else if (name == "weights") {
      const WeightReport w = compare_weights(200, o.seed);
      r.name = "weights";
      r.pass = w.simplicial_violations == 0;
      r.residual = w.simplicial_violations;
      r.witness = w.first_cotangent_witness;
      r.note = std::to_string(w.cotangent_violations) + " cotangent violations, " +
               std::to_string(w.skipped) + " skipped of " +
               std::to_string(w.instances);
    } else {
      throw std::runtime_error("unknown check " + name);
    }
    pass &= r.pass;
    checks.push_back(check_to_json(r));
  }

  json report;
  report["checks"] = std::move(checks);
  report["pass"] = pass;
  return emit(m, std::move(report), pass ? 0 : 1, out);
}

int cmd_export_obj(RunManifest m, const Opts& o, std::ostream& out) {
  ComplexPtr K = load_complex(m, o.complex_path);
  TargetPtr T = load_target(m, o.target_path);
  const SimplicialMap f = load_map(m, o.map_path, K, T);
  const std::string obj = obj_export(f);
  if (o.output.empty()) {
    out << obj;
  } else {
    m.inputs.emplace_back("output", o.output);
    save_text(obj, o.output);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  Opts o;
  CLI::App app{"simplicial energy and harmonic map toolkit"};
  app.require_subcommand(1);

  auto add_complex = [&](CLI::App* sub) {
    sub->add_option("--complex", o.complex_path, "complex JSON")->required();
  };
  auto add_metric = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--metric", o.metric_path, "metric JSON");
    if (required) opt->required();
  };
  auto add_target = [&](CLI::App* sub) {
    sub->add_option("--target", o.target_path, "target JSON")->required();
  };
  auto add_map = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--map", o.map_path, "map JSON");
    if (required) opt->required();
  };
  auto add_flow_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "gradient sup-norm tolerance");
    sub->add_option("--max-iters", o.max_iters, "iteration cap");
    sub->add_option("--fixed", o.fixed, "comma list of pinned vertices")
        ->delimiter(',');
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", o.out_dir, "directory for report and artifacts");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a metric against a complex");
  add_complex(validate);
  add_metric(validate, true);
  add_out(validate);

  CLI::App* energy = app.add_subcommand("energy", "report energies, areas, stretch factors");
  add_complex(energy);
  add_metric(energy, true);
  add_target(energy);
  add_map(energy, true);
  add_out(energy);

  CLI::App* flow = app.add_subcommand("flow", "flow a map to its harmonic representative");
  add_complex(flow);
  add_metric(flow, false);
  add_target(flow);
  add_map(flow, false);
  add_flow_flags(flow);
  flow->add_option("--family", o.family, "glob of map files flowed together");
  flow->add_flag("--warm-start", o.warm_start,
                 "seed each family sample with the previous result");
  add_out(flow);

  CLI::App* optimize =
      app.add_subcommand("optimize-metric", "minimize simplicial area over domain metrics");
  add_complex(optimize);
  add_target(optimize);
  add_map(optimize, true);
  add_flow_flags(optimize);
  optimize->add_option("--outer-tol", o.outer_tol, "area decrease cutoff");
  add_out(optimize);

  CLI::App* verify = app.add_subcommand("verify", "run structural checks on a harmonic map");
  add_complex(verify);
  add_metric(verify, true);
  add_target(verify);
  add_map(verify, true);
  verify->add_option("--checks", o.checks, "comma list; default: applicable set");
  verify->add_option("--seed", o.seed, "seed for randomized checks");
  add_out(verify);

  CLI::App* export_obj = app.add_subcommand("export-obj", "write the image mesh as Wavefront OBJ");
  add_complex(export_obj);
  add_target(export_obj);
  add_map(export_obj, true);
  export_obj->add_option("--output", o.output, "OBJ path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  RunManifest m;
  CLI::App* sub = app.get_subcommands().front();
  m.subcommand = sub->get_name();
  m.out_dir = o.out_dir;
  m.seed = o.seed;
  note_overrides(m, *sub, o);
  if (!m.out_dir.empty()) std::filesystem::create_directories(m.out_dir);

  try {
    if (sub == validate) return cmd_validate(std::move(m), o, out);
    if (sub == energy) return cmd_energy(std::move(m), o, out);
    if (sub == flow) return cmd_flow(std::move(m), o, out);
    if (sub == optimize) return cmd_optimize_metric(std::move(m), o, out);
    if (sub == verify) return cmd_verify(std::move(m), o, out);
    if (sub == export_obj) return cmd_export_obj(std::move(m), o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << "error: unhandled subcommand\n";
  return 2;
}

}  // namespace simharm
