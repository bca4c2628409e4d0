#include "rayflow/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rayflow/errors.hpp"

namespace rayflow {

using nlohmann::ordered_json;

namespace {

const std::set<std::string> kCheckProperties = {
    "gs", "strong-gs", "class-n", "homogeneity", "a5", "lemma1", "equilibria-scan"};

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

Matrix parse_matrix(const ordered_json& j, const std::string& origin,
                    const std::string& key) {
  if (!j.is_array() || j.empty()) fail(origin, key + " must be a nonempty array of rows");
  const int n = static_cast<int>(j.size());
  Matrix m = Matrix::zero(n);
  for (int i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      fail(origin, key + " row " + std::to_string(i) + " must have " +
                       std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) {
      const auto& cell = row[static_cast<std::size_t>(c)];
      if (!cell.is_number()) fail(origin, key + " entries must be numbers");
      m(i, c) = cell.get<double>();
    }
  }
  return m;
}

std::vector<double> parse_vector(const ordered_json& j, const std::string& origin,
                                 const std::string& key) {
  if (!j.is_array()) fail(origin, key + " must be an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& cell : j) {
    if (!cell.is_number()) fail(origin, key + " entries must be numbers");
    v.push_back(cell.get<double>());
  }
  return v;
}

std::vector<WeightSegment> parse_schedule(const ordered_json& model,
                                          const std::string& origin) {
  std::vector<WeightSegment> schedule;
  if (model.contains("weights")) {
    schedule.push_back({0.0, parse_matrix(model["weights"], origin, "model.weights")});
  } else if (model.contains("schedule")) {
    const auto& sched = model["schedule"];
    if (!sched.is_array() || sched.empty())
      fail(origin, "model.schedule must be a nonempty array");
    for (const auto& seg : sched) {
      if (!seg.contains("t") || !seg.contains("weights"))
        fail(origin, "schedule segments need 't' and 'weights'");
      schedule.push_back({seg["t"].get<double>(),
                          parse_matrix(seg["weights"], origin, "schedule weights")});
    }
  } else {
    fail(origin, "ratio model needs 'weights' or 'schedule'");
  }
  return schedule;
}

std::vector<std::pair<int, int>> parse_edge_list(const ordered_json& j,
                                                 const std::string& origin,
                                                 const std::string& key) {
  if (!j.is_array()) fail(origin, key + " must be an array of [tail, head] pairs");
  std::vector<std::pair<int, int>> edges;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      fail(origin, key + " entries must be [tail, head] pairs");
    edges.emplace_back(pair[0].get<int>(), pair[1].get<int>());
  }
  return edges;
}

}  // namespace

namespace {
Scenario parse_scenario_json(const ordered_json& j, const std::string& origin);
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    // Recover the line for the message; the parser reports a byte offset.
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(err.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + err.what());
  }
  try {
    return parse_scenario_json(j, origin);
  } catch (const ordered_json::exception& err) {
    throw ConfigError(origin + ": " + err.what());
  }
}

namespace {

Scenario parse_scenario_json(const ordered_json& j, const std::string& origin) {
  Scenario sc;
  sc.name = j.value("name", std::string("unnamed"));

  if (j.contains("graph")) {
    const auto& jg = j["graph"];
    if (!jg.contains("vertices")) fail(origin, "graph.vertices is required");
    try {
      sc.graph.emplace(jg["vertices"].get<int>(),
                       parse_edge_list(jg.value("edges", ordered_json::array()),
                                       origin, "graph.edges"));
    } catch (const StructuralError& err) {
      fail(origin, std::string("graph: ") + err.what());
    }
  }

  if (!j.contains("model")) fail(origin, "model section is required");
  const auto& jm = j["model"];
  sc.model_kind = jm.value("kind", std::string());
  try {
    if (sc.model_kind == "linear") {
      sc.model = std::make_shared<LinearModel>(
          parse_matrix(jm.at("a"), origin, "model.a"),
          parse_vector(jm.at("b"), origin, "model.b"), sc.name + ":linear");
    } else if (sc.model_kind == "ratio") {
      sc.model = std::make_shared<RatioConsensusModel>(parse_schedule(jm, origin),
                                                       sc.name + ":ratio");
    } else if (sc.model_kind == "laplacian") {
      auto lap = std::make_shared<LaplacianModel>(
          parse_matrix(jm.at("adjacency"), origin, "model.adjacency"),
          sc.name + ":laplacian");
      sc.laplacian_symmetric = lap->symmetric();
      sc.model = lap;
    } else if (sc.model_kind == "composite") {
      if (!jm.contains("vertices")) fail(origin, "composite model needs 'vertices'");
      auto edge_model = std::make_shared<RatioConsensusModel>(
          parse_schedule(jm, origin), sc.name + ":composite-edges");
      const auto coupling =
          parse_edge_list(jm.at("edges"), origin, "model.edges");
      auto composite = std::make_shared<CompositeModel>(
          jm["vertices"].get<int>(), coupling, edge_model, sc.name + ":composite");
      sc.vertex_block = composite->vertex_count();
      sc.model = composite;
    } else {
      fail(origin, "model.kind must be linear, ratio, laplacian or composite");
    }
  } catch (const ordered_json::exception& err) {
    fail(origin, std::string("model: ") + err.what());
  } catch (const StructuralError& err) {
    fail(origin, std::string("model: ") + err.what());
  }

  // initial state: flat array, or {v: [...], e: [...]} for composite
  if (!j.contains("initial")) fail(origin, "initial state is required");
  if (j["initial"].is_object()) {
    if (sc.model_kind != "composite")
      fail(origin, "split initial {v, e} is only for composite models");
    sc.initial = parse_vector(j["initial"].at("v"), origin, "initial.v");
    const auto e = parse_vector(j["initial"].at("e"), origin, "initial.e");
    sc.initial.insert(sc.initial.end(), e.begin(), e.end());
  } else {
    sc.initial = parse_vector(j["initial"], origin, "initial");
  }
  if (static_cast<int>(sc.initial.size()) != sc.model->dimension())
    fail(origin, "initial state has " + std::to_string(sc.initial.size()) +
                     " components, model expects " +
                     std::to_string(sc.model->dimension()));

  // dimension consistency with the graph section
  if (sc.graph) {
    const int m = sc.graph->edge_count();
    if (sc.model_kind == "linear" || sc.model_kind == "ratio") {
      if (sc.model->dimension() != m)
        fail(origin, "graph has " + std::to_string(m) + " edges but the model is " +
                         std::to_string(sc.model->dimension()) + "-dimensional");
      // the initial densities are the graph's weights, in canonical order
      try {
        sc.graph = sc.graph->with_weights(sc.initial);
      } catch (const std::exception& err) {
        fail(origin, std::string("initial weights: ") + err.what());
      }
    } else if (sc.model_kind == "laplacian") {
      if (sc.model->dimension() != sc.graph->vertex_count())
        fail(origin, "laplacian dimension must equal the graph vertex count");
    }
  }

  if (j.contains("integrator")) {
    const auto& ji = j["integrator"];
    sc.integrator.step = ji.value("h", sc.integrator.step);
    sc.integrator.t0 = ji.value("t0", sc.integrator.t0);
    sc.integrator.t_end = ji.value("t_end", sc.integrator.t_end);
    sc.integrator.sample_every = ji.value("sample_every", sc.integrator.sample_every);
    sc.integrator.refine = ji.value("refine", sc.integrator.refine);
  }
  if (!(sc.integrator.step > 0.0)) fail(origin, "integrator.h must be positive");
  if (!(sc.integrator.t_end > sc.integrator.t0))
    fail(origin, "integrator.t_end must exceed t0");
  if (sc.integrator.sample_every < 1)
    fail(origin, "integrator.sample_every must be at least 1");

  if (j.contains("analyses")) {
    const auto& ja = j["analyses"];
    sc.analyses.positivity = ja.value("positivity", false);
    sc.analyses.box = ja.value("box", false);
    sc.analyses.lyapunov = ja.value("lyapunov", false);
    if (ja.contains("dini")) {
      if (ja["dini"].is_object())
        sc.analyses.dini_c_max = ja["dini"].value("c_max", 5.0);
      else if (ja["dini"].get<bool>())
        sc.analyses.dini_c_max = 5.0;
    }
    if (ja.contains("consensus")) {
      if (ja["consensus"].is_object())
        sc.analyses.consensus_epsilon = ja["consensus"].value("epsilon", 1e-6);
      else
        sc.analyses.consensus_epsilon = ja["consensus"].get<double>();
      if (!(*sc.analyses.consensus_epsilon > 0.0))
        fail(origin, "consensus epsilon must be positive");
    }
    if (ja.contains("checks")) {
      const auto& jc = ja["checks"];
      ChecksRequest req;
      for (const auto& p : jc.value("properties", ordered_json::array()))
        req.properties.push_back(p.get<std::string>());
      req.samples = jc.value("samples", req.samples);
      req.seed = jc.value("seed", req.seed);
      req.tol = jc.value("tol", req.tol);
      for (const auto& p : req.properties)
        if (!kCheckProperties.contains(p))
          fail(origin, "unknown check property '" + p + "'");
      sc.analyses.checks = std::move(req);
    }
  }

  // claims gating: requesting an analysis outside the model's claims is a
  // validation error, not a run failure
  const ClassSet claims = sc.model->claimed_classes();
  if (sc.analyses.dini_c_max &&
      !(claims.has(ModelClass::RayContracting) && claims.has(ModelClass::ScaleInvariant) &&
        claims.has(ModelClass::StrongGrossSubstitute)))
    fail(origin, "dini requires classes {A5,H,strong-GS}");
  if (sc.analyses.box && !claims.has(ModelClass::RayContracting))
    fail(origin, "box requires the ray-contraction (A5) claim");
  if (sc.analyses.positivity && sc.model->domain() == Domain::Orthant &&
      !claims.has(ModelClass::BoundaryNonnegative))
    fail(origin,
         "positivity monitoring requires the class-N claim (or an open-cone model)");

  if (j.contains("randomize")) {
    const auto& jr = j["randomize"];
    sc.randomize.enabled = true;
    sc.randomize.lo = jr.value("lo", sc.randomize.lo);
    sc.randomize.hi = jr.value("hi", sc.randomize.hi);
    if (!(sc.randomize.lo > 0.0) || !(sc.randomize.hi > sc.randomize.lo))
      fail(origin, "randomize bounds must satisfy 0 < lo < hi");
  }
  return sc;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Named models and demos
// ---------------------------------------------------------------------------

namespace {

Matrix all_ones_offdiag(int m, double w = 1.0) {
  Matrix mat = Matrix::zero(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) mat(i, j) = w;
  return mat;
}

Matrix ring_weights(int m, double w, bool reversed = false) {
  Matrix mat = Matrix::zero(m);
  for (int i = 0; i < m; ++i) {
    const int j = reversed ? (i + m - 1) % m : (i + 1) % m;
    mat(i, j) = w;
  }
  return mat;
}

const Matrix kDemoA{2, {-2.0, 1.0, 1.0, -2.0}};
const std::vector<double> kDemoB{1.0, 1.0};

}  // namespace

namespace {

// "n<K>" -> K when K is all digits in [2, 64], else 0
int parse_sized_name(const std::string& which) {
  if (which.size() < 2 || which.front() != 'n') return 0;
  int value = 0;
  for (std::size_t i = 1; i < which.size(); ++i) {
    if (which[i] < '0' || which[i] > '9') return 0;
    value = value * 10 + (which[i] - '0');
    if (value > 64) return 0;
  }
  return value >= 2 ? value : 0;
}

}  // namespace

ModelPtr make_named_model(const std::string& spec) {
  if (!spec.empty() && spec.front() == '@')
    return load_scenario(spec.substr(1)).model;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string which = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "linear") {
    if (which == "demo")
      return LinearModel::metzler(kDemoA, kDemoB, "linear:demo");
    if (which == "neg-offdiag")
      return std::make_shared<LinearModel>(Matrix{2, {-2.0, -1.0, 1.0, -2.0}},
                                           kDemoB, "linear:neg-offdiag");
  } else if (kind == "ratio") {
    if (which == "two-block")
      return RatioConsensusModel::constant(
          Matrix{3, {0, 1, 0, 1, 0, 0, 0, 0, 0}}, "ratio:two-block");
    if (const int m = parse_sized_name(which))
      return RatioConsensusModel::constant(all_ones_offdiag(m), spec);
  } else if (kind == "laplacian") {
    if (const int n = parse_sized_name(which))
      return std::make_shared<LaplacianModel>(all_ones_offdiag(n), spec);
  }
  throw ConfigError("unknown model spec '" + spec +
                    "'; try linear:demo, linear:neg-offdiag, ratio:n<K>, "
                    "ratio:two-block, laplacian:n<K> or @scenario.json");
}

std::vector<std::string> demo_names() {
  return {"two-route-linear", "ratio-n2", "ratio-n10-timevarying",
          "laplacian-vs-ratio", "composite-ve"};
}

std::string demo_scenario_text(const std::string& name) {
  ordered_json j;
  j["name"] = name;
  if (name == "two-route-linear") {
    j["graph"] = {{"vertices", 2}, {"edges", {{0, 1}, {0, 1}}}};
    j["model"] = {{"kind", "linear"},
                  {"a", {{-2.0, 1.0}, {1.0, -2.0}}},
                  {"b", {1.0, 1.0}}};
    j["initial"] = {3.0, 1.0};
    j["integrator"] = {{"h", 1e-3}, {"t_end", 20.0}, {"sample_every", 10}, {"refine", true}};
    j["analyses"] = {{"positivity", true},
                     {"consensus", 1e-6},
                     {"checks", {{"properties", {"gs", "class-n"}}, {"samples", 2000}}}};
  } else if (name == "ratio-n2") {
    j["graph"] = {{"vertices", 2}, {"edges", {{0, 1}, {0, 1}}}};
    j["model"] = {{"kind", "ratio"}, {"weights", {{0.0, 1.0}, {1.0, 0.0}}}};
    j["initial"] = {3.0, 1.0};
    j["integrator"] = {{"h", 1e-3}, {"t_end", 20.0}, {"sample_every", 10}};
    j["analyses"] = {{"positivity", true},
                     {"box", true},
                     {"lyapunov", true},
                     {"dini", {{"c_max", 5.0}}},
                     {"consensus", 1e-6},
                     {"checks",
                      {{"properties", {"homogeneity", "strong-gs", "a5"}},
                       {"samples", 2000}}}};
  } else if (name == "ratio-n10-timevarying") {
    const int m = 10;
    ordered_json schedule = ordered_json::array();
    auto seg = [](double t, const Matrix& w) {
      ordered_json rows = ordered_json::array();
      for (int i = 0; i < w.n; ++i) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < w.n; ++c) row.push_back(w(i, c));
        rows.push_back(row);
      }
      return ordered_json{{"t", t}, {"weights", rows}};
    };
    schedule.push_back(seg(0.0, ring_weights(m, 5.0)));
    schedule.push_back(seg(10.0, all_ones_offdiag(m, 1.5)));
    schedule.push_back(seg(20.0, ring_weights(m, 5.0, true)));
    j["model"] = {{"kind", "ratio"}, {"schedule", schedule}};
    j["initial"] = {0.5, 4.0, 1.2, 2.5, 0.8, 3.1, 1.9, 0.6, 4.8, 2.2};
    j["integrator"] = {{"h", 1e-3}, {"t_end", 30.0}, {"sample_every", 10}};
    j["analyses"] = {{"box", true}, {"lyapunov", true}, {"consensus", 1e-6}};
  } else if (name == "composite-ve") {
    j["model"] = {{"kind", "composite"},
                  {"vertices", 2},
                  {"edges", {{0, 1}, {1, 0}}},
                  {"weights", {{0.0, 1.0}, {1.0, 0.0}}}};
    j["initial"] = {{"v", {1.0, 3.0}}, {"e", {2.0, 0.5}}};
    j["integrator"] = {{"h", 1e-3}, {"t_end", 30.0}, {"sample_every", 10}};
    j["analyses"] = {{"positivity", true}, {"consensus", 1e-6}};
  } else {
    throw ConfigError("unknown demo '" + name + "'");
  }
  return j.dump(2) + "\n";
}

}  // namespace rayflow
