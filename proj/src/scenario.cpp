// SPDX-License-Identifier: Apache-2.0

#include "cbmor/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cbmor/errors.hpp"

namespace cbmor {

namespace {

using nlohmann::json;

/// Collects config violations so a single run reports all of them.
struct Validator {
  std::vector<std::string> problems;

  void fail(const std::string& where, const std::string& what) {
    problems.push_back(where + ": " + what);
  }

  void expect_keys(const json& obj, const std::string& where,
                   const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      fail(where, "expected an object");
      return;
    }
    for (const auto& [key, value] : obj.items()) {
      (void)value;
      if (!allowed.count(key)) fail(where, "unknown key `" + key + "`");
    }
  }

  void finish() {
    if (problems.empty()) return;
    std::ostringstream os;
    os << "config errors:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw ConfigError(os.str());
  }
};

int parse_component(const json& v, const std::string& where, Validator& val) {
  const std::string s = v.is_string() ? v.get<std::string>() : "";
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "both") return -1;
  val.fail(where, "component must be \"x\", \"y\" or \"both\"");
  return 0;
}

Eigen::Vector2d parse_vec2(const json& v, const std::string& where,
                           Validator& val) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    val.fail(where, "expected [x, y]");
    return Eigen::Vector2d::Zero();
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::array<double, 2> parse_range(const json& v, const std::string& where,
                                  Validator& val) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    val.fail(where, "expected [lo, hi]");
    return {0.0, 1.0};
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

int Scenario::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i].name == name) return static_cast<int>(i);
  throw ConfigError("unknown substructure `" + name + "`");
}

CoupledScenario Scenario::build() const {
  CoupledScenario scenario;
  for (const auto& sub : subs) {
    validate_mesh(sub.mesh);
    scenario.meshes.push_back(sub.mesh);
    scenario.materials.push_back(sub.material);
  }
  scenario.loads = loads;
  scenario.layout = build_layout(scenario.meshes, interfaces);
  for (const auto& itf : scenario.layout.interfaces)
    scenario.mortar.push_back(assemble_mortar(scenario.meshes[itf.slave_sub],
                                              scenario.meshes[itf.master_sub],
                                              itf));
  scenario.load_factors.resize(load_steps);
  for (int k = 0; k < load_steps; ++k)
    scenario.load_factors[k] = static_cast<double>(k + 1) / load_steps;
  scenario.options = solver;
  scenario.curve = curve;
  return scenario;
}

Scenario parse_scenario(const std::string& json_text,
                        const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  Validator val;
  Scenario sc;

  val.expect_keys(root, "config",
                  {"substructures", "interfaces", "dirichlet", "neumann",
                   "body_force", "model", "load_steps", "solver", "curve",
                   "rom", "penalty", "sampler", "seed", "output"});
  if (!val.problems.empty()) val.finish();

  // Substructures.
  if (!root.contains("substructures") || !root["substructures"].is_array() ||
      root["substructures"].empty()) {
    val.fail("config", "needs a non-empty `substructures` array");
  } else {
    for (std::size_t i = 0; i < root["substructures"].size(); ++i) {
      const json& js = root["substructures"][i];
      const std::string where = "substructures[" + std::to_string(i) + "]";
      val.expect_keys(js, where, {"name", "mesh", "material"});
      Scenario::Substructure sub;
      if (js.contains("name") && js["name"].is_string())
        sub.name = js["name"].get<std::string>();
      else
        val.fail(where, "needs a string `name`");

      if (js.contains("mesh") && js["mesh"].is_object()) {
        const json& jm = js["mesh"];
        if (jm.contains("file")) {
          val.expect_keys(jm, where + ".mesh", {"file"});
          try {
            sub.mesh = read_mesh_file(
                resolve(base_dir, jm["file"].get<std::string>()));
          } catch (const Error& e) {
            val.fail(where + ".mesh", e.what());
          }
        } else {
          val.expect_keys(jm, where + ".mesh",
                          {"nx", "ny", "lx", "ly", "origin"});
          try {
            const Eigen::Vector2d origin =
                jm.contains("origin")
                    ? parse_vec2(jm["origin"], where + ".mesh.origin", val)
                    : Eigen::Vector2d::Zero();
            sub.mesh = generate_structured_quad_mesh(
                jm.at("nx").get<int>(), jm.at("ny").get<int>(),
                jm.at("lx").get<double>(), jm.at("ly").get<double>(), origin);
          } catch (const std::exception& e) {
            val.fail(where + ".mesh", e.what());
          }
        }
      } else {
        val.fail(where, "needs a `mesh` object");
      }

      if (js.contains("material") && js["material"].is_object()) {
        const json& jm = js["material"];
        try {
          if (jm.contains("E") || jm.contains("nu")) {
            val.expect_keys(jm, where + ".material", {"E", "nu"});
            sub.material = NeoHookeMaterial::from_youngs_poisson(
                jm.at("E").get<double>(), jm.at("nu").get<double>());
          } else {
            val.expect_keys(jm, where + ".material", {"lambda", "mu"});
            sub.material = NeoHookeMaterial::from_lame(
                jm.at("lambda").get<double>(), jm.at("mu").get<double>());
          }
        } catch (const std::exception& e) {
          val.fail(where + ".material", e.what());
        }
      } else {
        val.fail(where, "needs a `material` object");
      }
      sc.subs.push_back(std::move(sub));
    }
  }
  sc.loads.resize(sc.subs.size());

  auto sub_index = [&](const json& v, const std::string& where) -> int {
    if (!v.is_string()) {
      val.fail(where, "expected a substructure name");
      return -1;
    }
    const std::string name = v.get<std::string>();
    for (std::size_t i = 0; i < sc.subs.size(); ++i)
      if (sc.subs[i].name == name) return static_cast<int>(i);
    val.fail(where, "unknown substructure `" + name + "`");
    return -1;
  };

  // Interfaces.
  if (root.contains("interfaces")) {
    if (!root["interfaces"].is_array()) {
      val.fail("interfaces", "expected an array");
    } else {
      for (std::size_t i = 0; i < root["interfaces"].size(); ++i) {
        const json& ji = root["interfaces"][i];
        const std::string where = "interfaces[" + std::to_string(i) + "]";
        val.expect_keys(ji, where, {"a", "edge_a", "b", "edge_b"});
        InterfaceSpec spec;
        if (ji.contains("a")) spec.sub_a = sub_index(ji["a"], where + ".a");
        if (ji.contains("b")) spec.sub_b = sub_index(ji["b"], where + ".b");
        if (ji.contains("edge_a") && ji["edge_a"].is_string())
          spec.edge_set_a = ji["edge_a"].get<std::string>();
        else
          val.fail(where, "needs string `edge_a`");
        if (ji.contains("edge_b") && ji["edge_b"].is_string())
          spec.edge_set_b = ji["edge_b"].get<std::string>();
        else
          val.fail(where, "needs string `edge_b`");
        sc.interfaces.push_back(std::move(spec));
      }
    }
  }

  // Dirichlet conditions.
  if (root.contains("dirichlet")) {
    for (std::size_t i = 0; i < root["dirichlet"].size(); ++i) {
      const json& jd = root["dirichlet"][i];
      const std::string where = "dirichlet[" + std::to_string(i) + "]";
      val.expect_keys(jd, where,
                      {"substructure", "edge", "component", "value"});
      const int s = jd.contains("substructure")
                        ? sub_index(jd["substructure"], where)
                        : -1;
      if (s < 0) continue;
      const int comp = jd.contains("component")
                           ? parse_component(jd["component"], where, val)
                           : -1;
      Eigen::Vector2d value = Eigen::Vector2d::Zero();
      if (jd.contains("value")) {
        if (jd["value"].is_number()) {
          if (comp == -1) {
            val.fail(where, "component \"both\" needs a [x, y] value");
          } else {
            value(comp) = jd["value"].get<double>();
          }
        } else {
          value = parse_vec2(jd["value"], where + ".value", val);
        }
      }
      try {
        add_edge_dirichlet(sc.loads[s].dirichlet, sc.subs[s].mesh,
                           jd.contains("edge")
                               ? jd["edge"].get<std::string>()
                               : std::string(),
                           comp, value);
      } catch (const Error& e) {
        val.fail(where, e.what());
      }
    }
  }

  // Neumann tractions.
  if (root.contains("neumann")) {
    for (std::size_t i = 0; i < root["neumann"].size(); ++i) {
      const json& jn = root["neumann"][i];
      const std::string where = "neumann[" + std::to_string(i) + "]";
      val.expect_keys(jn, where, {"substructure", "edge", "traction"});
      const int s = jn.contains("substructure")
                        ? sub_index(jn["substructure"], where)
                        : -1;
      if (s < 0) continue;
      TractionSpec spec;
      if (jn.contains("edge") && jn["edge"].is_string())
        spec.edge_set = jn["edge"].get<std::string>();
      else
        val.fail(where, "needs string `edge`");
      if (jn.contains("traction"))
        spec.traction = parse_vec2(jn["traction"], where + ".traction", val);
      sc.loads[s].tractions.push_back(std::move(spec));
    }
  }

  if (root.contains("body_force")) {
    const Eigen::Vector2d bf =
        parse_vec2(root["body_force"], "body_force", val);
    for (auto& load : sc.loads) load.body_force = bf;
  }

  if (root.contains("model")) {
    if (root["model"].is_string()) sc.model = root["model"].get<std::string>();
    if (sc.model != "fom" && sc.model != "rom" && sc.model != "penalty")
      val.fail("model", "must be \"fom\", \"rom\" or \"penalty\"");
  }

  if (root.contains("load_steps")) {
    if (root["load_steps"].is_number_integer() &&
        root["load_steps"].get<int>() >= 1)
      sc.load_steps = root["load_steps"].get<int>();
    else
      val.fail("load_steps", "must be a positive integer");
  }

  if (root.contains("solver")) {
    const json& js = root["solver"];
    val.expect_keys(js, "solver", {"tol", "max_iter", "max_halvings"});
    if (js.contains("tol")) sc.solver.tol = js["tol"].get<double>();
    if (js.contains("max_iter")) sc.solver.max_iter = js["max_iter"].get<int>();
    if (js.contains("max_halvings"))
      sc.solver.max_halvings = js["max_halvings"].get<int>();
    if (!(sc.solver.tol > 0.0)) val.fail("solver.tol", "must be positive");
  }

  if (root.contains("curve")) {
    const json& jc = root["curve"];
    val.expect_keys(jc, "curve", {"substructure", "edge", "component"});
    CurveProbe probe;
    if (jc.contains("substructure"))
      probe.sub = sub_index(jc["substructure"], "curve.substructure");
    if (jc.contains("edge") && jc["edge"].is_string())
      probe.edge_set = jc["edge"].get<std::string>();
    else
      val.fail("curve", "needs string `edge`");
    if (jc.contains("component")) {
      const int comp = parse_component(jc["component"], "curve", val);
      if (comp < 0)
        val.fail("curve", "component must be \"x\" or \"y\"");
      else
        probe.component = comp;
    }
    if (probe.sub >= 0) sc.curve = probe;
  }

  if (root.contains("rom")) {
    const json& jr = root["rom"];
    val.expect_keys(jr, "rom",
                    {"bases", "internal_modes", "interface_modes",
                     "interface_reduction"});
    Scenario::RomConfig rom;
    if (jr.contains("bases")) {
      for (std::size_t i = 0; i < jr["bases"].size(); ++i) {
        const json& jb = jr["bases"][i];
        const std::string where = "rom.bases[" + std::to_string(i) + "]";
        val.expect_keys(jb, where, {"substructure", "file"});
        const int s = jb.contains("substructure")
                          ? sub_index(jb["substructure"], where)
                          : -1;
        if (s >= 0 && jb.contains("file") && jb["file"].is_string())
          rom.basis_files.emplace_back(
              s, resolve(base_dir, jb["file"].get<std::string>()));
        else
          val.fail(where, "needs `substructure` and string `file`");
      }
    }
    if (jr.contains("internal_modes"))
      rom.internal_modes = jr["internal_modes"].get<int>();
    if (jr.contains("interface_modes"))
      rom.interface_modes = jr["interface_modes"].get<int>();
    if (jr.contains("interface_reduction"))
      rom.interface_reduction = jr["interface_reduction"].get<bool>();
    sc.rom = std::move(rom);
  }

  if (root.contains("penalty")) {
    const json& jp = root["penalty"];
    val.expect_keys(jp, "penalty", {"epsilon"});
    if (jp.contains("epsilon") && jp["epsilon"].is_number() &&
        jp["epsilon"].get<double>() > 0.0)
      sc.penalty_epsilon = jp["epsilon"].get<double>();
    else
      val.fail("penalty", "needs a positive `epsilon`");
  }

  if (root.contains("sampler")) {
    const json& js = root["sampler"];
    val.expect_keys(js, "sampler",
                    {"substructure", "n_samples", "epsilon", "load_steps",
                     "two_sided", "edges"});
    Scenario::SamplerSetup setup;
    if (js.contains("substructure"))
      setup.sampled_sub = sub_index(js["substructure"], "sampler");
    if (js.contains("n_samples"))
      setup.config.n_samples = js["n_samples"].get<int>();
    if (js.contains("epsilon"))
      setup.config.epsilon = js["epsilon"].get<double>();
    if (js.contains("load_steps"))
      setup.config.load_steps = js["load_steps"].get<int>();
    if (js.contains("two_sided"))
      setup.config.two_sided = js["two_sided"].get<bool>();
    if (!js.contains("edges") || !js["edges"].is_array() ||
        js["edges"].empty()) {
      val.fail("sampler", "needs a non-empty `edges` array");
    } else {
      for (std::size_t i = 0; i < js["edges"].size(); ++i) {
        const json& je = js["edges"][i];
        const std::string where = "sampler.edges[" + std::to_string(i) + "]";
        val.expect_keys(je, where,
                        {"substructure", "edge", "component", "translation",
                         "translation_x", "translation_y", "rotation_deg"});
        EdgeParametrization edge;
        if (je.contains("substructure"))
          edge.sub = sub_index(je["substructure"], where);
        if (je.contains("edge") && je["edge"].is_string())
          edge.edge_set = je["edge"].get<std::string>();
        else
          val.fail(where, "needs string `edge`");
        if (je.contains("component"))
          edge.component = parse_component(je["component"], where, val);
        if (je.contains("translation")) {
          const auto r = parse_range(je["translation"], where, val);
          if (edge.component == 0) edge.translation_x = r;
          else if (edge.component == 1) edge.translation_y = r;
          else val.fail(where, "component \"both\" needs translation_x/y");
        }
        if (je.contains("translation_x"))
          edge.translation_x =
              parse_range(je["translation_x"], where, val);
        if (je.contains("translation_y"))
          edge.translation_y =
              parse_range(je["translation_y"], where, val);
        if (je.contains("rotation_deg"))
          edge.rotation_deg = parse_range(je["rotation_deg"], where, val);
        else
          val.fail(where, "needs `rotation_deg`");
        setup.parametrization.push_back(std::move(edge));
      }
    }
    sc.sampler = std::move(setup);
  }

  if (root.contains("seed")) sc.seed = root["seed"].get<std::uint64_t>();
  if (root.contains("output") && root["output"].is_string())
    sc.output = resolve(base_dir, root["output"].get<std::string>());

  if (sc.model == "penalty" && !sc.penalty_epsilon)
    val.fail("config", "model \"penalty\" needs a `penalty` section");

  val.finish();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_scenario(buffer.str(),
                        std::filesystem::path(path).parent_path().string());
}

}  // namespace cbmor
