#include "seqrecon/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace seqrecon {
namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error("config: " + where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw Error("config: unknown key '" + key + "' in " + where);
}

std::vector<double> number_or_list(const json& j) {
  if (j.is_number()) return {j.get<double>()};
  return j.get<std::vector<double>>();
}

Shape parse_shape(const json& j, const std::string& where) {
  check_keys(j, {"type", "center", "axes", "angle_deg", "vertices", "value"}, where);
  Shape s;
  const auto type = j.at("type").get<std::string>();
  s.value = j.value("value", 0.0);
  if (type == "ellipse") {
    s.kind = Shape::Kind::ellipse;
    const auto c = j.at("center").get<std::array<double, 2>>();
    const auto a = j.at("axes").get<std::array<double, 2>>();
    s.cx = c[0], s.cy = c[1], s.a = a[0], s.b = a[1];
    s.angle_deg = j.value("angle_deg", 0.0);
  } else if (type == "polygon") {
    s.kind = Shape::Kind::polygon;
    s.vertices = j.at("vertices").get<std::vector<std::array<double, 2>>>();
  } else {
    throw Error("config: " + where + " has unknown shape type '" + type + "'");
  }
  return s;
}

Occlusion parse_occlusion(const json& j, const std::string& where) {
  check_keys(j, {"frame", "shape", "box", "fill", "value", "stddev"}, where);
  Occlusion o;
  const auto shape = j.value("shape", std::string("rectangle"));
  if (shape == "rectangle") o.shape = Occlusion::Shape::rectangle;
  else if (shape == "ellipse") o.shape = Occlusion::Shape::ellipse;
  else throw Error("config: " + where + " has unknown shape '" + shape + "'");
  const auto box = j.at("box").get<std::array<double, 4>>();
  o.x0 = box[0], o.y0 = box[1], o.x1 = box[2], o.y1 = box[3];
  const auto fill = j.value("fill", std::string("constant"));
  if (fill == "constant") o.fill = Occlusion::Fill::constant;
  else if (fill == "gaussian") o.fill = Occlusion::Fill::gaussian;
  else throw Error("config: " + where + " has unknown fill '" + fill + "'");
  o.value = j.value("value", 0.0);
  o.stddev = j.value("stddev", 0.0);
  return o;
}

SceneSpec parse_scene(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "default") return default_scene();
    throw Error("config: unknown scene preset '" + j.get<std::string>() + "'");
  }
  check_keys(j, {"frames", "background", "dynamic", "occlusions", "points"}, "scene");
  SceneSpec s;
  s.frames = j.value("frames", 6);
  s.background.clear();
  s.dynamic.clear();
  s.occlusions.assign(static_cast<size_t>(s.frames), {});
  s.points.clear();
  if (j.contains("background"))
    for (size_t i = 0; i < j["background"].size(); ++i)
      s.background.push_back(parse_shape(j["background"][i], "background[" + std::to_string(i) + "]"));
  if (j.contains("dynamic")) {
    for (size_t i = 0; i < j["dynamic"].size(); ++i) {
      const auto& d = j["dynamic"][i];
      const std::string where = "dynamic[" + std::to_string(i) + "]";
      check_keys(d, {"name", "shape", "velocity", "rotation_deg", "first_frame", "last_frame"}, where);
      DynamicObject obj;
      obj.name = d.value("name", "object" + std::to_string(i + 1));
      obj.shape = parse_shape(d.at("shape"), where + ".shape");
      if (d.contains("velocity")) obj.velocity = d["velocity"].get<std::array<double, 2>>();
      obj.rotation_deg = d.value("rotation_deg", 0.0);
      obj.first_frame = d.value("first_frame", 1);
      obj.last_frame = d.value("last_frame", s.frames);
      s.dynamic.push_back(std::move(obj));
    }
  }
  if (j.contains("occlusions")) {
    for (size_t i = 0; i < j["occlusions"].size(); ++i) {
      const auto& o = j["occlusions"][i];
      const int frame = o.at("frame").get<int>();
      if (frame < 1 || frame > s.frames)
        throw Error("config: occlusions[" + std::to_string(i) + "] frame out of range");
      s.occlusions[static_cast<size_t>(frame) - 1].push_back(
          parse_occlusion(o, "occlusions[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("points")) {
    for (const auto& p : j["points"]) {
      check_keys(p, {"name", "x", "y", "frame"}, "points");
      s.points.push_back({p.at("name").get<std::string>(), p.at("x").get<double>(),
                          p.at("y").get<double>(), p.value("frame", 1)});
    }
  }
  return s;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  try {
    check_keys(j, {"N", "J", "seed", "oversample", "bands", "snr_db", "noise_sigma", "snr_calibration",
                   "scene", "edges", "weights", "change", "solver", "study"},
               "config");
    RunConfig cfg;
    if (j.contains("scene")) cfg.scene = parse_scene(j["scene"]);
    const int N = j.value("N", 64);
    if (j.contains("J")) {
      const int J = j["J"].get<int>();
      if (J != cfg.scene.frames) {
        cfg.scene.frames = J;
        cfg.scene.occlusions.resize(static_cast<size_t>(J));
      }
    }
    cfg.grid = GridSpec(N, cfg.scene.frames);

    auto& sim = cfg.simulation;
    sim.grid = cfg.grid;
    sim.oversample = j.value("oversample", 4);
    sim.noise.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("bands")) {
      const auto& b = j["bands"];
      check_keys(b, {"enabled", "rule"}, "bands");
      sim.apply_bands = b.value("enabled", true);
      const auto rule = b.value("rule", std::string("cross"));
      if (rule == "cross") sim.band_rule = BandRule::cross;
      else if (rule == "square_annulus") sim.band_rule = BandRule::square_annulus;
      else throw Error("config: unknown band rule '" + rule + "'");
    }
    if (j.contains("snr_db") && j.contains("noise_sigma"))
      throw Error("config: give either snr_db or noise_sigma, not both");
    if (j.contains("snr_db")) sim.snr_db = number_or_list(j["snr_db"]);
    if (j.contains("noise_sigma")) sim.noise.sigma = number_or_list(j["noise_sigma"]);
    const auto cal = j.value("snr_calibration", std::string("mean_magnitude"));
    if (cal == "mean_magnitude") sim.calibration = SnrMean::mean_magnitude;
    else if (cal == "complex_mean") sim.calibration = SnrMean::complex_mean;
    else throw Error("config: unknown snr_calibration '" + cal + "'");

    auto& pl = cfg.pipeline;
    if (j.contains("edges")) {
      const auto& e = j["edges"];
      check_keys(e, {"rotations", "epsilon_pixels", "factor"}, "edges");
      pl.rotations = e.value("rotations", 10);
      pl.epsilon_pixels = e.value("epsilon_pixels", 3.0);
      const auto f = e.value("factor", std::string("gaussian"));
      if (f != "gaussian") pl.factor = ConcentrationFactor::parse(f);
    }
    if (j.contains("weights")) {
      check_keys(j["weights"], {"tau_w"}, "weights");
      if (j["weights"].contains("tau_w") && !j["weights"]["tau_w"].is_null())
        pl.tau_w = j["weights"]["tau_w"].get<double>();
    }
    if (j.contains("change")) {
      const auto& c = j["change"];
      check_keys(c, {"d", "tau_diff", "tau_u", "remove_enclosing", "enclosing_threshold"}, "change");
      pl.change.d = c.value("d", 3);
      pl.change.tau_diff = c.value("tau_diff", 1e-3);
      if (c.contains("tau_u") && !c["tau_u"].is_null()) pl.change.tau_u = c["tau_u"].get<double>();
      pl.change.remove_enclosing = c.value("remove_enclosing", false);
      pl.change.enclosing_threshold = c.value("enclosing_threshold", 0.0);
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      check_keys(s, {"beta", "rho", "max_iter", "tol_primal", "tol_dual", "cg_tol", "cg_max_iter",
                     "k_max", "mu_seed", "adapt_rho", "boundary", "relaxation", "accelerate",
                     "fidelity_scale"},
                 "solver");
      pl.beta = s.value("beta", 0.5);
      pl.admm.rho = s.value("rho", AdmmParams{}.rho);
      pl.admm.max_iter = s.value("max_iter", 500);
      pl.admm.tol_primal = s.value("tol_primal", 1e-4);
      pl.admm.tol_dual = s.value("tol_dual", 1e-4);
      pl.admm.cg_tol = s.value("cg_tol", 1e-10);
      pl.admm.cg_max_iter = s.value("cg_max_iter", 500);
      pl.admm.adapt_rho = s.value("adapt_rho", true);
      const auto b = s.value("boundary", std::string("periodic"));
      if (b == "periodic") pl.admm.boundary = TVOperator::Boundary::periodic;
      else if (b == "replicate") pl.admm.boundary = TVOperator::Boundary::replicate;
      else throw Error("config: unknown boundary '" + b + "'");
      pl.admm.relaxation = s.value("relaxation", 1.0);
      pl.admm.accelerate = s.value("accelerate", true);
      const auto fs = s.value("fidelity_scale", std::string("unitary"));
      if (fs == "unitary") pl.admm.scale = FidelityScale::unitary;
      else if (fs == "coefficient") pl.admm.scale = FidelityScale::coefficient;
      else throw Error("config: unknown fidelity_scale '" + fs + "'");
      pl.k_max = s.value("k_max", 10);
      pl.mu_seed = s.value("mu_seed", std::uint64_t{1});
    }

    auto& st = cfg.study;
    if (j.contains("study")) {
      const auto& s = j["study"];
      check_keys(s, {"half_bandwidths", "snr_values", "snr_db", "N", "methods", "smooth_radius"}, "study");
      if (s.contains("half_bandwidths")) st.half_bandwidths = s["half_bandwidths"].get<std::vector<int>>();
      if (s.contains("snr_values")) st.snr_values = s["snr_values"].get<std::vector<double>>();
      st.resolution_snr_db = s.value("snr_db", 2.0);
      st.snr_half_bandwidth = s.value("N", 64);
      if (s.contains("methods")) st.experiment.methods = s["methods"].get<std::vector<std::string>>();
      st.experiment.smooth_radius = s.value("smooth_radius", 2);
    }
    st.experiment.scene = cfg.scene;
    st.experiment.oversample = sim.oversample;
    st.experiment.band_rule = sim.band_rule;
    st.experiment.apply_bands = sim.apply_bands;
    st.experiment.seed = sim.noise.seed;
    st.experiment.pipeline = pl;

    cfg.scene.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace seqrecon
