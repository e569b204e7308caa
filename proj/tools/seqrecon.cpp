// seqrecon: file-based front end for the reconstruction pipeline.
//
// Stages exchange .sqr arrays plus a meta.json per directory:
//   simulate   -> frame_j.sqr (c128, centered), mask_j.sqr, truth_j.sqr, occluded_j.sqr
//   edges      -> edges_j.sqr (mean |H|), edges_j_signed.sqr, edges_j_rot{m}.sqr
//   weights    -> weights_j.sqr
//   changemask -> cmask_j.sqr for pairs (j, j+1), report.json
//   solve      -> recon_j.sqr, residuals.csv, report.json
// Exit codes: 0 success, 1 stage failure, 2 usage error or missing input.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqrecon/config.hpp"
#include "seqrecon/sqr_io.hpp"
#include "seqrecon/study.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace seqrecon;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// key=value records on stderr, one per line.
class Log {
 public:
  explicit Log(std::string stage) : stage_(std::move(stage)) {}
  template <class... Kv>
  void operator()(const std::string& event, const Kv&... kv) const {
    std::ostringstream os;
    os << "seqrecon stage=" << stage_ << " event=" << event;
    ((os << ' ' << kv), ...);
    std::cerr << os.str() << '\n';
  }

 private:
  std::string stage_;
};

template <class T>
std::string kv(const std::string& k, const T& v) {
  std::ostringstream os;
  os << k << '=' << v;
  return os.str();
}

std::string indexed(const std::string& stem, int j, const std::string& suffix = "") {
  return stem + "_" + std::to_string(j) + suffix + ".sqr";
}

void require_dir(const fs::path& dir, const std::string& what) {
  if (dir.empty() || !fs::is_directory(dir))
    throw UsageError(what + " directory '" + dir.string() + "' does not exist");
}

void require_file(const fs::path& file, const std::string& what) {
  if (file.empty() || !fs::is_regular_file(file))
    throw UsageError(what + " '" + file.string() + "' does not exist");
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot read " + path.string());
  return json::parse(is);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
  if (!os) throw Error("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

struct LoadedConfig {
  RunConfig cfg;
  std::string hash = "default";
};

LoadedConfig load(const std::string& path) {
  LoadedConfig out;
  if (path.empty()) return out;
  require_file(path, "config file");
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  out.cfg = parse_config(ss.str());
  out.hash = config_hash(ss.str());
  return out;
}

// 8-bit binary PGM, linearly scaled to the array range.
void write_preview(const fs::path& path, const RealImage& a) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  os << "P5\n" << a.cols() << ' ' << a.rows() << "\n255\n";
  const double lo = a.minCoeff(), hi = a.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (a.data()[i] - lo) / span))));
}

// ---- frame directories ------------------------------------------------------

struct FrameDir {
  json meta;
  std::vector<FourierFrame> frames;
};

FrameDir read_frames(const fs::path& dir) {
  require_dir(dir, "input");
  require_file(dir / "meta.json", "frame metadata");
  FrameDir out;
  out.meta = read_json(dir / "meta.json");
  const int n = out.meta.at("N").get<int>(), frames = out.meta.at("J").get<int>();
  const auto sigma = out.meta.value("noise_sigma", std::vector<double>(frames, 0.0));
  const GridSpec grid(n, frames);
  for (int j = 1; j <= frames; ++j) {
    FourierFrame f;
    f.grid = grid;
    f.index = j;
    f.coeffs = sqr::read_complex(dir / indexed("frame", j));
    f.available = sqr::read_mask(dir / indexed("mask", j));
    f.noise_sigma = sigma.at(static_cast<size_t>(j - 1));
    f.check();
    out.frames.push_back(std::move(f));
  }
  return out;
}

struct EdgeDir {
  json meta;
  std::vector<EdgeMap> maps;
};

EdgeDir read_edges(const fs::path& dir) {
  require_dir(dir, "edges");
  require_file(dir / "meta.json", "edge metadata");
  EdgeDir out;
  out.meta = read_json(dir / "meta.json");
  const int frames = out.meta.at("J").get<int>();
  const auto angles = out.meta.at("angles").get<std::vector<double>>();
  for (int j = 1; j <= frames; ++j) {
    EdgeMap m;
    m.angles = angles;
    m.averaged = sqr::read_real(dir / indexed("edges", j));
    m.signed_average = sqr::read_real(dir / indexed("edges", j, "_signed"));
    for (size_t r = 1; r <= angles.size(); ++r)
      m.per_rotation.push_back(sqr::read_real(dir / indexed("edges", j, "_rot" + std::to_string(r))));
    out.maps.push_back(std::move(m));
  }
  return out;
}

// ---- stages -----------------------------------------------------------------

json simulate_stage(const RunConfig& cfg, const std::string& hash, const fs::path& out,
                    std::vector<FourierFrame>* frames_out = nullptr) {
  Log log("simulate");
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out);
  auto frames = acquire(cfg.scene, cfg.simulation);
  const GridSpec& grid = cfg.simulation.grid;
  json meta{{"stage", "simulate"}, {"config_hash", hash}, {"N", grid.half_bandwidth},
            {"J", static_cast<int>(frames.size())}, {"seed", cfg.simulation.noise.seed}};
  std::vector<double> sigma, xi;
  for (const auto& f : frames) {
    const int j = f.index;
    const ImageGrid truth = rasterize(cfg.scene, j, grid);
    sqr::write(out / indexed("frame", j), f.coeffs);
    sqr::write(out / indexed("mask", j), f.available);
    sqr::write(out / indexed("truth", j), truth.values);
    sqr::write(out / indexed("occluded", j), occluded_region(cfg.scene, j, grid.side()));
    sigma.push_back(f.noise_sigma);
    xi.push_back(tv_spread(truth.values));
  }
  meta["noise_sigma"] = sigma;
  meta["xi"] = xi;
  write_json(out / "meta.json", meta);
  log("done", kv("frames", frames.size()), kv("N", grid.half_bandwidth), kv("seconds", seconds_since(t0)));
  if (frames_out) *frames_out = std::move(frames);
  return meta;
}

void write_edges(const std::vector<EdgeMap>& maps, const PipelineOptions& opt, int n,
                 const std::string& hash, const fs::path& out, bool preview) {
  fs::create_directories(out);
  for (size_t j = 0; j < maps.size(); ++j) {
    const int idx = static_cast<int>(j) + 1;
    sqr::write(out / indexed("edges", idx), maps[j].averaged);
    sqr::write(out / indexed("edges", idx, "_signed"), maps[j].signed_average);
    for (size_t r = 0; r < maps[j].per_rotation.size(); ++r)
      sqr::write(out / indexed("edges", idx, "_rot" + std::to_string(r + 1)), maps[j].per_rotation[r]);
    if (preview) write_preview(out / ("edges_" + std::to_string(idx) + ".pgm"), maps[j].averaged);
  }
  json meta{{"stage", "edges"},
            {"config_hash", hash},
            {"N", n},
            {"J", static_cast<int>(maps.size())},
            {"rotations", opt.rotations},
            {"angles", maps.empty() ? std::vector<double>{} : maps.front().angles},
            {"epsilon_pixels", opt.epsilon_pixels},
            {"factor", opt.factor ? "concentration" : "gaussian"}};
  write_json(out / "meta.json", meta);
}

std::vector<WeightMask> weights_stage(const std::vector<EdgeMap>& maps, int n,
                                      const PipelineOptions& opt, const std::string& hash,
                                      const fs::path& out) {
  Log log("weights");
  fs::create_directories(out);
  const GridSpec grid(n, static_cast<int>(maps.size()));
  auto weights = compute_weights(maps, grid, opt);
  json per_frame = json::array();
  for (size_t j = 0; j < weights.size(); ++j) {
    const int side = grid.side();
    sqr::write(out / indexed("weights", static_cast<int>(j) + 1), unvectorize(weights[j].w, side, side));
    per_frame.push_back({{"frame", j + 1},
                         {"tau", weights[j].tau},
                         {"edge_count", weights[j].edge_count},
                         {"degenerate", weights[j].degenerate}});
    if (weights[j].degenerate) log("warning", kv("frame", j + 1), "reason=no_edges_above_threshold");
  }
  write_json(out / "meta.json", {{"stage", "weights"}, {"config_hash", hash}, {"N", n},
                                 {"J", static_cast<int>(maps.size())}, {"frames", per_frame}});
  log("done", kv("frames", weights.size()));
  return weights;
}

std::vector<WeightMask> read_weights(const fs::path& dir, int frames) {
  require_dir(dir, "weights");
  std::vector<WeightMask> out;
  for (int j = 1; j <= frames; ++j) {
    WeightMask w;
    w.w = vectorize(sqr::read_real(dir / indexed("weights", j)));
    w.edge_count = (w.w.array() < 1.0).count();
    out.push_back(std::move(w));
  }
  return out;
}

ChangeStage changemask_stage(const std::vector<EdgeMap>& maps, const PipelineOptions& opt,
                             const std::string& hash, const fs::path& out) {
  Log log("changemask");
  fs::create_directories(out);
  auto stage = detect_changes(maps, opt);
  json frames = json::array(), pairs = json::array();
  for (size_t j = 0; j < stage.objects.size(); ++j) {
    const auto& o = stage.objects[j];
    json objs = json::array();
    for (size_t i = 0; i < o.filled.size(); ++i)
      objs.push_back({{"points", o.clusters[i].points.size()},
                      {"area", count_set(o.filled[i].Q)},
                      {"self_intersecting", o.filled[i].self_intersecting}});
    frames.push_back({{"frame", j + 1}, {"tau_u", o.binary.tau}, {"objects", objs}, {"warnings", o.warnings}});
    for (const auto& w : o.warnings) log("warning", kv("frame", j + 1), kv("message", '"' + w + '"'));
  }
  for (size_t j = 0; j < stage.pairs.size(); ++j) {
    const auto& p = stage.pairs[j];
    sqr::write(out / indexed("cmask", static_cast<int>(j) + 1), p.C);
    json diff = json::array();
    for (Eigen::Index a = 0; a < p.sets.diff.rows(); ++a) {
      std::vector<double> row(p.sets.diff.cols());
      for (Eigen::Index b = 0; b < p.sets.diff.cols(); ++b) row[b] = p.sets.diff(a, b);
      diff.push_back(row);
    }
    pairs.push_back({{"pair", {j + 1, j + 2}},
                     {"changed_first", p.sets.first},
                     {"changed_second", p.sets.second},
                     {"diff", diff},
                     {"uncoupled_pixels", p.C.size() - count_set(p.C)}});
  }
  write_json(out / "report.json", {{"stage", "changemask"},
                                   {"config_hash", hash},
                                   {"d", opt.change.d},
                                   {"tau_diff", opt.change.tau_diff},
                                   {"frames", frames},
                                   {"pairs", pairs}});
  write_json(out / "meta.json", {{"stage", "changemask"}, {"config_hash", hash},
                                 {"J", static_cast<int>(maps.size())}});
  log("done", kv("pairs", stage.pairs.size()));
  return stage;
}

CouplingOperator read_phi(const fs::path& dir, int frames, Eigen::Index pixels) {
  require_dir(dir, "change mask");
  std::vector<Mask> masks;
  for (int j = 1; j < frames; ++j) masks.push_back(sqr::read_mask(dir / indexed("cmask", j)));
  return CouplingOperator(std::move(masks), pixels);
}

json report_json(const SolveReport& r) {
  return {{"converged", r.converged},     {"iterations", r.iterations},
          {"objective", r.objective},     {"final_rho", r.final_rho},
          {"cg_restarts", r.cg_restarts}, {"rejected_steps", r.rejected_steps},
          {"warnings", r.warnings}};
}

void write_solution(const MethodRun& run, const std::string& hash, const fs::path& out) {
  fs::create_directories(out);
  for (size_t j = 0; j < run.images.size(); ++j)
    sqr::write(out / indexed("recon", static_cast<int>(j) + 1), run.images[j].values);
  std::ostringstream csv;
  csv << "method,frame,iteration,objective,primal,dual,rho,cg_iterations\n";
  json reports = json::array();
  for (size_t r = 0; r < run.reports.size(); ++r) {
    // The joint solve has a single report covering every frame (frame 0).
    const size_t frame = run.method == "joint" ? 0 : r + 1;
    for (const auto& h : run.reports[r].history) {
      char line[256];
      std::snprintf(line, sizeof line, "%s,%zu,%d,%.17g,%.6e,%.6e,%.6g,%d\n", run.method.c_str(), frame,
                    h.iteration, h.objective, h.primal, h.dual, h.rho, h.cg_iterations);
      csv << line;
    }
    json jr = report_json(run.reports[r]);
    jr["frame"] = frame;
    reports.push_back(jr);
  }
  write_text(out / "residuals.csv", csv.str());
  json meta{{"stage", "solve"}, {"config_hash", hash}, {"method", run.method},
            {"J", static_cast<int>(run.images.size())}, {"reports", reports},
            {"wall_time_s", run.wall_time_s}};
  if (!run.mu.empty()) meta["mu"] = run.mu;
  if (!run.images.empty()) meta["N"] = run.images.front().grid.half_bandwidth;
  write_json(out / "report.json", meta);
}

void log_reports(const Log& log, const MethodRun& run) {
  for (size_t r = 0; r < run.reports.size(); ++r) {
    const auto& rep = run.reports[r];
    log(rep.converged ? "solved" : "warning", kv("method", run.method),
        kv("frame", run.method == "joint" ? 0 : r + 1), kv("iterations", rep.iterations),
        kv("objective", rep.objective), kv("converged", rep.converged));
  }
}

std::vector<StudyRow> evaluate_run(const std::vector<ImageGrid>& truth, const std::vector<Mask>& occluded,
                                   const MethodRun& run, const SceneSpec* scene, int radius) {
  Experiment ex;
  ex.grid = truth.front().grid;
  ex.truth = truth;
  ex.occluded = occluded;
  ex.runs[run.method] = run;
  auto rows = evaluate(ex, radius);
  if (!scene) {
    // Without a scene the declared evaluation points are unknown.
    std::erase_if(rows, [](const StudyRow& r) {
      return r.region != "whole" && r.region != "smooth" && r.region != "occluded";
    });
  }
  return rows;
}

std::string rows_csv(const std::vector<StudyRow>& rows) {
  StudyReport rep;
  rep.rows = rows;
  return rep.csv();
}

// ---- command wiring -----------------------------------------------------------

struct Options {
  std::string config, out, in, edges, weights, cmask, truth, recon, method = "joint", kind = "resolution";
  std::string factor;
  int rotations = -1, d = -1, max_iter = -1;
  double tau_diff = -1, tau_w = -1, beta = -1, xi = -1, epsilon_pixels = -1;
  bool preview = false;
};

void apply_overrides(const Options& o, PipelineOptions& p) {
  if (o.rotations > 0) p.rotations = o.rotations;
  if (o.epsilon_pixels > 0) p.epsilon_pixels = o.epsilon_pixels;
  if (!o.factor.empty()) {
    if (o.factor == "gaussian") p.factor.reset();
    else p.factor = ConcentrationFactor::parse(o.factor);
  }
  if (o.tau_w > 0) p.tau_w = o.tau_w;
  if (o.d >= 0) p.change.d = o.d;
  if (o.tau_diff > 0) p.change.tau_diff = o.tau_diff;
  if (o.beta >= 0) p.beta = o.beta;
  if (o.max_iter > 0) p.admm.max_iter = o.max_iter;
}

int cmd_simulate(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  auto lc = load(o.config);
  simulate_stage(lc.cfg, lc.hash, o.out);
  return 0;
}

int cmd_edges(const Options& o) {
  auto lc = load(o.config);
  apply_overrides(o, lc.cfg.pipeline);
  auto fd = read_frames(o.in);
  Log log("edges");
  const auto t0 = std::chrono::steady_clock::now();
  auto maps = detect_edges(fd.frames, lc.cfg.pipeline);
  write_edges(maps, lc.cfg.pipeline, fd.meta.at("N").get<int>(), lc.hash, o.out, o.preview);
  log("done", kv("frames", maps.size()), kv("rotations", lc.cfg.pipeline.rotations),
      kv("seconds", seconds_since(t0)));
  return 0;
}

int cmd_weights(const Options& o) {
  auto lc = load(o.config);
  apply_overrides(o, lc.cfg.pipeline);
  auto ed = read_edges(o.edges);
  weights_stage(ed.maps, ed.meta.at("N").get<int>(), lc.cfg.pipeline, lc.hash, o.out);
  return 0;
}

int cmd_changemask(const Options& o) {
  auto lc = load(o.config);
  apply_overrides(o, lc.cfg.pipeline);
  auto ed = read_edges(o.edges);
  changemask_stage(ed.maps, lc.cfg.pipeline, lc.hash, o.out);
  return 0;
}

int cmd_solve(const Options& o) {
  auto lc = load(o.config);
  auto& p = lc.cfg.pipeline;
  apply_overrides(o, p);
  auto fd = read_frames(o.in);
  const int frames = static_cast<int>(fd.frames.size());
  const Eigen::Index pixels = fd.frames.front().grid.pixels();
  Log log("solve");
  const auto t0 = std::chrono::steady_clock::now();
  MethodRun run;
  if (o.method == "l1") {
    std::vector<double> xi;
    if (o.xi > 0) xi.assign(frames, o.xi);
    else if (fd.meta.contains("xi")) xi = fd.meta["xi"].get<std::vector<double>>();
    else throw UsageError("l1 needs --xi or an input directory with xi in meta.json");
    run = run_l1(fd.frames, xi, p);
  } else if (o.method == "vbjs" || o.method == "joint") {
    const fs::path wdir = o.weights.empty() ? fs::path(o.in) : fs::path(o.weights);
    auto weights = read_weights(wdir, frames);
    if (o.method == "vbjs") {
      run = run_vbjs(fd.frames, weights, p);
    } else {
      const fs::path cdir = o.cmask.empty() ? fs::path(o.in) : fs::path(o.cmask);
      auto phi = read_phi(cdir, frames, pixels);
      JointProblem jp{fd.frames, weights, std::move(phi), p.beta};
      auto r = solve_joint(jp, p.admm);
      run = {"joint", std::move(r.images), {std::move(r.report)}, {}, 0.0};
    }
  } else {
    throw UsageError("unknown method '" + o.method + "' (expected l1, vbjs or joint)");
  }
  run.wall_time_s = seconds_since(t0);
  write_solution(run, lc.hash, o.out);
  log_reports(log, run);
  log("done", kv("method", run.method), kv("seconds", run.wall_time_s));
  return 0;
}

int cmd_evaluate(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  require_dir(o.truth, "truth");
  require_dir(o.recon, "reconstruction");
  LoadedConfig lc;
  if (!o.config.empty()) lc = load(o.config);
  const json tmeta = read_json(fs::path(o.truth) / "meta.json");
  const int frames = tmeta.at("J").get<int>(), n = tmeta.at("N").get<int>();
  const GridSpec grid(n, frames);
  std::vector<ImageGrid> truth;
  std::vector<Mask> occluded;
  MethodRun run;
  run.method = o.method;
  const fs::path rmeta = fs::path(o.recon) / "report.json";
  if (fs::exists(rmeta)) {
    const json r = read_json(rmeta);
    run.method = r.value("method", o.method);
    run.wall_time_s = r.value("wall_time_s", 0.0);
  }
  for (int j = 1; j <= frames; ++j) {
    truth.emplace_back(grid, sqr::read_real(fs::path(o.truth) / indexed("truth", j)));
    const fs::path occ = fs::path(o.truth) / indexed("occluded", j);
    occluded.push_back(fs::exists(occ) ? sqr::read_mask(occ) : Mask::Zero(grid.side(), grid.side()));
    run.images.emplace_back(grid, sqr::read_real(fs::path(o.recon) / indexed("recon", j)));
  }
  const SceneSpec* scene = o.config.empty() ? nullptr : &lc.cfg.scene;
  auto rows = evaluate_run(truth, occluded, run, scene, lc.cfg.study.experiment.smooth_radius);
  for (auto& r : rows) r.snr_db = lc.cfg.simulation.snr_db.empty() ? 0.0 : lc.cfg.simulation.snr_db.front();
  write_text(o.out, rows_csv(rows));
  Log("evaluate")("done", kv("rows", rows.size()), kv("out", o.out));
  return 0;
}

int cmd_study(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  auto lc = load(o.config);
  auto sc = lc.cfg.study;
  if (o.kind == "resolution") sc.kind = StudyKind::resolution;
  else if (o.kind == "snr") sc.kind = StudyKind::snr;
  else throw UsageError("unknown study kind '" + o.kind + "' (expected resolution or snr)");
  Log log("study");
  const auto t0 = std::chrono::steady_clock::now();
  auto rep = run_study(sc);
  fs::create_directories(o.out);
  write_text(fs::path(o.out) / "study.csv", rep.csv());
  for (const auto& region : rep.regions()) write_text(fs::path(o.out) / ("study_" + region + ".svg"), rep.svg(region));
  write_json(fs::path(o.out) / "meta.json", {{"stage", "study"}, {"config_hash", lc.hash}, {"kind", o.kind}});
  log("done", kv("rows", rep.rows.size()), kv("seconds", seconds_since(t0)));
  return 0;
}

int cmd_pipeline(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  auto lc = load(o.config);
  auto& p = lc.cfg.pipeline;
  apply_overrides(o, p);
  const fs::path out = o.out;
  Log log("pipeline");
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<FourierFrame> frames;
  const json meta = simulate_stage(lc.cfg, lc.hash, out / "frames", &frames);
  const int n = lc.cfg.simulation.grid.half_bandwidth;

  Log elog("edges");
  auto maps = detect_edges(frames, p);
  write_edges(maps, p, n, lc.hash, out / "edges", o.preview);
  elog("done", kv("frames", maps.size()));

  auto weights = weights_stage(maps, n, p, lc.hash, out / "weights");
  auto changes = changemask_stage(maps, p, lc.hash, out / "changemask");

  Log slog("solve");
  const auto ts = std::chrono::steady_clock::now();
  JointProblem jp{frames, weights, changes.phi, p.beta};
  auto r = solve_joint(jp, p.admm);
  MethodRun run{"joint", std::move(r.images), {std::move(r.report)}, {}, seconds_since(ts)};
  write_solution(run, lc.hash, out / "recon");
  log_reports(slog, run);

  std::vector<ImageGrid> truth;
  std::vector<Mask> occluded;
  const GridSpec grid(n, static_cast<int>(frames.size()));
  for (int j = 1; j <= grid.frames; ++j) {
    truth.push_back(rasterize(lc.cfg.scene, j, grid));
    occluded.push_back(occluded_region(lc.cfg.scene, j, grid.side()));
  }
  auto rows = evaluate_run(truth, occluded, run, &lc.cfg.scene, lc.cfg.study.experiment.smooth_radius);
  const double snr = lc.cfg.simulation.snr_db.empty() ? 0.0 : lc.cfg.simulation.snr_db.front();
  for (auto& row : rows) row.snr_db = snr;
  write_text(out / "metrics.csv", rows_csv(rows));

  json summary = json::array();
  for (const auto& row : rows)
    if (row.region == "whole") summary.push_back({{"frame", row.frame}, {"mse_log", row.mse_log}});
  write_json(out / "report.json", {{"config_hash", lc.hash},
                                   {"N", n},
                                   {"J", grid.frames},
                                   {"frames_meta", meta},
                                   {"solve", report_json(run.reports.front())},
                                   {"whole_mse_log", summary},
                                   {"wall_time_s", seconds_since(t0)}});
  log("done", kv("frames", grid.frames), kv("seconds", seconds_since(t0)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint reconstruction of image sequences from band-limited Fourier data.\n"
               "SEQRECON_THREADS caps the worker threads."};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Render the scene and write noisy Fourier frames");
  sim->add_option("--config", o.config, "JSON run configuration (defaults if omitted)");
  sim->add_option("--out", o.out, "Output directory")->required();

  auto* edges = app.add_subcommand("edges", "Rotated edge maps for every frame");
  edges->add_option("--in", o.in, "Directory written by simulate")->required();
  edges->add_option("--out", o.out, "Output directory")->required();
  edges->add_option("--config", o.config, "JSON run configuration");
  edges->add_option("--M", o.rotations, "Number of rotations (default 10)");
  edges->add_option("--factor", o.factor, "gaussian (default), trig, poly, polyP or exp");
  edges->add_option("--epsilon-pixels", o.epsilon_pixels, "Regularizer support in pixels (default 3)");
  edges->add_flag("--preview", o.preview, "Also write PGM previews of the edge maps");

  auto* w = app.add_subcommand("weights", "Per-pixel l1 weights from edge maps");
  w->add_option("--edges", o.edges, "Directory written by edges")->required();
  w->add_option("--out", o.out, "Output directory")->required();
  w->add_option("--config", o.config, "JSON run configuration");
  w->add_option("--tau-w", o.tau_w, "Edge threshold (default 1/(2N+1))");

  auto* cm = app.add_subcommand("changemask", "Change masks between consecutive frames");
  cm->add_option("--edges", o.edges, "Directory written by edges")->required();
  cm->add_option("--out", o.out, "Output directory")->required();
  cm->add_option("--config", o.config, "JSON run configuration");
  cm->add_option("--tau-diff", o.tau_diff, "Object match threshold (default 1e-3)");
  cm->add_option("--d", o.d, "Closing radius and minimum cluster size (default 3)");

  auto* solve = app.add_subcommand("solve", "Reconstruct frames with one method");
  solve->add_option("--method", o.method, "l1, vbjs or joint")->required();
  solve->add_option("--in", o.in, "Directory written by simulate")->required();
  solve->add_option("--out", o.out, "Output directory")->required();
  solve->add_option("--config", o.config, "JSON run configuration");
  solve->add_option("--weights", o.weights, "Weights directory (default: --in)");
  solve->add_option("--cmask", o.cmask, "Change mask directory (default: --in)");
  solve->add_option("--beta", o.beta, "Coupling strength (default 0.5)");
  solve->add_option("--max-iter", o.max_iter, "ADMM iteration cap (default 500)");
  solve->add_option("--xi", o.xi, "Spread of L f for l1 when meta.json has none");

  auto* ev = app.add_subcommand("evaluate", "Region errors of a reconstruction against the truth");
  ev->add_option("--truth", o.truth, "Directory with truth_j.sqr (from simulate)")->required();
  ev->add_option("--recon", o.recon, "Directory with recon_j.sqr (from solve)")->required();
  ev->add_option("--out", o.out, "CSV file to write")->required();
  ev->add_option("--method", o.method, "Method label when the reconstruction has no report");
  ev->add_option("--config", o.config, "Configuration declaring evaluation points");

  auto* st = app.add_subcommand("study", "Resolution or SNR study over all methods");
  st->add_option("--kind", o.kind, "resolution or snr")->check(CLI::IsMember({"resolution", "snr"}));
  st->add_option("--config", o.config, "JSON run configuration");
  st->add_option("--out", o.out, "Output directory")->required();

  auto* pl = app.add_subcommand("pipeline", "Simulate, detect edges and changes, solve jointly, evaluate");
  pl->add_option("--config", o.config, "JSON run configuration");
  pl->add_option("--out", o.out, "Output directory")->required();
  pl->add_option("--beta", o.beta, "Coupling strength (default 0.5)");
  pl->add_option("--max-iter", o.max_iter, "ADMM iteration cap (default 500)");
  pl->add_flag("--preview", o.preview, "Also write PGM previews of the edge maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "seqrecon: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(o);
    if (*edges) return cmd_edges(o);
    if (*w) return cmd_weights(o);
    if (*cm) return cmd_changemask(o);
    if (*solve) return cmd_solve(o);
    if (*ev) return cmd_evaluate(o);
    if (*st) return cmd_study(o);
    if (*pl) return cmd_pipeline(o);
  } catch (const UsageError& e) {
    std::cerr << "seqrecon: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "seqrecon stage=error message=\"" << e.what() << "\"\n";
    return 1;
  }
  return 2;
}
