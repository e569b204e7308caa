#include "seqrecon/study.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace seqrecon {

Experiment run_experiment(const ExperimentConfig& cfg, int half_bandwidth, double snr) {
  Experiment ex;
  ex.grid = GridSpec(half_bandwidth, cfg.scene.frames);
  ex.snr_db = snr;
  SimulationOptions sim;
  sim.grid = ex.grid;
  sim.oversample = cfg.oversample;
  sim.apply_bands = cfg.apply_bands;
  sim.band_rule = cfg.band_rule;
  if (std::isfinite(snr)) sim.snr_db = {snr};
  sim.noise.seed = cfg.seed;
  ex.frames = acquire(cfg.scene, sim);

  std::vector<double> xi;
  for (int t = 1; t <= cfg.scene.frames; ++t) {
    ex.truth.push_back(rasterize(cfg.scene, t, ex.grid));
    ex.occluded.push_back(occluded_region(cfg.scene, t, ex.grid.side()));
    xi.push_back(tv_spread(ex.truth.back().values));
  }

  auto wants = [&](const std::string& m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
  };
  if (wants("l1")) ex.runs["l1"] = run_l1(ex.frames, xi, cfg.pipeline);
  if (wants("vbjs") || wants("joint")) {
    ex.joint = run_joint(ex.frames, cfg.pipeline);
    if (wants("joint")) ex.runs["joint"] = ex.joint->run;
    if (wants("vbjs")) ex.runs["vbjs"] = run_vbjs(ex.frames, ex.joint->weights, cfg.pipeline);
  }
  return ex;
}

std::vector<StudyRow> evaluate(const Experiment& ex, int smooth_radius) {
  std::vector<StudyRow> rows;
  for (const auto& [name, run] : ex.runs) {
    const double per_frame_time = run.wall_time_s / static_cast<double>(run.images.size());
    for (size_t j = 0; j < run.images.size(); ++j) {
      const ImageGrid& truth = ex.truth[j];
      const ImageGrid& rec = run.images[j];
      auto add = [&](const std::string& region, const RegionSelector& sel) {
        rows.push_back({name, static_cast<int>(j) + 1, region, ex.grid.half_bandwidth, ex.snr_db,
                        mse_log(truth, rec, sel).value, per_frame_time});
      };
      add("whole", RegionSelector::whole());
      add("smooth", RegionSelector::smooth(smooth_region(truth.values, ex.occluded[j], smooth_radius)));
      if (count_set(ex.occluded[j]) > 0) add("occluded", RegionSelector::occluded(ex.occluded[j]));
    }
  }
  return rows;
}

StudyReport run_study(const StudyConfig& cfg) {
  StudyReport report;
  report.kind = cfg.kind;
  auto collect = [&](const Experiment& ex) {
    auto rows = evaluate(ex, cfg.experiment.smooth_radius);
    // Evaluation points are attached to their declared frame.
    for (const auto& p : cfg.experiment.scene.points) {
      for (const auto& [name, run] : ex.runs) {
        const size_t j = static_cast<size_t>(p.frame) - 1;
        if (j >= run.images.size()) continue;
        const auto sel = RegionSelector::neighborhood_at(p.x, p.y, ex.grid.side());
        rows.push_back({name, p.frame, p.name, ex.grid.half_bandwidth, ex.snr_db,
                        mse_log(ex.truth[j], run.images[j], sel).value,
                        run.wall_time_s / static_cast<double>(run.images.size())});
      }
    }
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  };
  if (cfg.kind == StudyKind::resolution) {
    for (int n : cfg.half_bandwidths) collect(run_experiment(cfg.experiment, n, cfg.resolution_snr_db));
  } else {
    for (double snr : cfg.snr_values)
      collect(run_experiment(cfg.experiment, cfg.snr_half_bandwidth, snr));
  }
  return report;
}

std::string StudyReport::csv() const {
  std::ostringstream os;
  os << "method,frame,region,N,snr_db,mse_log,wall_time_s\n";
  os << std::setprecision(10);
  for (const auto& r : rows)
    os << r.method << ',' << r.frame << ',' << r.region << ',' << r.N << ',' << r.snr_db << ','
       << r.mse_log << ',' << r.wall_time_s << '\n';
  return os.str();
}

std::vector<std::string> StudyReport::regions() const {
  std::vector<std::string> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), r.region) == out.end()) out.push_back(r.region);
  return out;
}

std::string StudyReport::svg(const std::string& region) const {
  // method -> x -> (sum, count)
  std::map<std::string, std::map<double, std::pair<double, int>>> series;
  for (const auto& r : rows) {
    if (r.region != region) continue;
    const double x = kind == StudyKind::resolution ? r.N : r.snr_db;
    auto& cell = series[r.method][x];
    cell.first += r.mse_log;
    cell.second += 1;
  }
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [m, pts] : series)
    for (const auto& [x, c] : pts) {
      const double y = c.first / c.second;
      xmin = std::min(xmin, x), xmax = std::max(xmax, x);
      ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
  if (series.empty()) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double W = 640, H = 400, pad = 60;
  auto px = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (W - 2 * pad); };
  auto py = [&](double y) { return H - pad - (y - ymin) / (ymax - ymin) * (H - 2 * pad); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">MSE_log, "
     << region << "</text>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << (kind == StudyKind::resolution ? "N" : "SNR (dB)") << "</text>\n";
  std::set<double> xs;
  for (const auto& [m, pts] : series)
    for (const auto& [x, c] : pts) xs.insert(x);
  for (double x : xs)
    os << "<text x=\"" << px(x) << "\" y=\"" << H - pad + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << x << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = ymin + (ymax - ymin) * i / 4.0;
    os << "<text x=\"" << pad - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
       << y << "</text>\n";
  }
  int ci = 0;
  for (const auto& [m, pts] : series) {
    const char* color = colors[ci % 5];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, c] : pts) os << px(x) << ',' << py(c.first / c.second) << ' ';
    os << "\"/>\n";
    for (const auto& [x, c] : pts)
      os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(c.first / c.second) << "\" r=\"3\" fill=\""
         << color << "\"/>\n";
    os << "<text x=\"" << W - pad + 5 << "\" y=\"" << pad + 16 * ci << "\" font-size=\"12\" fill=\""
       << color << "\">" << m << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace seqrecon
