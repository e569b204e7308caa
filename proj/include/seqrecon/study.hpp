#pragma once

#include <map>
#include <string>
#include <vector>

#include "seqrecon/metrics.hpp"
#include "seqrecon/phantoms.hpp"
#include "seqrecon/pipeline.hpp"

namespace seqrecon {

struct ExperimentConfig {
  SceneSpec scene = default_scene();
  int oversample = 4;
  BandRule band_rule = BandRule::cross;
  bool apply_bands = true;
  std::uint64_t seed = 1;
  PipelineOptions pipeline;
  std::vector<std::string> methods{"l1", "vbjs", "joint"};
  int smooth_radius = 2;
};

/// One simulated acquisition reconstructed by each requested method.
struct Experiment {
  GridSpec grid;
  double snr_db = 0.0;
  std::vector<FourierFrame> frames;
  std::vector<ImageGrid> truth;
  std::vector<Mask> occluded;
  std::map<std::string, MethodRun> runs;
  std::optional<JointRun> joint;  // intermediate stages of the joint method
};

Experiment run_experiment(const ExperimentConfig& config, int half_bandwidth, double snr_db);

struct StudyRow {
  std::string method;
  int frame = 0;
  std::string region;
  int N = 0;
  double snr_db = 0.0;
  double mse_log = 0.0;
  double wall_time_s = 0.0;
};

/// Rows for every method, frame and region (whole, smooth, occluded when the
/// frame has occlusions, and the 5x5 neighbourhood of each evaluation point
/// declared for that frame).
std::vector<StudyRow> evaluate(const Experiment& experiment, int smooth_radius = 2);

enum class StudyKind { resolution, snr };

struct StudyConfig {
  StudyKind kind = StudyKind::resolution;
  ExperimentConfig experiment;
  std::vector<int> half_bandwidths{16, 32, 64};          // resolution study
  double resolution_snr_db = 2.0;
  std::vector<double> snr_values{1.2, 2.0, 6.0, 10.0, 20.0};  // SNR study
  int snr_half_bandwidth = 64;
};

struct StudyReport {
  StudyKind kind = StudyKind::resolution;
  std::vector<StudyRow> rows;

  std::string csv() const;
  /// Line chart of the frame-averaged MSE_log for one region against N or SNR.
  std::string svg(const std::string& region) const;
  std::vector<std::string> regions() const;
};

StudyReport run_study(const StudyConfig& config);

}  // namespace seqrecon
