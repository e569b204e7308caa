#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqrecon/change_mask.hpp"
#include "seqrecon/edge_detect.hpp"
#include "seqrecon/solvers.hpp"
#include "seqrecon/vbjs_weights.hpp"

namespace seqrecon {

struct PipelineOptions {
  int rotations = 10;
  double epsilon_pixels = 3.0;
  std::optional<ConcentrationFactor> factor;  // nullopt: Gaussian regularizer
  std::optional<double> tau_w;                // nullopt: 1/(2N+1)
  ChangeMaskOptions change;
  double beta = 0.5;
  AdmmParams admm;
  int k_max = 10;
  std::uint64_t mu_seed = 1;
};

std::vector<EdgeMap> detect_edges(const std::vector<FourierFrame>& frames,
                                  const PipelineOptions& options);

std::vector<WeightMask> compute_weights(const std::vector<EdgeMap>& edges, const GridSpec& grid,
                                        const PipelineOptions& options);

struct ChangeStage {
  std::vector<FrameObjects> objects;
  std::vector<PairChange> pairs;
  CouplingOperator phi;
};

ChangeStage detect_changes(const std::vector<EdgeMap>& edges, const PipelineOptions& options);

struct MethodRun {
  std::string method;
  std::vector<ImageGrid> images;
  std::vector<SolveReport> reports;
  std::vector<double> mu;  // l1 only
  double wall_time_s = 0.0;
};

/// Standard l1 per frame with the sampled regularization parameter; xi[j]
/// is the spread of L f_j for frame j.
MethodRun run_l1(const std::vector<FourierFrame>& frames, const std::vector<double>& xi,
                 const PipelineOptions& options);

MethodRun run_vbjs(const std::vector<FourierFrame>& frames, const std::vector<WeightMask>& weights,
                   const PipelineOptions& options);

struct JointRun {
  std::vector<EdgeMap> edges;
  std::vector<WeightMask> weights;
  ChangeStage changes;
  MethodRun run;
};

/// Edge maps, weights, change masks and the coupled solve.
JointRun run_joint(const std::vector<FourierFrame>& frames, const PipelineOptions& options);

}  // namespace seqrecon
