#include "seqrecon/pipeline.hpp"

#include <chrono>

#include "seqrecon/parallel.hpp"

namespace seqrecon {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<EdgeMap> detect_edges(const std::vector<FourierFrame>& frames,
                                  const PipelineOptions& opt) {
  std::vector<EdgeMap> out(frames.size());
  parallel_for(frames.size(), [&](std::size_t j) {
    const auto reg = EdgeRegularizer::for_grid(frames[j].grid, opt.epsilon_pixels);
    out[j] = edge_map(frames[j], opt.rotations, reg, opt.factor);
  });
  return out;
}

std::vector<WeightMask> compute_weights(const std::vector<EdgeMap>& edges, const GridSpec& grid,
                                        const PipelineOptions& opt) {
  const double tau = opt.tau_w ? *opt.tau_w : default_weight_threshold(grid);
  std::vector<WeightMask> out;
  for (const auto& e : edges) out.push_back(weights_from_edges(e, tau));
  return out;
}

ChangeStage detect_changes(const std::vector<EdgeMap>& edges, const PipelineOptions& opt) {
  if (edges.empty()) throw Error("detect_changes: no edge maps");
  std::vector<FrameObjects> objects(edges.size());
  parallel_for(edges.size(), [&](std::size_t j) { objects[j] = extract_objects(edges[j].averaged, opt.change); });
  std::vector<PairChange> pairs;
  std::vector<Mask> masks;
  for (size_t j = 0; j + 1 < objects.size(); ++j) {
    pairs.push_back(change_mask_for_pair(objects[j], objects[j + 1], opt.change));
    masks.push_back(pairs.back().C);
  }
  CouplingOperator phi(std::move(masks), edges.front().averaged.size());
  return {std::move(objects), std::move(pairs), std::move(phi)};
}

MethodRun run_l1(const std::vector<FourierFrame>& frames, const std::vector<double>& xi,
                 const PipelineOptions& opt) {
  if (xi.size() != frames.size()) throw Error("run_l1: need one xi per frame");
  const auto t0 = std::chrono::steady_clock::now();
  MethodRun run{"l1", {}, {}, {}, 0.0};
  run.images.resize(frames.size());
  run.reports.resize(frames.size());
  run.mu.resize(frames.size());
  parallel_for(frames.size(), [&](std::size_t j) {
    const double sigma = solver_sigma(frames[j], opt.admm.scale);
    if (sigma > 0) {
      auto sel = select_mu_and_solve(frames[j], sigma, xi[j], opt.k_max, opt.mu_seed + j, opt.admm);
      run.images[j] = std::move(sel.best.image);
      run.reports[j] = std::move(sel.best.report);
      run.mu[j] = sel.mu;
    } else {
      // Noiseless data: the sampling distribution collapses; use a small fixed
      // parameter relative to the fidelity gain.
      const int side = frames[j].grid.side();
      const double f = fidelity_scale_factor(opt.admm.scale, side, side);
      const double mu = 1e-4 * f * f * side * side;
      auto r = solve_l1(frames[j], mu, opt.admm);
      run.images[j] = std::move(r.image);
      run.reports[j] = std::move(r.report);
      run.mu[j] = mu;
    }
  });
  run.wall_time_s = seconds_since(t0);
  return run;
}

MethodRun run_vbjs(const std::vector<FourierFrame>& frames, const std::vector<WeightMask>& weights,
                   const PipelineOptions& opt) {
  if (weights.size() != frames.size()) throw Error("run_vbjs: need one weight mask per frame");
  const auto t0 = std::chrono::steady_clock::now();
  MethodRun run{"vbjs", {}, {}, {}, 0.0};
  run.images.resize(frames.size());
  run.reports.resize(frames.size());
  parallel_for(frames.size(), [&](std::size_t j) {
    auto r = solve_vbjs(frames[j], weights[j], opt.admm);
    run.images[j] = std::move(r.image);
    run.reports[j] = std::move(r.report);
  });
  run.wall_time_s = seconds_since(t0);
  return run;
}

JointRun run_joint(const std::vector<FourierFrame>& frames, const PipelineOptions& opt) {
  if (frames.empty()) throw Error("run_joint: no frames");
  const auto t0 = std::chrono::steady_clock::now();
  auto edges = detect_edges(frames, opt);
  auto weights = compute_weights(edges, frames.front().grid, opt);
  auto changes = detect_changes(edges, opt);
  JointProblem problem{frames, weights, changes.phi, opt.beta};
  auto result = solve_joint(problem, opt.admm);
  MethodRun run{"joint", std::move(result.images), {std::move(result.report)}, {}, 0.0};
  run.wall_time_s = seconds_since(t0);
  return {std::move(edges), std::move(weights), std::move(changes), std::move(run)};
}

}  // namespace seqrecon
