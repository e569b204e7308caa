#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqrecon/change_mask.hpp"
#include "seqrecon/tv_operator.hpp"
#include "seqrecon/vbjs_weights.hpp"

namespace seqrecon {

/// Normalization of the forward operator inside the solvers. `coefficient`
/// treats the data as continuous Fourier coefficients (F = DFT / side^2),
/// `unitary` uses F = DFT / side.
enum class FidelityScale { coefficient, unitary };

struct AdmmParams {
  FidelityScale scale = FidelityScale::unitary;
  double rho = 0.5;          // in units of the fidelity gain (see FidelityData::gain)
  int max_iter = 500;
  // Stopping test with equal absolute and relative tolerance:
  //   |Ls - z| <= tol_primal (sqrt(2n) + max(|Ls|, |z|))
  //   rho |L^T (z - z_prev)| <= tol_dual (sqrt(n) + |rho L^T u|)
  // n = pixels * frames. History records the ratios |r| / (sqrt(.) + scale).
  double tol_primal = 1e-4;
  double tol_dual = 1e-4;
  double cg_tol = 1e-10;
  int cg_max_iter = 500;
  int cg_max_restarts = 3;
  bool adapt_rho = true;     // residual balancing
  int adapt_until = 100;     // no rho changes after this iteration
  double adapt_ratio = 10.0;
  double adapt_factor = 2.0;
  double relaxation = 1.0;   // over-relaxation in (0,2)
  // Nesterov extrapolation of (z, u); an extrapolated step that raises the
  // objective or the combined residual is discarded and replaced by a plain one.
  bool accelerate = true;
  TVOperator::Boundary boundary = TVOperator::Boundary::periodic;
  bool force_cg = false;     // use the iterative s-update even when a closed form exists
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double rho = 0.0;
  int cg_iterations = 0;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  double final_rho = 0.0;
  int cg_restarts = 0;
  int rejected_steps = 0;  // discarded extrapolated steps
  std::vector<IterationRecord> history;
  std::vector<std::string> warnings;
};

/// Fourier data in FFT layout for the operator F = scale * DFT restricted to
/// the mask.
struct FidelityData {
  Eigen::Index rows = 0, cols = 0;
  ComplexImage b;
  Mask mask;
  double scale = 1.0;

  Eigen::Index pixels() const { return rows * cols; }
  /// F^H F = gain * I on the available modes.
  double gain() const { return scale * scale * static_cast<double>(rows * cols); }
};

double fidelity_scale_factor(FidelityScale scale, Eigen::Index rows, Eigen::Index cols);

FidelityData fidelity_from_frame(const FourierFrame& frame,
                                 FidelityScale scale = FidelityScale::unitary);

/// Stacked weighted-TV problem
///   sum_j |F s_j - b_j|^2 + sum_j |t_j .* L s_j|_1 + beta |Phi s|^2,
/// where t_j holds one threshold per pixel, used for both difference directions.
struct StackedProblem {
  std::vector<FidelityData> data;
  std::vector<Eigen::VectorXd> thresholds;
  std::optional<CouplingOperator> phi;
  double beta = 0.0;
};

struct StackedResult {
  FrameStack s;
  SolveReport report;
};

StackedResult solve_stacked(const StackedProblem& problem, const AdmmParams& params);

double stacked_objective(const StackedProblem& problem, const FrameStack& s,
                         TVOperator::Boundary boundary = TVOperator::Boundary::periodic);

/// Applies the s-update normal operator 2 F^H M F + rho L^T L + 2 beta Phi^T Phi.
FrameStack normal_operator(const StackedProblem& problem, const FrameStack& s, double rho,
                           TVOperator::Boundary boundary = TVOperator::Boundary::periodic);

struct SolveResult {
  ImageGrid image;
  SolveReport report;
};

/// min |F s - b|^2 + mu |L s|_1.
SolveResult solve_l1(const FourierFrame& b, double mu, const AdmmParams& params = {});

/// min |F s - b|^2 + |W L s|_1.
SolveResult solve_vbjs(const FourierFrame& b, const WeightMask& W, const AdmmParams& params = {});

struct JointProblem {
  std::vector<FourierFrame> frames;
  std::vector<WeightMask> weights;
  CouplingOperator phi;
  double beta = 0.5;
};

struct JointResult {
  std::vector<ImageGrid> images;
  SolveReport report;
};

JointResult solve_joint(const JointProblem& problem, const AdmmParams& params = {});

StackedProblem stacked_from_joint(const JointProblem& problem,
                                  FidelityScale scale = FidelityScale::unitary);

struct MuSelection {
  SolveResult best;
  double mu = 0.0;
  std::vector<double> candidates;
  std::vector<double> misfit;  // mean |F s - b|^2 over available entries
};

/// Draws K_max regularization parameters from N(sigma/xi, sigma) (sigma in the
/// solver's data scale, negatives redrawn), solves for each, keeps the one
/// with the smallest data misfit.
MuSelection select_mu_and_solve(const FourierFrame& b, double sigma, double xi, int k_max,
                                std::uint64_t seed, const AdmmParams& params = {});

/// Noise level of b expressed in the solver's data scale.
inline double solver_sigma(const FourierFrame& b, FidelityScale scale) {
  return b.noise_sigma * fidelity_scale_factor(scale, b.grid.side(), b.grid.side());
}

/// Sample standard deviation of L f, used as xi.
double tv_spread(const RealImage& f, TVOperator::Boundary boundary = TVOperator::Boundary::periodic);

}  // namespace seqrecon
