#include "seqrecon/solvers.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "seqrecon/fft.hpp"

namespace seqrecon {
namespace {

using Vec = Eigen::VectorXd;

ComplexImage to_image(const Vec& s, Eigen::Index rows, Eigen::Index cols) {
  ComplexImage out(rows, cols);
  for (Eigen::Index i = 0; i < s.size(); ++i) out.data()[i] = s(i);
  return out;
}

Vec real_part(const ComplexImage& a) {
  Vec v(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) v(i) = a.data()[i].real();
  return v;
}

void apply_mask(ComplexImage& a, const Mask& m) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!m.data()[i]) a.data()[i] = 0.0;
}

// Re(F^H M F s).
Vec masked_gram(const FidelityData& d, const Vec& s) {
  ComplexImage spec = fft::forward(to_image(s, d.rows, d.cols));
  apply_mask(spec, d.mask);
  return real_part(fft::backward(spec)) * (d.scale * d.scale);
}

// Re(F^H M b).
Vec data_adjoint(const FidelityData& d) {
  ComplexImage b = d.b;
  apply_mask(b, d.mask);
  return real_part(fft::backward(b)) * d.scale;
}

double data_misfit(const FidelityData& d, const Vec& s) {
  const ComplexImage spec = fft::forward(to_image(s, d.rows, d.cols));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < spec.size(); ++i)
    if (d.mask.data()[i]) acc += std::norm(spec.data()[i] * d.scale - d.b.data()[i]);
  return acc;
}

// Solves Re(F^H diag(1/D) F) r for a DFT-diagonal operator D (entries with
// D = 0 are dropped, i.e. the pseudo-inverse).
Vec fourier_solve(const Vec& r, const RealImage& D, Eigen::Index rows, Eigen::Index cols) {
  ComplexImage spec = fft::forward(to_image(r, rows, cols));
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    const double den = D.data()[i];
    spec.data()[i] = den > 0 ? spec.data()[i] / den : 0.0;
  }
  return real_part(fft::backward(spec)) / static_cast<double>(rows * cols);
}

RealImage tv_eigenvalues(const TVOperator& L) {
  RealImage lam(L.rows(), L.cols());
  for (Eigen::Index k = 0; k < L.rows(); ++k)
    for (Eigen::Index l = 0; l < L.cols(); ++l) lam(k, l) = L.normal_eigenvalue(k, l);
  return lam;
}

double stack_dot(const FrameStack& a, const FrameStack& b) {
  double acc = 0.0;
  for (size_t j = 0; j < a.size(); ++j) acc += a[j].dot(b[j]);
  return acc;
}

double stack_norm(const FrameStack& a) { return std::sqrt(stack_dot(a, a)); }

Vec shrink(const Vec& v, const Vec& t_pixel, double rho) {
  const Eigen::Index n = t_pixel.size();
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double t = t_pixel(i % n) / rho;
    const double a = std::abs(v(i));
    out(i) = a > t ? std::copysign(a - t, v(i)) : 0.0;
  }
  return out;
}

struct CgOutcome {
  int iterations = 0;
  bool breakdown = false;
};

class SUpdate {
 public:
  SUpdate(const StackedProblem& p, const TVOperator& L, const AdmmParams& params)
      : p_(p), L_(L), params_(params) {
    const size_t J = p.data.size();
    closed_form_ = J == 1 && !p.phi && params.boundary == TVOperator::Boundary::periodic &&
                   !params.force_cg;
    if (params.boundary == TVOperator::Boundary::periodic) lambda_ = tv_eigenvalues(L);
    else lambda_ = tv_eigenvalues(TVOperator(L.rows(), L.cols()));  // preconditioner only
    for (size_t j = 0; j < J; ++j) {
      rhs_data_.push_back(2.0 * data_adjoint(p.data[j]));
      coupling_mean_.push_back(p.phi && p.beta > 0 ? p.phi->normal_diagonal(static_cast<int>(j)).mean()
                                                   : 0.0);
    }
  }

  bool closed_form() const { return closed_form_; }

  // Overwrites s with the minimizer for the given z - u.
  CgOutcome run(FrameStack& s, const FrameStack& v, double rho) const {
    const size_t J = p_.data.size();
    FrameStack rhs(J);
    for (size_t j = 0; j < J; ++j) rhs[j] = rhs_data_[j] + rho * L_.apply_adjoint(v[j]);
    if (closed_form_) {
      s[0] = fourier_solve(rhs[0], diagonal(0, rho), L_.rows(), L_.cols());
      return {};
    }
    return pcg(s, rhs, rho);
  }

 private:
  // Re(F^H M F) is diagonal with entries (M(k) + M(-k)) / 2, which equals M
  // for conjugate-symmetric masks.
  RealImage diagonal(size_t j, double rho) const {
    RealImage D = rho * lambda_ + 2.0 * p_.beta * coupling_mean_[j];
    const double g = p_.data[j].gain();
    const Mask& m = p_.data[j].mask;
    const Eigen::Index R = m.rows(), C = m.cols();
    for (Eigen::Index k = 0; k < R; ++k)
      for (Eigen::Index l = 0; l < C; ++l)
        D(k, l) += g * (double(m(k, l) != 0) + double(m((R - k) % R, (C - l) % C) != 0));
    return D;
  }

  CgOutcome pcg(FrameStack& x, const FrameStack& b, double rho) const {
    const size_t J = x.size();
    std::vector<RealImage> D;
    for (size_t j = 0; j < J; ++j) D.push_back(diagonal(j, rho));
    auto precond = [&](const FrameStack& r) {
      FrameStack z(J);
      for (size_t j = 0; j < J; ++j) z[j] = fourier_solve(r[j], D[j], L_.rows(), L_.cols());
      return z;
    };
    CgOutcome out;
    const double bnorm = stack_norm(b);
    if (bnorm == 0.0) {
      for (auto& v : x) v.setZero();
      return out;
    }
    FrameStack Ax = normal_operator(p_, x, rho, params_.boundary);
    FrameStack r(J);
    for (size_t j = 0; j < J; ++j) r[j] = b[j] - Ax[j];
    if (stack_norm(r) <= params_.cg_tol * bnorm) return out;
    FrameStack z = precond(r);
    FrameStack q = z;
    double rz = stack_dot(r, z);
    for (int it = 1; it <= params_.cg_max_iter; ++it) {
      out.iterations = it;
      const FrameStack Aq = normal_operator(p_, q, rho, params_.boundary);
      const double qAq = stack_dot(q, Aq);
      if (!(qAq > 0.0) || !std::isfinite(qAq) || !(rz > 0.0)) {
        out.breakdown = true;
        return out;
      }
      const double alpha = rz / qAq;
      for (size_t j = 0; j < J; ++j) {
        x[j] += alpha * q[j];
        r[j] -= alpha * Aq[j];
      }
      if (stack_norm(r) <= params_.cg_tol * bnorm) return out;
      z = precond(r);
      const double rz_next = stack_dot(r, z);
      const double gamma = rz_next / rz;
      rz = rz_next;
      for (size_t j = 0; j < J; ++j) q[j] = z[j] + gamma * q[j];
    }
    return out;
  }

  const StackedProblem& p_;
  const TVOperator& L_;
  const AdmmParams& params_;
  bool closed_form_ = false;
  RealImage lambda_;
  std::vector<Vec> rhs_data_;
  std::vector<double> coupling_mean_;
};

void validate(const StackedProblem& p) {
  if (p.data.empty()) throw Error("solve: no frames");
  if (p.thresholds.size() != p.data.size())
    throw DimensionError("solve: need one threshold vector per frame");
  if (p.beta < 0) throw Error("solve: beta must be non-negative");
  const Eigen::Index rows = p.data.front().rows, cols = p.data.front().cols;
  for (size_t j = 0; j < p.data.size(); ++j) {
    const auto& d = p.data[j];
    if (d.rows != rows || d.cols != cols || d.b.rows() != rows || d.b.cols() != cols ||
        d.mask.rows() != rows || d.mask.cols() != cols)
      throw DimensionError("solve: frame " + std::to_string(j + 1) + " has inconsistent shape");
    if (p.thresholds[j].size() != rows * cols)
      throw DimensionError("solve: threshold vector length mismatch");
    if ((p.thresholds[j].array() < 0).any()) throw Error("solve: negative threshold");
  }
  if (p.phi && (p.phi->frames() != static_cast<int>(p.data.size()) ||
                (p.phi->pixels() >= 0 && p.phi->pixels() != rows * cols)))
    throw DimensionError("solve: coupling operator does not match the frames");
}

}  // namespace

double fidelity_scale_factor(FidelityScale scale, Eigen::Index rows, Eigen::Index cols) {
  const double n = static_cast<double>(rows * cols);
  return scale == FidelityScale::coefficient ? 1.0 / n : 1.0 / std::sqrt(n);
}

FidelityData fidelity_from_frame(const FourierFrame& frame, FidelityScale scale) {
  frame.check();
  FidelityData d;
  d.rows = d.cols = frame.grid.side();
  d.scale = fidelity_scale_factor(scale, d.rows, d.cols);
  d.mask = fft::from_centered(frame.available);
  d.b = fft::from_centered(frame.coeffs) * d.scale;
  apply_mask(d.b, d.mask);
  return d;
}

FrameStack normal_operator(const StackedProblem& p, const FrameStack& s, double rho,
                           TVOperator::Boundary boundary) {
  const TVOperator L(p.data.front().rows, p.data.front().cols, boundary);
  FrameStack out(s.size());
  for (size_t j = 0; j < s.size(); ++j) out[j] = 2.0 * masked_gram(p.data[j], s[j]) + rho * L.normal(s[j]);
  if (p.phi && p.beta > 0) {
    const FrameStack c = p.phi->normal(s);
    for (size_t j = 0; j < s.size(); ++j) out[j] += 2.0 * p.beta * c[j];
  }
  return out;
}

double stacked_objective(const StackedProblem& p, const FrameStack& s, TVOperator::Boundary boundary) {
  const TVOperator L(p.data.front().rows, p.data.front().cols, boundary);
  double f = 0.0;
  for (size_t j = 0; j < s.size(); ++j) {
    f += data_misfit(p.data[j], s[j]);
    const Vec d = L.apply(s[j]);
    const Eigen::Index n = s[j].size();
    f += (p.thresholds[j].array() * (d.head(n).array().abs() + d.tail(n).array().abs())).sum();
  }
  if (p.phi && p.beta > 0) {
    for (const auto& y : p.phi->apply(s)) f += p.beta * y.squaredNorm();
  }
  return f;
}

StackedResult solve_stacked(const StackedProblem& p, const AdmmParams& params) {
  validate(p);
  if (!(params.rho > 0)) throw Error("solve: rho must be positive");
  if (!(params.relaxation > 0 && params.relaxation < 2))
    throw Error("solve: relaxation must lie in (0,2)");
  if (params.max_iter < 1) throw Error("solve: max_iter must be >= 1");
  const size_t J = p.data.size();
  const TVOperator L(p.data.front().rows, p.data.front().cols, params.boundary);
  const SUpdate update(p, L, params);

  StackedResult res;
  FrameStack& s = res.s;
  for (size_t j = 0; j < J; ++j) s.push_back(data_adjoint(p.data[j]));
  FrameStack Ls(J), z(J), u(J);
  for (size_t j = 0; j < J; ++j) {
    Ls[j] = L.apply(s[j]);
    z[j] = Ls[j];
    u[j] = Vec::Zero(Ls[j].size());
  }

  const double gain = p.data.front().gain();
  const double n_total = static_cast<double>(J) * static_cast<double>(p.data.front().pixels());
  double rho = params.rho * gain;
  double best_obj = std::numeric_limits<double>::infinity();
  FrameStack best = s;
  auto& rep = res.report;

  // zh, uh are the points the next iteration starts from; they differ from
  // z, u only when acceleration extrapolates.
  FrameStack zh = z, uh = u;
  double momentum = 1.0, combined_prev = std::numeric_limits<double>::infinity();
  constexpr double restart_eta = 0.999;
  FrameStack accepted = s;
  double accepted_obj = std::numeric_limits<double>::infinity();
  double accepted_p = std::numeric_limits<double>::infinity(), accepted_d = accepted_p;

  for (int it = 1; it <= params.max_iter; ++it) {
    FrameStack v(J);
    for (size_t j = 0; j < J; ++j) v[j] = zh[j] - uh[j];
    CgOutcome cg = update.run(s, v, rho);
    while (cg.breakdown) {
      if (++rep.cg_restarts > params.cg_max_restarts)
        throw Error("solve: conjugate gradient broke down after " +
                    std::to_string(params.cg_max_restarts) + " restarts");
      rep.warnings.push_back("CG breakdown at iteration " + std::to_string(it) + ", doubling rho");
      rho *= 2.0;
      for (size_t j = 0; j < J; ++j) {
        u[j] *= 0.5;
        uh[j] *= 0.5;
        v[j] = zh[j] - uh[j];
      }
      cg = update.run(s, v, rho);
    }

    FrameStack z_new(J), u_new(J);
    double primal2 = 0, ls2 = 0, z2 = 0, dual2 = 0, u2 = 0, combined = 0;
    for (size_t j = 0; j < J; ++j) {
      Ls[j] = L.apply(s[j]);
      const Vec relaxed = params.relaxation * Ls[j] + (1.0 - params.relaxation) * zh[j];
      z_new[j] = shrink(relaxed + uh[j], p.thresholds[j], rho);
      u_new[j] = uh[j] + relaxed - z_new[j];
      const Vec r = Ls[j] - z_new[j];
      primal2 += r.squaredNorm();
      ls2 += Ls[j].squaredNorm();
      z2 += z_new[j].squaredNorm();
      dual2 += (rho * L.apply_adjoint(z_new[j] - zh[j])).squaredNorm();
      u2 += (rho * L.apply_adjoint(u_new[j])).squaredNorm();
      combined += (u_new[j] - uh[j]).squaredNorm() + (z_new[j] - zh[j]).squaredNorm();
    }
    const double primal = std::sqrt(primal2), dual = std::sqrt(dual2);
    const double pscale = std::sqrt(std::max(ls2, z2)), dscale = std::sqrt(u2);
    // Combined absolute/relative test: ||r|| <= tol (sqrt(dim) + scale).
    double rel_p = primal / (std::sqrt(2.0 * n_total) + pscale);
    double rel_d = dual / (std::sqrt(n_total) + dscale);

    double obj = stacked_objective(p, s, params.boundary);
    if (!params.accelerate) {
      z = std::move(z_new);
      u = std::move(u_new);
      zh = z;
      uh = u;
    } else {
      // An extrapolated step is kept only if it lowers both the combined
      // residual and the objective; otherwise it is discarded and the next
      // step is a plain one from the last accepted iterate.
      const bool extrapolated = momentum > 1.0;
      const bool worse = combined >= restart_eta * combined_prev ||
                         obj > accepted_obj + 1e-12 * std::abs(accepted_obj);
      if (extrapolated && worse) {
        ++rep.rejected_steps;
        momentum = 1.0;
        zh = z;
        uh = u;
        s = accepted;
        obj = accepted_obj;
        rel_p = accepted_p;
        rel_d = accepted_d;
      } else {
        const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double w = (momentum - 1.0) / next;
        for (size_t j = 0; j < J; ++j) {
          zh[j] = z_new[j] + w * (z_new[j] - z[j]);
          uh[j] = u_new[j] + w * (u_new[j] - u[j]);
        }
        z = std::move(z_new);
        u = std::move(u_new);
        momentum = next;
        combined_prev = combined;
        accepted = s;
        accepted_obj = obj;
        accepted_p = rel_p;
        accepted_d = rel_d;
      }
    }

    rep.history.push_back({it, obj, rel_p, rel_d, rho / gain, cg.iterations});
    rep.iterations = it;
    if (obj < best_obj) {
      best_obj = obj;
      best = s;
    }
    if (rel_p < params.tol_primal && rel_d < params.tol_dual) {
      rep.converged = true;
      break;
    }
    if (params.adapt_rho && it <= params.adapt_until) {
      double factor = 1.0;
      if (rel_p > params.adapt_ratio * rel_d) factor = params.adapt_factor;
      else if (rel_d > params.adapt_ratio * rel_p) factor = 1.0 / params.adapt_factor;
      if (factor != 1.0) {
        rho *= factor;
        for (size_t j = 0; j < J; ++j) {
          u[j] /= factor;
          uh[j] = u[j];
          zh[j] = z[j];
        }
        momentum = 1.0;
        combined_prev = std::numeric_limits<double>::infinity();
      }
    }
  }
  if (!rep.converged) {
    rep.warnings.push_back("ADMM did not reach tolerance in " + std::to_string(params.max_iter) +
                           " iterations; returning best iterate");
    s = best;
  }
  rep.final_rho = rho / gain;
  rep.objective = stacked_objective(p, s, params.boundary);
  return res;
}

SolveResult solve_l1(const FourierFrame& b, double mu, const AdmmParams& params) {
  if (!(mu > 0)) throw Error("solve_l1: mu must be positive");
  StackedProblem p;
  p.data.push_back(fidelity_from_frame(b, params.scale));
  p.thresholds.push_back(Vec::Constant(b.grid.pixels(), mu));
  auto r = solve_stacked(p, params);
  return {ImageGrid(b.grid, unvectorize(r.s[0], b.grid.side(), b.grid.side())), std::move(r.report)};
}

SolveResult solve_vbjs(const FourierFrame& b, const WeightMask& W, const AdmmParams& params) {
  StackedProblem p;
  p.data.push_back(fidelity_from_frame(b, params.scale));
  p.thresholds.push_back(W.w);
  auto r = solve_stacked(p, params);
  return {ImageGrid(b.grid, unvectorize(r.s[0], b.grid.side(), b.grid.side())), std::move(r.report)};
}

StackedProblem stacked_from_joint(const JointProblem& jp, FidelityScale scale) {
  if (jp.weights.size() != jp.frames.size())
    throw DimensionError("solve_joint: need one weight mask per frame");
  StackedProblem p;
  for (size_t j = 0; j < jp.frames.size(); ++j) {
    p.data.push_back(fidelity_from_frame(jp.frames[j], scale));
    p.thresholds.push_back(jp.weights[j].w);
  }
  p.phi = jp.phi;
  p.beta = jp.beta;
  return p;
}

JointResult solve_joint(const JointProblem& jp, const AdmmParams& params) {
  const StackedProblem p = stacked_from_joint(jp, params.scale);
  auto r = solve_stacked(p, params);
  JointResult out;
  for (size_t j = 0; j < jp.frames.size(); ++j) {
    const GridSpec& g = jp.frames[j].grid;
    out.images.emplace_back(g, unvectorize(r.s[j], g.side(), g.side()));
  }
  out.report = std::move(r.report);
  return out;
}

MuSelection select_mu_and_solve(const FourierFrame& b, double sigma, double xi, int k_max,
                                std::uint64_t seed, const AdmmParams& params) {
  if (k_max < 1) throw Error("select_mu_and_solve: K_max must be >= 1");
  if (!(sigma > 0) || !(xi > 0)) throw Error("select_mu_and_solve: sigma and xi must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> draw(sigma / xi, sigma);
  const FidelityData d = fidelity_from_frame(b, params.scale);
  const long available = count_set(d.mask);
  MuSelection sel;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_max; ++k) {
    double mu = draw(rng);
    while (!(mu > 0)) mu = draw(rng);
    SolveResult r = solve_l1(b, mu, params);
    const double misfit = data_misfit(d, vectorize(r.image.values)) / static_cast<double>(available);
    sel.candidates.push_back(mu);
    sel.misfit.push_back(misfit);
    if (misfit < best) {
      best = misfit;
      sel.mu = mu;
      sel.best = std::move(r);
    }
  }
  return sel;
}

double tv_spread(const RealImage& f, TVOperator::Boundary boundary) {
  const TVOperator L(f.rows(), f.cols(), boundary);
  const Vec d = L.apply(vectorize(f));
  const double mean = d.mean();
  return std::sqrt((d.array() - mean).square().sum() / static_cast<double>(d.size() - 1));
}

}  // namespace seqrecon
