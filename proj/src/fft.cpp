#include "seqrecon/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace seqrecon::fft {
namespace {

// Plan creation in FFTW is not thread-safe; execution on fresh arrays is, as
// long as the plans were made with FFTW_UNALIGNED.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plans] : plans_) {
      fftw_destroy_plan(plans.first);
      fftw_destroy_plan(plans.second);
    }
  }

  std::pair<fftw_plan, fftw_plan> get(int rows, int cols) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find({rows, cols});
    if (it != plans_.end()) return it->second;
    auto* buf_in = fftw_alloc_complex(static_cast<size_t>(rows) * cols);
    auto* buf_out = fftw_alloc_complex(static_cast<size_t>(rows) * cols);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan fwd = fftw_plan_dft_2d(rows, cols, buf_in, buf_out, FFTW_FORWARD, flags);
    fftw_plan bwd = fftw_plan_dft_2d(rows, cols, buf_in, buf_out, FFTW_BACKWARD, flags);
    fftw_free(buf_in);
    fftw_free(buf_out);
    if (!fwd || !bwd) throw Error("fft: failed to create FFTW plan");
    return plans_.emplace(std::pair{rows, cols}, std::pair{fwd, bwd}).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::pair<fftw_plan, fftw_plan>> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

ComplexImage run(const ComplexImage& x, bool forward_dir) {
  const int r = static_cast<int>(x.rows()), c = static_cast<int>(x.cols());
  auto [fwd, bwd] = cache().get(r, c);
  ComplexImage in = x;  // FFTW may scribble on the input for some plans
  ComplexImage out(r, c);
  fftw_execute_dft(forward_dir ? fwd : bwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

ComplexImage forward(const ComplexImage& x) { return run(x, true); }

ComplexImage forward(const RealImage& x) { return run(x.cast<std::complex<double>>(), true); }

ComplexImage backward(const ComplexImage& x) { return run(x, false); }

}  // namespace seqrecon::fft
