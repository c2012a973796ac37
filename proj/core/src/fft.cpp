#include "bbmlab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace bbm {

namespace {
std::mutex& planner_lock() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFFT::RealFFT(int n) : n_(n), scratch_(n / 2 + 1) {
  std::lock_guard<std::mutex> lock(planner_lock());
  std::vector<double> buf(n);
  std::vector<cplx> spec(n / 2 + 1);
  auto* c = reinterpret_cast<fftw_complex*>(spec.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fwd_ = fftw_plan_dft_r2c_1d(n, buf.data(), c, flags);
  bwd_ = fftw_plan_dft_c2r_1d(n, c, buf.data(), flags | FFTW_DESTROY_INPUT);
}

RealFFT::~RealFFT() {
  std::lock_guard<std::mutex> lock(planner_lock());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void RealFFT::forward(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFFT::backward(const cplx* in, double* out) const {
  std::memcpy(scratch_.data(), in, sizeof(cplx) * scratch_.size());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(bwd_),
                       reinterpret_cast<fftw_complex*>(scratch_.data()), out);
}

const RealFFT& fft_for(int n) {
  thread_local std::map<int, std::unique_ptr<RealFFT>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<RealFFT>(n)).first;
  return *it->second;
}

std::vector<double> wavenumbers(int n, double L) {
  std::vector<double> k(n / 2 + 1);
  const double dk = M_PI / L;
  for (int j = 0; j <= n / 2; ++j) k[j] = j * dk;
  return k;
}

}  // namespace bbm
