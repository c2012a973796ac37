#pragma once

#include <complex>
#include <vector>

namespace bbm {

using cplx = std::complex<double>;

// FFTW r2c/c2r plan pair of size n. Unnormalized: backward(forward(f)) == n f.
// Planning goes through a global lock; an instance is used by one thread
// (see fft_for).
class RealFFT {
 public:
  explicit RealFFT(int n);
  ~RealFFT();
  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;

  int size() const { return n_; }
  int modes() const { return n_ / 2 + 1; }
  void forward(const double* in, cplx* out) const;
  void backward(const cplx* in, double* out) const;  // input is left intact

 private:
  int n_;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
  mutable std::vector<cplx> scratch_;
};

// Per-thread cache of plans keyed by size.
const RealFFT& fft_for(int n);

// Angular wavenumbers 0, pi/L, 2 pi/L, ... for the n/2+1 half spectrum.
std::vector<double> wavenumbers(int n, double L);

}  // namespace bbm
