#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

namespace stablepoly {

/// FFTW planning is not thread-safe; every plan is created under this lock.
std::mutex& fftw_planner_mutex();

/// In-place complex DFT of rank 1..3 over an owned, FFTW-aligned buffer.
/// sign = +1 computes sum_m f[m] exp(+2 pi i j.m / N).
class ComplexDft {
 public:
  ComplexDft(const std::vector<int>& dims, int sign);
  ~ComplexDft();
  ComplexDft(const ComplexDft&) = delete;
  ComplexDft& operator=(const ComplexDft&) = delete;

  std::complex<double>* data() { return data_; }
  std::size_t size() const { return size_; }
  void execute();

 private:
  std::complex<double>* data_ = nullptr;
  std::size_t size_ = 0;
  void* plan_ = nullptr;
};

/// Real-to-complex / complex-to-real pair on a fixed real shape, used for
/// linear convolutions on zero-padded boxes.
class RealDft {
 public:
  explicit RealDft(const std::vector<int>& dims);
  ~RealDft();
  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;

  double* real() { return real_; }
  std::complex<double>* spectrum() { return spec_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t spectrum_size() const { return spec_size_; }
  const std::vector<int>& dims() const { return dims_; }
  void forward();
  /// Unnormalized inverse (scaled by real_size()).
  void backward();

 private:
  std::vector<int> dims_;
  double* real_ = nullptr;
  std::complex<double>* spec_ = nullptr;
  std::size_t real_size_ = 0;
  std::size_t spec_size_ = 0;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace stablepoly
