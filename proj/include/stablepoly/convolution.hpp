#pragma once

#include <map>
#include <memory>
#include <vector>

#include "stablepoly/jump_kernels.hpp"
#include "stablepoly/lattice.hpp"

namespace stablepoly {

enum class ConvolutionMode { automatic, naive, fft };

/// Nonnegative values on a box (row-major, lexicographic order).
struct DenseLayer {
  Box box;
  std::vector<double> values;
};

/// out(y) = sum_s in(y - s) q(s) over in.box + bounding box of q.
///
/// The transform route works on the linear-domain layer; outputs below
/// 1e-13 of the layer maximum are round-off and are set to zero, with their
/// positive part reported as clamped mass.
class LayerConvolver {
 public:
  explicit LayerConvolver(JumpKernel kernel, ConvolutionMode mode = ConvolutionMode::automatic);
  ~LayerConvolver();
  LayerConvolver(LayerConvolver&&) noexcept;
  LayerConvolver& operator=(LayerConvolver&&) noexcept;

  /// Returns the clamped mass (zero on the direct route).
  double apply(const DenseLayer& in, DenseLayer& out);
  ConvolutionMode last_route() const { return last_; }
  const JumpKernel& kernel() const { return kernel_; }

 private:
  struct FftCache;
  void apply_naive(const DenseLayer& in, DenseLayer& out) const;
  double apply_fft(const DenseLayer& in, DenseLayer& out);

  JumpKernel kernel_;
  ConvolutionMode mode_;
  ConvolutionMode last_ = ConvolutionMode::naive;
  std::unique_ptr<FftCache> fft_;
};

/// Smallest n' >= n of the form 2^a 3^b.
int good_fft_size(int n);

}  // namespace stablepoly
