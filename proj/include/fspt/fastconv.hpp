#pragma once

#include "fspt/geometry.hpp"
#include "fspt/grid.hpp"
#include "fspt/quadrature.hpp"

namespace fspt {

/// Applies the Toeplitz weight matrix of a KernelTable to gridded densities
/// in O(N log N) via the padded-FFT circulant embedding. Owns the transform
/// plans and scratch buffers of one solve; a single instance is not safe for
/// concurrent use, distinct instances are.
class ToeplitzConvolver {
  public:
    explicit ToeplitzConvolver(const KernelTable& kt);
    ~ToeplitzConvolver();
    ToeplitzConvolver(const ToeplitzConvolver&) = delete;
    ToeplitzConvolver& operator=(const ToeplitzConvolver&) = delete;

    /// out_j = sum_k w_{|j-k|} density_k over all n^2 nodes.
    ComplexField apply(const ComplexField& density);

    const GridSpec& grid() const { return grid_; }

  private:
    GridSpec grid_;
    std::vector<cplx> gen_hat_;  // forward transform of the circulant generator
    std::vector<cplx> buf_;      // 2n x 2n work buffer
    void* fwd_ = nullptr;        // fftw_plan
    void* bwd_ = nullptr;
};

/// One-shot convenience wrapper around ToeplitzConvolver.
ComplexField toeplitz_apply(const KernelTable& kt, const ComplexField& density);

/// Evaluates the truncated Fourier series of the indicator at all grid
/// nodes exactly (to roundoff) with a single size-n inverse DFT; modes +-F
/// alias into shared bins when F = n/2. Requires F <= n/2.
ComplexField eval_smoothed_indicator(const IndicatorCoeffs& ic, const GridSpec& g);

}  // namespace fspt
