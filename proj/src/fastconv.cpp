#include "fspt/fastconv.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace fspt {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::vector<cplx>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

}  // namespace

ToeplitzConvolver::ToeplitzConvolver(const KernelTable& kt) : grid_(kt.grid) {
    const int two_n = 2 * grid_.n;
    const long sz = static_cast<long>(two_n) * two_n;
    if (static_cast<long>(kt.gen.size()) != sz)
        throw GridMismatch("kernel table size does not match its grid");
    gen_hat_ = kt.gen;
    buf_.assign(sz, cplx(0.0, 0.0));
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd_ = fftw_plan_dft_2d(two_n, two_n, as_fftw(buf_), as_fftw(buf_), FFTW_FORWARD,
                                FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(two_n, two_n, as_fftw(buf_), as_fftw(buf_), FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    // transform the generator once through the shared buffer
    std::memcpy(buf_.data(), gen_hat_.data(), sz * sizeof(cplx));
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(buf_), as_fftw(buf_));
    std::memcpy(gen_hat_.data(), buf_.data(), sz * sizeof(cplx));
}

ToeplitzConvolver::~ToeplitzConvolver() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

ComplexField ToeplitzConvolver::apply(const ComplexField& density) {
    if (!(density.grid == grid_)) throw GridMismatch("toeplitz_apply: density grid mismatch");
    const int n = grid_.n;
    const int two_n = 2 * n;
    std::fill(buf_.begin(), buf_.end(), cplx(0.0, 0.0));
    for (int j = 0; j < n; ++j)
        std::memcpy(buf_.data() + static_cast<long>(j) * two_n,
                    density.values.data() + static_cast<long>(j) * n, n * sizeof(cplx));
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(buf_), as_fftw(buf_));
    const double scale = 1.0 / (static_cast<double>(two_n) * two_n);
    for (long i = 0; i < static_cast<long>(buf_.size()); ++i) buf_[i] *= gen_hat_[i] * scale;
    fftw_execute_dft(static_cast<fftw_plan>(bwd_), as_fftw(buf_), as_fftw(buf_));
    ComplexField out(grid_);
    for (int j = 0; j < n; ++j)
        std::memcpy(out.values.data() + static_cast<long>(j) * n,
                    buf_.data() + static_cast<long>(j) * two_n, n * sizeof(cplx));
    return out;
}

ComplexField toeplitz_apply(const KernelTable& kt, const ComplexField& density) {
    ToeplitzConvolver conv(kt);
    return conv.apply(density);
}

ComplexField eval_smoothed_indicator(const IndicatorCoeffs& ic, const GridSpec& g) {
    const int n = g.n;
    const int F = ic.F;
    if (F > n / 2) throw DomainError("eval_smoothed_indicator: F exceeds n/2");
    if (ic.a != g.a) throw GridMismatch("eval_smoothed_indicator: period mismatch");

    // Node x_j = -(a,a) + h j gives mode phase e^{-i pi (j+k)} e^{2 pi i (j.j1 + k.j2)/n}:
    // accumulate c_jk (-1)^{j+k} into DFT bin (j mod n, k mod n); aliased
    // modes (|j| = n/2 when F = n/2) share a bin.
    std::vector<cplx> bins(static_cast<long>(n) * n, cplx(0.0, 0.0));
    const int m = 2 * F + 1;
    for (int j = -F; j <= F; ++j) {
        const int bj = ((j % n) + n) % n;
        const double sj = (j & 1) ? -1.0 : 1.0;
        for (int k = -F; k <= F; ++k) {
            const int bk = ((k % n) + n) % n;
            const double sk = (k & 1) ? -1.0 : 1.0;
            bins[static_cast<long>(bj) * n + bk] +=
                ic.c[static_cast<long>(j + F) * m + (k + F)] * (sj * sk);
        }
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(bins.data()),
                                reinterpret_cast<fftw_complex*>(bins.data()), FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
    ComplexField out(g);
    out.values = std::move(bins);
    return out;
}

}  // namespace fspt
