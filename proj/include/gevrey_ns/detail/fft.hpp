#ifndef GEVREY_NS_DETAIL_FFT_HPP
#define GEVREY_NS_DETAIL_FFT_HPP

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace gevrey_ns::detail {

using cplx = std::complex<double>;

// Square complex-to-complex 2D transform pair. Plans are created once per
// size under a lock (the FFTW planner is not reentrant) and executed through
// the new-array interface, which is thread safe.
class fft_plan_2d {
public:
    explicit fft_plan_2d(int n) : n_(n)
    {
        std::vector<cplx> scratch(static_cast<std::size_t>(n) * n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, flags);
    }

    fft_plan_2d(const fft_plan_2d&) = delete;
    fft_plan_2d& operator=(const fft_plan_2d&) = delete;

    ~fft_plan_2d()
    {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    int size() const noexcept { return n_; }

    // Unnormalized: forward computes sum_x f(x) e^{-i xi.x}.
    void forward(std::vector<cplx>& data) const
    {
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(forward_, p, p);
    }

    // Synthesis: f(x) = sum_xi c(xi) e^{+i xi.x}.
    void backward(std::vector<cplx>& data) const
    {
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(backward_, p, p);
    }

private:
    int n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

inline const fft_plan_2d& plan_for(int n)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<fft_plan_2d>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<fft_plan_2d>(n);
    }
    return *slot;
}

} // namespace gevrey_ns::detail

#endif
