#include "fft.hpp"

#include <cstring>
#include <mutex>

#include <fftw3.h>

namespace gravphase::detail {

namespace {
std::mutex planner_mutex;
}

Fft::Fft(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex);
    auto* buf = fftw_alloc_complex(n);
    buf_ = buf;
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(buf_);
}

static void run(void* plan, void* buf, std::vector<std::complex<double>>& data, std::size_t n) {
    std::memcpy(buf, data.data(), n * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(plan));
    std::memcpy(data.data(), buf, n * sizeof(fftw_complex));
}

void Fft::forward(std::vector<std::complex<double>>& data) { run(fwd_, buf_, data, n_); }
void Fft::backward(std::vector<std::complex<double>>& data) { run(bwd_, buf_, data, n_); }

std::vector<double> wavenumbers(std::size_t n, double h) {
    std::vector<double> k(n);
    const double dk = 2.0 * 3.14159265358979323846 / (static_cast<double>(n) * h);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<long long>(i);
        k[i] = dk * static_cast<double>(i < n / 2 ? j : j - static_cast<long long>(n));
    }
    return k;
}

} // namespace gravphase::detail
