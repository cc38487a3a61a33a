#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gravphase::detail {

// In-place complex FFT of fixed length. Unnormalized in both directions.
// Plans are created with FFTW_ESTIMATE; construct from one thread at a time.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const { return n_; }
    void forward(std::vector<std::complex<double>>& data);
    void backward(std::vector<std::complex<double>>& data);

private:
    std::size_t n_;
    void* fwd_;
    void* bwd_;
    void* buf_;
};

// Angular wavenumbers 2*pi*k/(n*h) in FFT order.
std::vector<double> wavenumbers(std::size_t n, double h);

} // namespace gravphase::detail
