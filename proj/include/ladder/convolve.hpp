#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <vector>

namespace ladder {

// Repeated convolution of a state vector with a fixed step mass. Small
// supports go through the axpy kernel; wide ones through FFTW with the step
// spectrum cached per transform size.
class Convolver {
public:
    explicit Convolver(std::vector<double> taps, std::size_t fft_threshold = std::size_t{1} << 18);
    ~Convolver();
    Convolver(const Convolver&) = delete;
    Convolver& operator=(const Convolver&) = delete;

    // out has size in.size() + taps.size() - 1; out[i + k] = sum in[i] * taps[k].
    void apply(const std::vector<double>& in, std::vector<double>& out);
    bool used_fft() const { return used_fft_; }
    bool last_used_fft() const { return last_fft_; }
    std::size_t taps_size() const { return taps_.size(); }

private:
    struct Plan;
    Plan& plan_for(std::size_t n);
    std::vector<double> taps_;
    std::vector<std::size_t> nonzero_;
    std::size_t fft_threshold_;
    bool used_fft_ = false;
    bool last_fft_ = false;
    std::map<std::size_t, std::unique_ptr<Plan>> plans_;
};

}  // namespace ladder
