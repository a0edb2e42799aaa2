#include "ladder/convolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "ladder/kernels.hpp"

namespace ladder {
namespace {

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

struct Convolver::Plan {
    std::size_t n;
    double* real;
    fftw_complex* spec;
    fftw_complex* taps_spec;
    fftw_plan fwd, inv;

    Plan(std::size_t n_, const std::vector<double>& taps) : n(n_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        real = fftw_alloc_real(n);
        spec = fftw_alloc_complex(n / 2 + 1);
        taps_spec = fftw_alloc_complex(n / 2 + 1);
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real, FFTW_ESTIMATE);
        std::fill(real, real + n, 0.0);
        std::copy(taps.begin(), taps.end(), real);
        fftw_execute(fwd);
        std::memcpy(taps_spec, spec, sizeof(fftw_complex) * (n / 2 + 1));
    }
    ~Plan() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(spec);
        fftw_free(taps_spec);
    }
};

Convolver::Convolver(std::vector<double> taps, std::size_t fft_threshold)
    : taps_(std::move(taps)), fft_threshold_(fft_threshold) {
    for (std::size_t k = 0; k < taps_.size(); ++k)
        if (taps_[k] != 0.0) nonzero_.push_back(k);
}

Convolver::~Convolver() = default;

Convolver::Plan& Convolver::plan_for(std::size_t n) {
    auto it = plans_.find(n);
    if (it == plans_.end()) it = plans_.emplace(n, std::make_unique<Plan>(n, taps_)).first;
    return *it->second;
}

void Convolver::apply(const std::vector<double>& in, std::vector<double>& out) {
    const std::size_t len = in.size() + taps_.size() - 1;
    out.assign(len, 0.0);
    const bool fft = in.size() >= 64 && nonzero_.size() >= 64 &&
                     in.size() * nonzero_.size() > fft_threshold_;
    used_fft_ = used_fft_ || fft;
    last_fft_ = fft;
    if (!fft) {
        const auto& k = kernels::active();
        for (std::size_t t : nonzero_) k.axpy(taps_[t], in.data(), out.data() + t, in.size());
        return;
    }
    Plan& p = plan_for(next_pow2(len));
    std::fill(p.real, p.real + p.n, 0.0);
    std::copy(in.begin(), in.end(), p.real);
    fftw_execute(p.fwd);
    for (std::size_t i = 0; i < p.n / 2 + 1; ++i) {
        double ar = p.spec[i][0], ai = p.spec[i][1];
        double br = p.taps_spec[i][0], bi = p.taps_spec[i][1];
        p.spec[i][0] = ar * br - ai * bi;
        p.spec[i][1] = ar * bi + ai * br;
    }
    fftw_execute(p.inv);
    const double scale = 1.0 / static_cast<double>(p.n);
    // Round-off leaves values of order 1e-17 around true zeros; negative ones
    // are clamped so masses stay probabilities.
    for (std::size_t i = 0; i < len; ++i) out[i] = std::max(0.0, p.real[i] * scale);
}

}  // namespace ladder
