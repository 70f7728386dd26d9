#pragma once

// Thin RAII layer over FFTW. Plans are created once per (shape, direction)
// and re-executed on arbitrary buffers through the new-array interface, which
// FFTW guarantees to be thread-safe. Only planning is serialized.

#include <fftw3.h>

#include <array>
#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <tuple>

namespace nlsrate::detail {

enum class FftDirection { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

class FftPlanCache {
public:
    FftPlanCache() = default;
    FftPlanCache(const FftPlanCache&) = delete;
    FftPlanCache& operator=(const FftPlanCache&) = delete;

    ~FftPlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int rank, const std::array<int, 3>& shape, FftDirection dir) {
        const Key key{rank, shape, static_cast<int>(dir)};
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::size_t total = 1;
        for (int a = 0; a < rank; ++a) total *= static_cast<std::size_t>(shape[a]);
        auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
        // FFTW_ESTIMATE never measures, so the plan (and its arithmetic) is a
        // pure function of the shape.
        fftw_plan plan = fftw_plan_dft(rank, shape.data(), buffer, buffer, static_cast<int>(dir),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buffer);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    using Key = std::tuple<int, std::array<int, 3>, int>;
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

inline FftPlanCache& plan_cache() {
    static FftPlanCache cache;
    return cache;
}

/// Unnormalized in-place DFT, row-major with axis 0 slowest.
inline void fft_inplace(std::span<std::complex<double>> data, int rank,
                        const std::array<int, 3>& shape, FftDirection dir) {
    fftw_plan plan = plan_cache().get(rank, shape, dir);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace nlsrate::detail
