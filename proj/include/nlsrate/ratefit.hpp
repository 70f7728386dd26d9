#pragma once

// Log-log rate fitting for (N, error) samples.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlsrate/error.hpp"

namespace nlsrate {

enum class FitModel { pure_power, power_with_loglog };

inline std::string to_string(FitModel m) {
    return m == FitModel::pure_power ? "pure-power" : "power-with-loglog";
}

struct RateSample {
    double N;
    double value;
};

struct RateFit {
    std::vector<RateSample> samples;  ///< samples used by the fit, sorted by N
    std::optional<RateSample> discarded;
    std::vector<double> residuals;  ///< log-space, aligned with samples
    double slope = 0.0;
    double intercept = 0.0;
    double loglog_coefficient = 0.0;  ///< c in a + s ln N + c ln ln N
    double max_residual = 0.0;
    FitModel model = FitModel::pure_power;
};

inline bool is_dyadic(std::int64_t n) { return n >= 1 && (n & (n - 1)) == 0; }

inline bool all_dyadic(const std::vector<std::int64_t>& ns) {
    return std::all_of(ns.begin(), ns.end(), [](std::int64_t n) { return is_dyadic(n); });
}

namespace detail {

// Least squares on columns of a design matrix (at most three), via normal equations
// with partial pivoting.
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& columns,
                                         const std::vector<double>& y) {
    const std::size_t p = columns.size();
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < p; ++c)
            for (std::size_t i = 0; i < y.size(); ++i) a[r][c] += columns[r][i] * columns[c][i];
        for (std::size_t i = 0; i < y.size(); ++i) a[r][p] += columns[r][i] * y[i];
    }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        if (a[c][c] == 0.0) throw DegenerateSamples("rate fit: singular design matrix");
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> x(p);
    for (std::size_t c = 0; c < p; ++c) x[c] = a[c][p] / a[c][c];
    return x;
}

inline void fit_in_place(RateFit& fit) {
    std::vector<double> x, y, ones, llx;
    for (const auto& s : fit.samples) {
        x.push_back(std::log(s.N));
        y.push_back(std::log(s.value));
        ones.push_back(1.0);
        llx.push_back(std::log(std::log(s.N)));
    }
    if (fit.model == FitModel::pure_power) {
        const auto c = least_squares({ones, x}, y);
        fit.intercept = c[0];
        fit.slope = c[1];
        fit.loglog_coefficient = 0.0;
    } else {
        const auto c = least_squares({ones, x, llx}, y);
        fit.intercept = c[0];
        fit.slope = c[1];
        fit.loglog_coefficient = c[2];
    }
    fit.residuals.clear();
    fit.max_residual = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i] + fit.loglog_coefficient * llx[i]);
        fit.residuals.push_back(r);
        fit.max_residual = std::max(fit.max_residual, std::abs(r));
    }
}

}  // namespace detail

struct FitOptions {
    FitModel model = FitModel::pure_power;
    /// Drop the smallest-N sample when its residual exceeds 3x the median residual.
    bool allow_discard = false;
    /// Samples at or below this value are treated as round-off.
    double degenerate_floor = 1e-10;
};

inline RateFit fit_rate(std::vector<RateSample> samples, const FitOptions& opt = {}) {
    if (samples.size() < 4)
        throw PreconditionError("rate fit needs at least 4 samples, got " + std::to_string(samples.size()));
    std::sort(samples.begin(), samples.end(), [](const RateSample& a, const RateSample& b) { return a.N < b.N; });
    for (const auto& s : samples) {
        if (!(s.N > 1.0)) throw PreconditionError("rate fit needs N > 1");
        if (!std::isfinite(s.value) || s.value <= opt.degenerate_floor)
            throw DegenerateSamples("degenerate samples: value " + std::to_string(s.value) + " at N = " +
                                    std::to_string(s.N) + " is at or below round-off");
    }
    if (opt.model == FitModel::power_with_loglog && samples.size() < 4)
        throw PreconditionError("power-with-loglog fit needs at least 4 samples");

    RateFit fit;
    fit.model = opt.model;
    fit.samples = std::move(samples);
    detail::fit_in_place(fit);

    const std::size_t min_after_discard = opt.model == FitModel::pure_power ? 4 : 5;
    if (opt.allow_discard && fit.samples.size() > min_after_discard) {
        std::vector<double> mags;
        for (double r : fit.residuals) mags.push_back(std::abs(r));
        std::nth_element(mags.begin(), mags.begin() + static_cast<long>(mags.size() / 2), mags.end());
        double median = mags[mags.size() / 2];
        if (mags.size() % 2 == 0) {
            const double upper = median;
            const double lower = *std::max_element(mags.begin(), mags.begin() + static_cast<long>(mags.size() / 2));
            median = 0.5 * (upper + lower);
        }
        if (std::abs(fit.residuals.front()) > 3.0 * median) {
            fit.discarded = fit.samples.front();
            fit.samples.erase(fit.samples.begin());
            detail::fit_in_place(fit);
        }
    }
    if (!std::isfinite(fit.slope)) throw DegenerateSamples("rate fit produced a non-finite slope");
    return fit;
}

}  // namespace nlsrate
