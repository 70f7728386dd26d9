#pragma once

// Periodic-box discretization and the spectral field type.
//
// Coefficients are stored in FFT order (zero mode first, negative modes in the
// upper half of each axis), row-major with axis 0 slowest. With V the box
// volume and n the total point count,
//
//     c_m = sqrt(V) / n * sum_j u_j exp(-i k_m . x_j),
//     u_j = 1 / sqrt(V) * sum_m c_m exp(+i k_m . x_j),
//
// so that sum_m |c_m|^2 == (V / n) sum_j |u_j|^2 holds exactly (discrete Parseval).

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <concepts>
#include <complex>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlsrate/error.hpp"
#include "nlsrate/fft.hpp"

namespace nlsrate {

using Complex = std::complex<double>;
using Wavevector = std::array<double, 3>;

inline double norm2(const Wavevector& k) { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }

class GridSpec {
public:
    GridSpec() : GridSpec({2 * std::numbers::pi}, {2}) {}

    GridSpec(std::vector<double> extents, std::vector<int> modes, bool dealias = false)
        : dim_(static_cast<int>(extents.size())), dealias_(dealias) {
        if (dim_ < 1 || dim_ > 3)
            throw PreconditionError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim_));
        if (modes.size() != extents.size())
            throw PreconditionError("grid needs one mode count per axis");
        for (int a = 0; a < 3; ++a) {
            if (a < dim_) {
                if (!(extents[a] > 0.0) || !std::isfinite(extents[a]))
                    throw PreconditionError("box extent must be positive on axis " + std::to_string(a));
                if (modes[a] < 2 || modes[a] % 2 != 0)
                    throw PreconditionError("mode count must be a positive even integer on axis " +
                                            std::to_string(a));
                extent_[a] = extents[a];
                modes_[a] = modes[a];
            } else {
                // Inactive axes carry a single zero mode.
                extent_[a] = 2 * std::numbers::pi;
                modes_[a] = 1;
            }
            wavenumbers_[a].resize(static_cast<std::size_t>(modes_[a]));
            for (int i = 0; i < modes_[a]; ++i)
                wavenumbers_[a][static_cast<std::size_t>(i)] = spacing(a) * signed_index(a, i);
        }
    }

    /// Isotropic convenience constructor.
    static GridSpec cube(int dim, double extent, int modes, bool dealias = false) {
        return GridSpec(std::vector<double>(static_cast<std::size_t>(dim), extent),
                        std::vector<int>(static_cast<std::size_t>(dim), modes), dealias);
    }

    int dim() const { return dim_; }
    bool dealias() const { return dealias_; }
    double extent(int axis) const { return extent_[axis]; }
    int modes(int axis) const { return modes_[axis]; }
    const std::array<int, 3>& shape() const { return modes_; }

    GridSpec with_dealias(bool on) const {
        GridSpec g = *this;
        g.dealias_ = on;
        return g;
    }

    /// Same resolution in wavenumber spacing terms: extents and mode counts scaled together.
    GridSpec doubled_box() const {
        std::vector<double> L;
        std::vector<int> n;
        for (int a = 0; a < dim_; ++a) {
            L.push_back(2 * extent_[a]);
            n.push_back(2 * modes_[a]);
        }
        return GridSpec(L, n, dealias_);
    }

    std::size_t size() const {
        return static_cast<std::size_t>(modes_[0]) * static_cast<std::size_t>(modes_[1]) *
               static_cast<std::size_t>(modes_[2]);
    }

    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim_; ++a) v *= extent_[a];
        return v;
    }

    double spacing(int axis) const { return 2 * std::numbers::pi / extent_[axis]; }

    /// Integer mode number m in {-n/2, ..., n/2 - 1} of storage index i.
    int signed_index(int axis, int i) const {
        if (modes_[axis] == 1) return 0;
        return i < modes_[axis] / 2 ? i : i - modes_[axis];
    }

    int storage_index(int axis, int m) const {
        const int n = modes_[axis];
        return ((m % n) + n) % n;
    }

    double wavenumber(int axis, int i) const { return wavenumbers_[axis][static_cast<std::size_t>(i)]; }
    const std::vector<double>& wavenumbers(int axis) const { return wavenumbers_[axis]; }

    /// Largest representable |k| on an axis (the -n/2 mode).
    double max_wavenumber(int axis) const {
        return modes_[axis] == 1 ? 0.0 : spacing(axis) * (modes_[axis] / 2);
    }

    double min_max_wavenumber() const {
        double m = max_wavenumber(0);
        for (int a = 1; a < dim_; ++a) m = std::min(m, max_wavenumber(a));
        return m;
    }

    double max_wavevector_norm2() const {
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) s += max_wavenumber(a) * max_wavenumber(a);
        return s;
    }

    std::size_t flat(int i0, int i1 = 0, int i2 = 0) const {
        return (static_cast<std::size_t>(i0) * static_cast<std::size_t>(modes_[1]) +
                static_cast<std::size_t>(i1)) *
                   static_cast<std::size_t>(modes_[2]) +
               static_cast<std::size_t>(i2);
    }

    std::array<int, 3> unflatten(std::size_t idx) const {
        const auto n1 = static_cast<std::size_t>(modes_[1]);
        const auto n2 = static_cast<std::size_t>(modes_[2]);
        return {static_cast<int>(idx / (n1 * n2)), static_cast<int>((idx / n2) % n1),
                static_cast<int>(idx % n2)};
    }

    Wavevector wavevector(std::size_t idx) const {
        const auto i = unflatten(idx);
        return {wavenumber(0, i[0]), wavenumber(1, i[1]), wavenumber(2, i[2])};
    }

    double coordinate(int axis, int j) const { return extent_[axis] * j / modes_[axis]; }

    /// 2/3-rule retention: every axis satisfies |m_a| <= (2/3)(n_a/2).
    bool retained(std::size_t idx) const {
        const auto i = unflatten(idx);
        for (int a = 0; a < dim_; ++a) {
            const int m = std::abs(signed_index(a, i[a]));
            if (3 * m > modes_[a]) return false;
        }
        return true;
    }

    friend bool operator==(const GridSpec& x, const GridSpec& y) {
        return x.dim_ == y.dim_ && x.extent_ == y.extent_ && x.modes_ == y.modes_;
    }

private:
    int dim_;
    bool dealias_;
    std::array<double, 3> extent_{};
    std::array<int, 3> modes_{};
    std::array<std::vector<double>, 3> wavenumbers_;
};

/// Calls fn(flat_index, wavevector) for every mode, in storage order.
template <typename Fn>
void for_each_mode(const GridSpec& grid, Fn&& fn) {
    const auto& k0 = grid.wavenumbers(0);
    const auto& k1 = grid.wavenumbers(1);
    const auto& k2 = grid.wavenumbers(2);
    std::size_t idx = 0;
    for (double a : k0)
        for (double b : k1)
            for (double c : k2) fn(idx++, Wavevector{a, b, c});
}

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!(a == b)) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

namespace detail {

template <typename Derived>
class FieldStorage {
public:
    FieldStorage() = default;
    explicit FieldStorage(GridSpec grid) : grid_(std::move(grid)), values_(grid_.size()) {}
    FieldStorage(GridSpec grid, std::vector<Complex> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw GridMismatch("field has " + std::to_string(values_.size()) +
                               " values but the grid holds " + std::to_string(grid_.size()));
    }

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<Complex> values() { return values_; }
    std::span<const Complex> values() const { return values_; }
    Complex& operator[](std::size_t i) { return values_[i]; }
    const Complex& operator[](std::size_t i) const { return values_[i]; }
    std::vector<Complex>& storage() { return values_; }

    Derived& operator+=(const Derived& o) {
        require_same_grid(grid_, o.grid_, "field addition");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return self();
    }
    Derived& operator-=(const Derived& o) {
        require_same_grid(grid_, o.grid_, "field subtraction");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return self();
    }
    Derived& operator*=(Complex s) {
        for (auto& v : values_) v *= s;
        return self();
    }

    friend Derived operator+(Derived a, const Derived& b) { return a += b; }
    friend Derived operator-(Derived a, const Derived& b) { return a -= b; }
    friend Derived operator*(Complex s, Derived a) { return a *= s; }

protected:
    GridSpec grid_;
    std::vector<Complex> values_;

private:
    Derived& self() { return static_cast<Derived&>(*this); }
};

}  // namespace detail

/// Samples on the physical grid x_j = j L / n.
class PhysicalField : public detail::FieldStorage<PhysicalField> {
public:
    using FieldStorage::FieldStorage;
};

/// Wavenumber-space representation; see the header comment for normalization.
class SpectralField : public detail::FieldStorage<SpectralField> {
public:
    using FieldStorage::FieldStorage;

    std::span<Complex> coefficients() { return values(); }
    std::span<const Complex> coefficients() const { return values(); }

    /// Coefficient of the mode with signed integer indices (m0, m1, m2).
    Complex& at_mode(int m0, int m1 = 0, int m2 = 0) {
        return values_[grid_.flat(grid_.storage_index(0, m0), grid_.storage_index(1, m1),
                                  grid_.storage_index(2, m2))];
    }
    Complex at_mode(int m0, int m1 = 0, int m2 = 0) const {
        return values_[grid_.flat(grid_.storage_index(0, m0), grid_.storage_index(1, m1),
                                  grid_.storage_index(2, m2))];
    }
};

inline SpectralField transform_forward(const PhysicalField& field) {
    const GridSpec& g = field.grid();
    std::vector<Complex> data(field.values().begin(), field.values().end());
    detail::fft_inplace(data, g.dim(), g.shape(), detail::FftDirection::forward);
    const double scale = std::sqrt(g.volume()) / static_cast<double>(g.size());
    for (auto& c : data) c *= scale;
    return SpectralField(g, std::move(data));
}

/// Forward transform of raw samples; the sample count must match the grid.
inline SpectralField transform_forward(const GridSpec& grid, std::span<const Complex> samples) {
    if (samples.size() != grid.size())
        throw GridMismatch("transform_forward: " + std::to_string(samples.size()) +
                           " samples for a grid of " + std::to_string(grid.size()));
    return transform_forward(PhysicalField(grid, std::vector<Complex>(samples.begin(), samples.end())));
}

inline PhysicalField transform_inverse(const SpectralField& field) {
    const GridSpec& g = field.grid();
    std::vector<Complex> data(field.values().begin(), field.values().end());
    detail::fft_inplace(data, g.dim(), g.shape(), detail::FftDirection::backward);
    const double scale = 1.0 / std::sqrt(g.volume());
    for (auto& c : data) c *= scale;
    return PhysicalField(g, std::move(data));
}

/// Samples fn(x) on the physical grid.
template <typename Fn>
PhysicalField sample(const GridSpec& grid, Fn&& fn) {
    PhysicalField out(grid);
    std::size_t idx = 0;
    for (int i = 0; i < grid.modes(0); ++i)
        for (int j = 0; j < grid.modes(1); ++j)
            for (int l = 0; l < grid.modes(2); ++l)
                out[idx++] = fn(std::array<double, 3>{grid.dim() > 0 ? grid.coordinate(0, i) : 0.0,
                                                      grid.dim() > 1 ? grid.coordinate(1, j) : 0.0,
                                                      grid.dim() > 2 ? grid.coordinate(2, l) : 0.0});
    return out;
}

/// Tabulates a multiplier m(k) over the grid, rejecting non-finite values.
template <typename Fn>
std::vector<Complex> tabulate_multiplier(const GridSpec& grid, Fn&& m) {
    std::vector<Complex> table(grid.size());
    for_each_mode(grid, [&](std::size_t idx, const Wavevector& k) {
        const Complex v = m(k);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFiniteValue("multiplier is not finite at k = (" + std::to_string(k[0]) + ", " +
                                 std::to_string(k[1]) + ", " + std::to_string(k[2]) + ")");
        table[idx] = v;
    });
    return table;
}

inline SpectralField apply_multiplier(SpectralField field, std::span<const Complex> table) {
    if (table.size() != field.size()) throw GridMismatch("apply_multiplier: table size mismatch");
    auto c = field.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= table[i];
    return field;
}

template <typename Fn>
    requires std::invocable<Fn, const Wavevector&>
SpectralField apply_multiplier(SpectralField field, Fn&& m) {
    const auto table = tabulate_multiplier(field.grid(), std::forward<Fn>(m));
    return apply_multiplier(std::move(field), std::span<const Complex>(table));
}

/// Zeroes the modes outside the 2/3-rule band, regardless of the grid flag.
inline SpectralField truncate_dealiased(SpectralField field) {
    const GridSpec& g = field.grid();
    for (std::size_t i = 0; i < field.size(); ++i)
        if (!g.retained(i)) field[i] = 0.0;
    return field;
}

inline SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a.grid(), b.grid(), "pointwise_product");
    PhysicalField pa = transform_inverse(a);
    const PhysicalField pb = transform_inverse(b);
    for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
    SpectralField out = transform_forward(pa);
    if (a.grid().dealias()) out = truncate_dealiased(std::move(out));
    return out;
}

/// Field with a single nonzero coefficient at signed mode indices m.
inline SpectralField single_mode(const GridSpec& grid, const std::array<int, 3>& m, Complex coefficient) {
    SpectralField f(grid);
    f.at_mode(m[0], m[1], m[2]) = coefficient;
    return f;
}

// ---------------------------------------------------------------------------
// Flat binary layout: u64 dim, u64 n_a (dim values), f64 L_a (dim values), then
// (re, im) f64 pairs. All little-endian. Coefficients are written in ascending
// signed wavenumber order per axis (m = -n/2 .. n/2-1), row-major.

namespace detail {

template <typename T>
void write_le(std::ostream& os, T value) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw Error("truncated field file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

template <typename Fn>
void for_each_ascending(const GridSpec& g, Fn&& fn) {
    for (int m0 = -g.modes(0) / 2; m0 < (g.modes(0) + 1) / 2; ++m0)
        for (int m1 = -g.modes(1) / 2; m1 < (g.modes(1) + 1) / 2; ++m1)
            for (int m2 = -g.modes(2) / 2; m2 < (g.modes(2) + 1) / 2; ++m2)
                fn(g.flat(g.storage_index(0, m0), g.storage_index(1, m1), g.storage_index(2, m2)));
}

}  // namespace detail

inline void write_field(std::ostream& os, const SpectralField& f) {
    const GridSpec& g = f.grid();
    detail::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) detail::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(g.modes(a)));
    for (int a = 0; a < g.dim(); ++a) detail::write_le<double>(os, g.extent(a));
    detail::for_each_ascending(g, [&](std::size_t idx) {
        detail::write_le<double>(os, f[idx].real());
        detail::write_le<double>(os, f[idx].imag());
    });
}

inline SpectralField read_field(std::istream& is, bool dealias = false) {
    const auto dim = detail::read_le<std::uint64_t>(is);
    if (dim < 1 || dim > 3) throw Error("field file: bad dimension " + std::to_string(dim));
    std::vector<int> n(dim);
    std::vector<double> L(dim);
    for (auto& v : n) v = static_cast<int>(detail::read_le<std::uint64_t>(is));
    for (auto& v : L) v = detail::read_le<double>(is);
    SpectralField f(GridSpec(L, n, dealias));
    detail::for_each_ascending(f.grid(), [&](std::size_t idx) {
        const double re = detail::read_le<double>(is);
        const double im = detail::read_le<double>(is);
        f[idx] = Complex(re, im);
    });
    return f;
}

}  // namespace nlsrate
