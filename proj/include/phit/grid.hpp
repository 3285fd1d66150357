// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// Periodic grid on the box [-2^l, 2^l)^n with spacing 2^-g, dyadic cubes,
// coefficient fields and the spectral convolution engine.
//
// Samples are row-major with x_1 fastest: flat = i1 + P * i2, where axis
// index i corresponds to x = (i - P/2) h.  Frequencies live on the lattice
// xi_j = pi * j / 2^l, j in [-P/2, P/2).

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "phit/core.hpp"
#include "phit/fft.hpp"
#include "phit/frames.hpp"

namespace phit {

struct GridSpec {
    int n = 1;
    int ell = 4;  // box half-width 2^ell
    int g = 4;    // spacing 2^-g

    void validate() const {
        require(n == 1 || n == 2, "grid: dimension must be 1 or 2");
        require(g >= 0, "grid: g >= 0 violated");
        require(ell + g + 1 >= 1, "grid: at least two points per axis required");
        require(ell + g + 1 <= 24, "grid: l + g + 1 <= 24 violated (memory guard)");
        require(n * (ell + g + 1) <= 26, "grid: total sample count above 2^26 (memory guard)");
    }

    [[nodiscard]] std::size_t points_per_axis() const { return std::size_t{1} << (ell + g + 1); }
    [[nodiscard]] std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < n; ++a) s *= points_per_axis();
        return s;
    }
    [[nodiscard]] double spacing() const { return std::ldexp(1.0, -g); }
    [[nodiscard]] double cell_volume() const { return std::ldexp(1.0, -g * n); }
    [[nodiscard]] double period() const { return std::ldexp(1.0, ell + 1); }
    [[nodiscard]] double nyquist() const { return kPi * std::ldexp(1.0, g); }
    [[nodiscard]] double frequency_step() const { return kPi * std::ldexp(1.0, -ell); }

    [[nodiscard]] double coordinate(std::size_t i) const {
        return (static_cast<double>(i) - static_cast<double>(points_per_axis() / 2)) * spacing();
    }
    /// Signed frequency index of storage index j.
    [[nodiscard]] std::int64_t signed_index(std::size_t j) const {
        const auto P = static_cast<std::int64_t>(points_per_axis());
        const auto s = static_cast<std::int64_t>(j);
        return s < P / 2 ? s : s - P;
    }
    [[nodiscard]] double frequency(std::size_t j) const {
        return frequency_step() * static_cast<double>(signed_index(j));
    }
    [[nodiscard]] std::vector<int> fft_dims() const {
        return std::vector<int>(static_cast<std::size_t>(n), static_cast<int>(points_per_axis()));
    }

    bool operator==(const GridSpec&) const = default;
};

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(GridSpec spec) : spec_(spec) {
        spec_.validate();
        samples_.assign(spec_.size(), cplx{});
    }
    GridFunction(GridSpec spec, std::vector<cplx> samples) : spec_(spec), samples_(std::move(samples)) {
        spec_.validate();
        require(samples_.size() == spec_.size(), "grid function: sample count does not match grid");
        for (const auto& v : samples_)
            require(std::isfinite(v.real()) && std::isfinite(v.imag()), "grid function: non-finite sample");
    }

    /// Samples fn(x) at every grid point; fn takes a span of n coordinates.
    template <typename Fn>
    static GridFunction from_function(GridSpec spec, Fn&& fn) {
        GridFunction f(spec);
        const std::size_t P = spec.points_per_axis();
        std::array<double, 2> x{};
        for (std::size_t idx = 0; idx < f.samples_.size(); ++idx) {
            x[0] = spec.coordinate(idx % P);
            if (spec.n == 2) x[1] = spec.coordinate(idx / P);
            f.samples_[idx] = cplx(fn(std::span<const double>(x.data(), static_cast<std::size_t>(spec.n))));
        }
        return f;
    }

    [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::span<const cplx> samples() const noexcept { return samples_; }
    [[nodiscard]] std::span<cplx> samples() noexcept { return samples_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    cplx& operator[](std::size_t i) { return samples_[i]; }
    const cplx& operator[](std::size_t i) const { return samples_[i]; }

    GridFunction& operator+=(const GridFunction& o) {
        require(o.spec_ == spec_, "grid functions live on different grids");
        for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += o.samples_[i];
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        require(o.spec_ == spec_, "grid functions live on different grids");
        for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= o.samples_[i];
        return *this;
    }
    GridFunction& operator*=(cplx s) {
        for (auto& v : samples_) v *= s;
        return *this;
    }
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

    /// Riemann-sum L2 norm.
    [[nodiscard]] double l2_norm() const {
        CompensatedSum<double> s;
        for (const auto& v : samples_) s.add(std::norm(v));
        return std::sqrt(s.value() * spec_.cell_volume());
    }
    [[nodiscard]] double max_abs() const {
        double m = 0;
        for (const auto& v : samples_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    GridSpec spec_;
    std::vector<cplx> samples_;
};

/// Riemann-sum pairing <f, g> = h^n sum f conj(g).
inline cplx inner(const GridFunction& f, const GridFunction& g) {
    require(f.spec() == g.spec(), "inner: grid functions live on different grids");
    CompensatedSum<cplx> s;
    for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * std::conj(g[i]));
    return s.value() * f.spec().cell_volume();
}

inline double relative_l2_difference(const GridFunction& a, const GridFunction& b) {
    const double nb = b.l2_norm();
    const double d = (a - b).l2_norm();
    return nb > 0 ? d / nb : d;
}

// ------------------------------------------------------------ spectrum ----

inline std::size_t wrap_index(std::int64_t i, std::size_t P) {
    const auto p = static_cast<std::int64_t>(P);
    return static_cast<std::size_t>(((i % p) + p) % p);
}

/// Visits every lattice frequency: fn(flat index, xi span).
template <typename Fn>
void for_each_frequency(const GridSpec& spec, Fn&& fn) {
    const std::size_t P = spec.points_per_axis();
    std::array<double, 2> xi{};
    const std::size_t total = spec.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        xi[0] = spec.frequency(idx % P);
        if (spec.n == 2) xi[1] = spec.frequency(idx / P);
        fn(idx, std::span<const double>(xi.data(), static_cast<std::size_t>(spec.n)));
    }
}

namespace detail {
inline double alternating_sign(const GridSpec& spec, std::size_t idx) {
    const std::size_t P = spec.points_per_axis();
    std::size_t s = idx % P;
    if (spec.n == 2) s += idx / P;
    return (s & 1u) ? -1.0 : 1.0;
}
}  // namespace detail

/// Approximation of the continuous Fourier transform at the lattice
/// frequencies: h^n sum_m f(x_m) e^{-i xi x_m}. Exact for trigonometric
/// polynomials on the torus.
inline std::vector<cplx> spectrum(const GridFunction& f) {
    const auto& spec = f.spec();
    std::vector<cplx> s(f.samples().begin(), f.samples().end());
    fft::forward(s, spec.fft_dims());
    const double h = spec.cell_volume();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= h * detail::alternating_sign(spec, i);
    return s;
}

/// Inverse of `spectrum`: samples of (1/T^n) sum_xi S(xi) e^{i xi x}.
inline GridFunction from_spectrum(const GridSpec& spec, std::vector<cplx> s) {
    require(s.size() == spec.size(), "from_spectrum: size mismatch");
    const double scale = 1.0 / std::pow(spec.period(), spec.n);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= scale * detail::alternating_sign(spec, i);
    fft::transform(s, spec.fft_dims(), FFTW_BACKWARD);
    return GridFunction(spec, std::move(s));
}

/// Grid function from an analytic Fourier transform sampled on the lattice.
template <typename Fn>
GridFunction from_fourier(const GridSpec& spec, Fn&& hat) {
    std::vector<cplx> s(spec.size());
    for_each_frequency(spec, [&](std::size_t i, std::span<const double> xi) { s[i] = hat(xi); });
    return from_spectrum(spec, std::move(s));
}

/// f -> inverse DFT of f_hat(xi) m(xi).
template <typename Fn>
GridFunction apply_multiplier(const GridFunction& f, Fn&& m) {
    const auto& spec = f.spec();
    std::vector<cplx> s(f.samples().begin(), f.samples().end());
    fft::forward(s, spec.fft_dims());
    for_each_frequency(spec, [&](std::size_t i, std::span<const double> xi) { s[i] *= m(xi); });
    fft::inverse(s, spec.fft_dims());
    return GridFunction(spec, std::move(s));
}

/// Fraction of spectral energy at lattice frequencies where in_band is false.
template <typename Pred>
double out_of_band_energy(const GridFunction& f, Pred&& in_band) {
    std::vector<cplx> s(f.samples().begin(), f.samples().end());
    fft::forward(s, f.spec().fft_dims());
    CompensatedSum<double> total, outside;
    for_each_frequency(f.spec(), [&](std::size_t i, std::span<const double> xi) {
        const double e = std::norm(s[i]);
        total.add(e);
        if (!in_band(xi)) outside.add(e);
    });
    return total.value() > 0 ? outside.value() / total.value() : 0.0;
}

/// Removes the xi = 0 mode (the grid representative of constants).
inline GridFunction remove_mean(const GridFunction& f) {
    CompensatedSum<cplx> s;
    for (const auto& v : f.samples()) s.add(v);
    const cplx mean = s.value() / static_cast<double>(f.size());
    GridFunction out = f;
    for (auto& v : out.samples()) v -= mean;
    return out;
}

/// The same trigonometric polynomial sampled on another grid with the same
/// box: spectra are copied at shared lattice frequencies. Energy on a
/// frequency the target cannot hold is an error.
inline GridFunction spectral_resample(const GridFunction& f, const GridSpec& target) {
    const auto& src = f.spec();
    target.validate();
    require(src.n == target.n && src.ell == target.ell, "spectral_resample: same dimension and box required");
    const auto s = spectrum(f);
    std::vector<cplx> out(target.size());
    const auto Pt = static_cast<std::int64_t>(target.points_per_axis());
    double dropped = 0, total = 0;
    const std::size_t Ps = src.points_per_axis();
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
        const double e = std::norm(s[idx]);
        total += e;
        std::array<std::int64_t, 2> j{src.signed_index(idx % Ps), src.n == 2 ? src.signed_index(idx / Ps) : 0};
        bool fits = true;
        for (int a = 0; a < src.n; ++a) fits = fits && j[a] > -Pt / 2 && j[a] < Pt / 2;
        if (!fits) {
            dropped += e;
            continue;
        }
        std::size_t t = wrap_index(j[0], static_cast<std::size_t>(Pt));
        if (src.n == 2) t += static_cast<std::size_t>(Pt) * wrap_index(j[1], static_cast<std::size_t>(Pt));
        out[t] = s[idx];
    }
    require(dropped <= 1e-24 * std::max(total, 1e-300), "spectral_resample: energy above the target Nyquist frequency");
    return from_spectrum(target, std::move(out));
}

// ------------------------------------------------------------- levels ----

/// Largest nu with 2^nu * outer <= pi 2^g.
inline int max_level(const GridSpec& spec, const SpectralProfile& p) {
    return static_cast<int>(std::floor(std::log2(spec.nyquist() / p.support_outer()) + 1e-12));
}

/// Smallest nu with 2^nu * inner >= pi 2^-l (every retained annulus is resolved).
inline int min_level(const GridSpec& spec, const SpectralProfile& p) {
    require(p.support_inner() > 0, "min_level: profile support must avoid the origin");
    return static_cast<int>(std::ceil(std::log2(spec.frequency_step() / p.support_inner()) - 1e-12));
}

inline void require_level(const GridSpec& spec, const SpectralProfile& p, int nu) {
    const int top = max_level(spec, p);
    if (nu > top) {
        std::ostringstream os;
        os << "Nyquist violation: level " << nu << " exceeds the maximal admissible level " << top
           << " (2^nu * " << p.support_outer() << " must not exceed pi * 2^" << spec.g << ")";
        throw ContractError(os.str());
    }
}

/// phi_nu * f (or the conjugate-reflected phi~_nu * f) as a Fourier multiplier.
inline GridFunction level_convolve(const GridFunction& f, const SpectralProfile& profile, int nu,
                                   bool conjugate) {
    require(profile.dim() == f.spec().n, "level_convolve: profile and grid dimensions differ");
    require_level(f.spec(), profile, nu);
    const double s = std::ldexp(1.0, -nu);
    std::array<double, 2> v{};
    return apply_multiplier(f, [&](std::span<const double> xi) {
        for (std::size_t a = 0; a < xi.size(); ++a) v[a] = s * xi[a];
        const cplx m = profile(std::span<const double>(v.data(), xi.size()));
        return conjugate ? std::conj(m) : m;
    });
}

// ------------------------------------------------------- dyadic cubes ----

struct DyadicCube {
    int nu = 0;
    std::array<std::int64_t, 2> k{};
    int n = 1;

    [[nodiscard]] double corner(int axis) const { return std::ldexp(static_cast<double>(k[axis]), -nu); }
    [[nodiscard]] double side() const { return std::ldexp(1.0, -nu); }
    [[nodiscard]] double measure() const { return std::ldexp(1.0, -nu * n); }

    bool operator==(const DyadicCube&) const = default;
};

/// Circular index shift (per axis) that moves the origin to x_Q.
inline std::array<std::int64_t, 2> grid_offset(const GridSpec& spec, const DyadicCube& Q) {
    require(Q.nu <= spec.g, "cube level above grid resolution (nu <= g required)");
    const std::int64_t step = ipow2(spec.g - Q.nu);
    return {Q.k[0] * step, spec.n == 2 ? Q.k[1] * step : 0};
}

/// Flat sample index of the cube corner x_Q (wrapped onto the torus).
inline std::size_t corner_index(const GridSpec& spec, const DyadicCube& Q) {
    const auto off = grid_offset(spec, Q);
    const std::size_t P = spec.points_per_axis();
    const auto half = static_cast<std::int64_t>(P / 2);
    std::size_t idx = wrap_index(half + off[0], P);
    if (spec.n == 2) idx += P * wrap_index(half + off[1], P);
    return idx;
}

/// Circularly shifts samples so that out(x) = f(x - shift h).
inline GridFunction shift(const GridFunction& f, std::array<std::int64_t, 2> by) {
    const auto& spec = f.spec();
    const std::size_t P = spec.points_per_axis();
    GridFunction out(spec);
    if (spec.n == 1) {
        for (std::size_t i = 0; i < P; ++i) out[wrap_index(static_cast<std::int64_t>(i) + by[0], P)] = f[i];
    } else {
        for (std::size_t i2 = 0; i2 < P; ++i2) {
            const std::size_t r = wrap_index(static_cast<std::int64_t>(i2) + by[1], P) * P;
            for (std::size_t i1 = 0; i1 < P; ++i1)
                out[r + wrap_index(static_cast<std::int64_t>(i1) + by[0], P)] = f[i2 * P + i1];
        }
    }
    return out;
}

/// Samples of psi_Q(x) = |Q|^{1/2} psi_nu(x - x_Q), computed spectrally.
inline GridFunction eval_wavelet(const SpectralProfile& profile, const DyadicCube& Q, const GridSpec& spec) {
    require(Q.nu <= spec.g, "eval_wavelet: nu <= g violated");
    require(Q.n == spec.n && profile.dim() == spec.n, "eval_wavelet: dimension mismatch");
    require_level(spec, profile, Q.nu);
    const double s = std::ldexp(1.0, -Q.nu);
    const double amp = std::pow(2.0, -0.5 * Q.nu * spec.n);
    std::array<double, 2> v{};
    return from_fourier(spec, [&](std::span<const double> xi) {
        double phase = 0;
        for (std::size_t a = 0; a < xi.size(); ++a) {
            v[a] = s * xi[a];
            phase += xi[a] * Q.corner(static_cast<int>(a));
        }
        return amp * profile(std::span<const double>(v.data(), xi.size())) * std::polar(1.0, -phase);
    });
}

// ------------------------------------------------- coefficient fields ----

/// Level range plus, per level, a half-open k-window [lo, hi) per axis.
struct CoefficientWindow {
    int nu_min = 0;
    int nu_max = 0;
    std::vector<std::array<std::array<std::int64_t, 2>, 2>> extents;  // [level][axis] = {lo, hi}

    [[nodiscard]] int levels() const { return nu_max - nu_min + 1; }
    [[nodiscard]] std::array<std::int64_t, 2> lo(int nu) const {
        const auto& e = extents[static_cast<std::size_t>(nu - nu_min)];
        return {e[0][0], e[1][0]};
    }
    [[nodiscard]] std::array<std::int64_t, 2> hi(int nu) const {
        const auto& e = extents[static_cast<std::size_t>(nu - nu_min)];
        return {e[0][1], e[1][1]};
    }
    [[nodiscard]] std::size_t level_size(int nu, int n) const {
        const auto l = lo(nu), h = hi(nu);
        std::size_t s = static_cast<std::size_t>(h[0] - l[0]);
        if (n == 2) s *= static_cast<std::size_t>(h[1] - l[1]);
        return s;
    }

    bool operator==(const CoefficientWindow&) const = default;

    /// All cubes of one torus period at each level: k in [-2^{l+nu}, 2^{l+nu}).
    static CoefficientWindow full(const GridSpec& spec, int nu_min, int nu_max) {
        require(nu_min <= nu_max, "coefficient window: nu_min <= nu_max violated");
        CoefficientWindow w{nu_min, nu_max, {}};
        for (int nu = nu_min; nu <= nu_max; ++nu) {
            require(spec.ell + nu >= 0, "coefficient window: level too coarse for the box (l + nu >= 0)");
            const std::int64_t r = ipow2(spec.ell + nu);
            w.extents.push_back({{{-r, r}, {spec.n == 2 ? -r : 0, spec.n == 2 ? r : 1}}});
        }
        return w;
    }

    /// Cubes with |k_a| 2^-nu <= radius around x = 0, clipped to one period.
    static CoefficientWindow ball(const GridSpec& spec, int nu_min, int nu_max, double radius) {
        CoefficientWindow w = full(spec, nu_min, nu_max);
        for (int nu = nu_min; nu <= nu_max; ++nu) {
            auto& e = w.extents[static_cast<std::size_t>(nu - nu_min)];
            const auto r = static_cast<std::int64_t>(std::floor(radius * std::ldexp(1.0, nu)));
            for (int a = 0; a < spec.n; ++a) {
                e[a][0] = std::max(e[a][0], -r);
                e[a][1] = std::min(e[a][1], r + 1);
            }
        }
        return w;
    }

    void validate(const GridSpec& spec) const {
        require(nu_min <= nu_max, "coefficient window: nu_min <= nu_max violated");
        require(extents.size() == static_cast<std::size_t>(levels()), "coefficient window: one extent per level");
        require(nu_max <= spec.g, "coefficient window: nu_max <= g violated (cube corners on grid)");
        for (int nu = nu_min; nu <= nu_max; ++nu) {
            require(spec.ell + nu >= 0, "coefficient window: level too coarse for the box (l + nu >= 0)");
            const std::int64_t period = ipow2(spec.ell + 1 + nu);
            for (int a = 0; a < spec.n; ++a) {
                const auto& e = extents[static_cast<std::size_t>(nu - nu_min)][static_cast<std::size_t>(a)];
                require(e[0] < e[1], "coefficient window: empty k-range");
                require(e[1] - e[0] <= period, "coefficient window: k-range wider than one torus period");
            }
        }
    }
};

/// Valid level range for a set of profiles on a grid.
inline std::pair<int, int> level_range(const GridSpec& spec, std::initializer_list<const SpectralProfile*> ps) {
    int lo = std::numeric_limits<int>::min(), hi = spec.g;
    for (const auto* p : ps) {
        lo = std::max(lo, min_level(spec, *p));
        hi = std::min(hi, max_level(spec, *p));
    }
    lo = std::max(lo, -spec.ell);
    require(lo <= hi, "no admissible level fits the grid");
    return {lo, hi};
}

inline CoefficientWindow default_window(const GridSpec& spec, const WaveletPair& pair) {
    const auto [lo, hi] = level_range(spec, {&pair.phi, &pair.psi});
    return CoefficientWindow::full(spec, lo, hi);
}

class CoefficientField {
public:
    CoefficientField() = default;
    CoefficientField(GridSpec spec, CoefficientWindow window) : spec_(spec), window_(std::move(window)) {
        spec_.validate();
        window_.validate(spec_);
        for (int nu = window_.nu_min; nu <= window_.nu_max; ++nu)
            values_.emplace_back(window_.level_size(nu, spec_.n), cplx{});
    }

    [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const CoefficientWindow& window() const noexcept { return window_; }
    [[nodiscard]] int n() const noexcept { return spec_.n; }

    std::vector<cplx>& level(int nu) { return values_.at(static_cast<std::size_t>(nu - window_.nu_min)); }
    [[nodiscard]] const std::vector<cplx>& level(int nu) const {
        return values_.at(static_cast<std::size_t>(nu - window_.nu_min));
    }

    /// Position of cube (nu, k) inside its level vector (k_1 fastest).
    [[nodiscard]] std::size_t offset(int nu, std::array<std::int64_t, 2> k) const {
        const auto l = window_.lo(nu), h = window_.hi(nu);
        require(k[0] >= l[0] && k[0] < h[0] && (spec_.n == 1 || (k[1] >= l[1] && k[1] < h[1])),
                "coefficient field: cube outside window");
        std::size_t o = static_cast<std::size_t>(k[0] - l[0]);
        if (spec_.n == 2) o += static_cast<std::size_t>(k[1] - l[1]) * static_cast<std::size_t>(h[0] - l[0]);
        return o;
    }
    [[nodiscard]] DyadicCube cube(int nu, std::size_t pos) const {
        const auto l = window_.lo(nu), h = window_.hi(nu);
        const auto w = static_cast<std::size_t>(h[0] - l[0]);
        DyadicCube Q{nu, {l[0] + static_cast<std::int64_t>(pos % w), 0}, spec_.n};
        if (spec_.n == 2) Q.k[1] = l[1] + static_cast<std::int64_t>(pos / w);
        return Q;
    }

    cplx& at(const DyadicCube& Q) { return level(Q.nu)[offset(Q.nu, Q.k)]; }
    [[nodiscard]] cplx at(const DyadicCube& Q) const { return level(Q.nu)[offset(Q.nu, Q.k)]; }

    [[nodiscard]] std::size_t total() const {
        std::size_t s = 0;
        for (const auto& l : values_) s += l.size();
        return s;
    }

    /// Cubes in level-major ascending order.
    [[nodiscard]] std::vector<DyadicCube> cubes() const {
        std::vector<DyadicCube> out;
        out.reserve(total());
        for (int nu = window_.nu_min; nu <= window_.nu_max; ++nu)
            for (std::size_t p = 0; p < level(nu).size(); ++p) out.push_back(cube(nu, p));
        return out;
    }

    CoefficientField& operator+=(const CoefficientField& o) {
        require(o.window_ == window_ && o.spec_ == spec_, "coefficient fields have different windows");
        for (std::size_t l = 0; l < values_.size(); ++l)
            for (std::size_t i = 0; i < values_[l].size(); ++i) values_[l][i] += o.values_[l][i];
        return *this;
    }
    CoefficientField& operator*=(cplx s) {
        for (auto& l : values_)
            for (auto& v : l) v *= s;
        return *this;
    }
    friend CoefficientField operator+(CoefficientField a, const CoefficientField& b) { return a += b; }
    friend CoefficientField operator*(cplx s, CoefficientField a) { return a *= s; }

    [[nodiscard]] double max_abs() const {
        double m = 0;
        for (const auto& l : values_)
            for (const auto& v : l) m = std::max(m, std::abs(v));
        return m;
    }

private:
    GridSpec spec_;
    CoefficientWindow window_;
    std::vector<std::vector<cplx>> values_;
};

inline double max_abs_difference(const CoefficientField& a, const CoefficientField& b) {
    require(a.window() == b.window(), "coefficient fields have different windows");
    double m = 0;
    for (int nu = a.window().nu_min; nu <= a.window().nu_max; ++nu)
        for (std::size_t i = 0; i < a.level(nu).size(); ++i)
            m = std::max(m, std::abs(a.level(nu)[i] - b.level(nu)[i]));
    return m;
}

// ----------------------------------------------------------- sampling ----

/// Compares the spectral convolution phi * g with the Riemann sum
/// (pi/L)^n sum_k phi(x - pi k / L) g(pi k / L). Both inputs must be band
/// limited to the open cube (-L, L)^n.
inline double sampled_convolution_identity(const GridFunction& phi_f, const GridFunction& g_f, double L_band) {
    const auto& spec = phi_f.spec();
    require(g_f.spec() == spec, "sampled_convolution_identity: inputs on different grids");
    require(L_band > 0, "sampled_convolution_identity: L > 0 required");
    auto in_band = [&](std::span<const double> xi) {
        for (double v : xi)
            if (!(std::abs(v) < L_band)) return false;
        return true;
    };
    for (const auto* f : {&phi_f, &g_f}) {
        const double e = out_of_band_energy(*f, in_band);
        if (e > 1e-12) {
            std::ostringstream os;
            os << "band check failed: relative out-of-band energy " << e << " above 1e-12";
            throw ContractError(os.str());
        }
    }
    const double step = kPi / L_band;
    const double ratio = step / spec.spacing();
    const auto m = static_cast<std::int64_t>(std::llround(ratio));
    require(m >= 1 && std::abs(ratio - static_cast<double>(m)) <= 1e-9 * ratio,
            "incommensurate step: pi/L must be an integer multiple of the grid spacing");
    const std::size_t P = spec.points_per_axis();
    require(P % static_cast<std::size_t>(m) == 0, "incommensurate step: sampling lattice does not tile the torus");

    const auto sphi = spectrum(phi_f);
    const auto sg = spectrum(g_f);
    std::vector<cplx> lhs(sphi.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] = sphi[i] * sg[i];
    const GridFunction direct = from_spectrum(spec, std::move(lhs));

    // comb carrying (step/h)^n g at the sampling lattice, so that its
    // spectrum is step^n sum_k g(step k) e^{-i xi step k}
    GridFunction comb(spec);
    const double w = std::pow(static_cast<double>(m), spec.n);
    const std::size_t half = P / 2;
    const auto um = static_cast<std::size_t>(m);
    for (std::size_t idx = 0; idx < comb.size(); ++idx) {
        const std::size_t i1 = idx % P, i2 = idx / P;
        const bool on = (i1 + P - half) % um == 0 && (spec.n == 1 || (i2 + P - half) % um == 0);
        if (on) comb[idx] = w * g_f[idx];
    }
    const auto sc = spectrum(comb);
    std::vector<cplx> rhs(sphi.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = sphi[i] * sc[i];
    const GridFunction sampled = from_spectrum(spec, std::move(rhs));
    double worst = 0;
    for (std::size_t i = 0; i < direct.size(); ++i) worst = std::max(worst, std::abs(direct[i] - sampled[i]));
    return worst;
}

// ---------------------------------------------------------- generators ----

/// Seeded random function whose spectrum is supported on lattice
/// frequencies accepted by `keep`; normalised to unit L2 norm. With
/// `real_valued` the real part is returned (the support predicate must be
/// symmetric under xi -> -xi for the band to be preserved).
template <typename Pred>
GridFunction random_spectral(const GridSpec& spec, std::uint64_t seed, Pred&& keep, bool real_valued = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> s(spec.size());
    bool any = false;
    for_each_frequency(spec, [&](std::size_t i, std::span<const double> xi) {
        const double re = normal(rng);
        const double im = normal(rng);
        if (keep(xi)) {
            s[i] = {re, im};
            any = true;
        }
    });
    require(any, "random_spectral: no lattice frequency satisfies the band predicate");
    GridFunction f = from_spectrum(spec, std::move(s));
    if (real_valued)
        for (auto& v : f.samples()) v = v.real();
    const double nrm = f.l2_norm();
    require(nrm > 0, "random_spectral: generated function vanishes");
    f *= 1.0 / nrm;
    return f;
}

/// Random function with spectrum in the annulus lo <= |xi| <= hi.
inline GridFunction random_annulus(const GridSpec& spec, std::uint64_t seed, double lo, double hi,
                                   bool real_valued = false) {
    return random_spectral(
        spec, seed,
        [lo, hi](std::span<const double> xi) {
            const double r = norm_of(xi);
            return r >= lo && r <= hi;
        },
        real_valued);
}

/// Random function with spectrum in the open cube |xi_a| < L.
inline GridFunction random_cube_band(const GridSpec& spec, std::uint64_t seed, double L, bool real_valued = false) {
    return random_spectral(
        spec, seed,
        [L](std::span<const double> xi) {
            for (double v : xi)
                if (!(std::abs(v) < L)) return false;
            return true;
        },
        real_valued);
}

/// Largest lattice frequency not exceeding target (per axis).
inline double lattice_frequency(const GridSpec& spec, double target) {
    return spec.frequency_step() * std::floor(target / spec.frequency_step() + 1e-12);
}

}  // namespace phit
