#ifndef IASIM_FIELDS_HPP
#define IASIM_FIELDS_HPP

// Free functions for building and reducing dense fields over a Grid.
// Reductions are chunked with a fixed combine order, so results are
// bitwise deterministic for any thread count.

#include <array>
#include <vector>

#include "iasim/grid.hpp"
#include "iasim/types.hpp"

namespace iasim {

namespace detail {
inline constexpr long kReduceChunk = 1L << 14;
}

/// Build a real field from a function of the four coordinates.
template <class F>
RealField field_from_coords(const Grid& g, F&& f) {
    RealField out(g.total());
    const auto& sh = g.shape();
    const RealField& x1 = g.coords(Axis::X1);
    const RealField& c1 = g.coords(Axis::Chi1);
    const RealField& x2 = g.coords(Axis::X2);
    const RealField& c2 = g.coords(Axis::Chi2);
#pragma omp parallel for schedule(static)
    for (int i0 = 0; i0 < sh.n[0]; ++i0) {
        long idx = static_cast<long>(i0) * sh.n[1] * sh.n[2] * sh.n[3];
        for (int i1 = 0; i1 < sh.n[1]; ++i1)
            for (int i2 = 0; i2 < sh.n[2]; ++i2)
                for (int i3 = 0; i3 < sh.n[3]; ++i3, ++idx)
                    out[idx] = f(x1[i0], c1[i1], x2[i2], c2[i3]);
    }
    return out;
}

/// Build a real field from a function of the four wavenumbers (DFT order).
template <class F>
RealField field_from_wavenumbers(const Grid& g, F&& f) {
    RealField out(g.total());
    const auto& sh = g.shape();
    const RealField& k0 = g.wavenumbers(Axis::X1);
    const RealField& k1 = g.wavenumbers(Axis::Chi1);
    const RealField& k2 = g.wavenumbers(Axis::X2);
    const RealField& k3 = g.wavenumbers(Axis::Chi2);
#pragma omp parallel for schedule(static)
    for (int i0 = 0; i0 < sh.n[0]; ++i0) {
        long idx = static_cast<long>(i0) * sh.n[1] * sh.n[2] * sh.n[3];
        for (int i1 = 0; i1 < sh.n[1]; ++i1)
            for (int i2 = 0; i2 < sh.n[2]; ++i2)
                for (int i3 = 0; i3 < sh.n[3]; ++i3, ++idx)
                    out[idx] = f(k0[i0], k1[i1], k2[i2], k3[i3]);
    }
    return out;
}

/// Decode a flat index into per-axis indices and step through the layout.
struct IndexWalker {
    explicit IndexWalker(const fft::Shape4& sh, long flat = 0) : sh_(sh) { seek(flat); }
    void seek(long flat) {
        i3 = static_cast<int>(flat % sh_.n[3]);
        flat /= sh_.n[3];
        i2 = static_cast<int>(flat % sh_.n[2]);
        flat /= sh_.n[2];
        i1 = static_cast<int>(flat % sh_.n[1]);
        i0 = static_cast<int>(flat / sh_.n[1]);
    }
    void next() {
        if (++i3 < sh_.n[3]) return;
        i3 = 0;
        if (++i2 < sh_.n[2]) return;
        i2 = 0;
        if (++i1 < sh_.n[1]) return;
        i1 = 0;
        ++i0;
    }
    int i0 = 0, i1 = 0, i2 = 0, i3 = 0;

  private:
    const fft::Shape4& sh_;
};

/// Deterministic multi-channel reduction over [0, n). `body(begin, end, acc)`
/// accumulates serially into acc[0..M).
template <int M, class Body>
std::array<Real, M> deterministic_sums(long n, Body&& body) {
    const long nchunks = (n + detail::kReduceChunk - 1) / detail::kReduceChunk;
    std::vector<std::array<Real, M>> partial(static_cast<size_t>(nchunks));
#pragma omp parallel for schedule(static)
    for (long c = 0; c < nchunks; ++c) {
        partial[c].fill(0);
        const long b = c * detail::kReduceChunk;
        const long e = std::min(n, b + detail::kReduceChunk);
        body(b, e, partial[c].data());
    }
    std::array<Real, M> out{};
    for (long c = 0; c < nchunks; ++c)
        for (int m = 0; m < M; ++m) out[m] += partial[c][m];
    return out;
}

inline Real deterministic_sum(long n, auto&& body) {
    auto r = deterministic_sums<1>(n, [&](long b, long e, Real* acc) { body(b, e, acc[0]); });
    return r[0];
}

/// Runtime-sized variant of deterministic_sums.
template <class Body>
std::vector<Real> deterministic_sums_dyn(long n, int channels, Body&& body) {
    const long nchunks = (n + detail::kReduceChunk - 1) / detail::kReduceChunk;
    std::vector<std::vector<Real>> partial(static_cast<size_t>(nchunks));
#pragma omp parallel for schedule(static)
    for (long c = 0; c < nchunks; ++c) {
        partial[c].assign(channels, 0);
        const long b = c * detail::kReduceChunk;
        const long e = std::min(n, b + detail::kReduceChunk);
        body(b, e, partial[c].data());
    }
    std::vector<Real> out(channels, 0);
    for (long c = 0; c < nchunks; ++c)
        for (int m = 0; m < channels; ++m) out[m] += partial[c][m];
    return out;
}

}  // namespace iasim

#endif
