#ifndef IASIM_FFT_HPP
#define IASIM_FFT_HPP

// Radix-2 transforms over the axes of a rank-4 complex field.
//
// Convention (fixed): forward  X[q] = sum_m x[m] exp(-2*pi*i*q*m/n),
//                     inverse  x[m] = (1/n) sum_q X[q] exp(+2*pi*i*q*m/n).
// All symbol-diagonal operators and Parseval-based quadratures in this
// library assume exactly this pair.

#include <array>
#include <memory>
#include <vector>

#include "iasim/types.hpp"

namespace iasim::fft {

enum class Direction { Forward, Inverse };

struct AxisTables {
    int n = 1;
    int log2n = 0;
    std::vector<int> bitrev;
    std::vector<Complex> tw_fwd;  // stage-packed: len 2,4,...,n with len/2 entries each
    std::vector<Complex> tw_inv;
};

inline std::shared_ptr<const AxisTables> make_tables(int n) {
    auto t = std::make_shared<AxisTables>();
    t->n = n;
    while ((1 << t->log2n) < n) ++t->log2n;
    if ((1 << t->log2n) != n) throw ConfigError("fft: size " + std::to_string(n) + " is not a power of two");
    t->bitrev.resize(n);
    for (int i = 0; i < n; ++i) {
        int r = 0;
        for (int b = 0; b < t->log2n; ++b)
            if (i & (1 << b)) r |= 1 << (t->log2n - 1 - b);
        t->bitrev[i] = r;
    }
    for (int len = 2; len <= n; len <<= 1) {
        for (int j = 0; j < len / 2; ++j) {
            const Real ang = -2.0 * kPi * static_cast<Real>(j) / static_cast<Real>(len);
            const Complex w(std::cos(ang), std::sin(ang));
            t->tw_fwd.push_back(w);
            t->tw_inv.push_back(std::conj(w));
        }
    }
    return t;
}

/// In-place transform of one contiguous pencil of length t.n.
inline void transform_pencil(Complex* a, const AxisTables& t, Direction dir) {
    const int n = t.n;
    for (int i = 0; i < n; ++i) {
        const int j = t.bitrev[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    const Complex* tw = (dir == Direction::Inverse) ? t.tw_inv.data() : t.tw_fwd.data();
    int tbase = 0;
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len / 2;
        for (int i = 0; i < n; i += len) {
            for (int j = 0; j < half; ++j) {
                const Complex w = tw[tbase + j];
                const Complex u = a[i + j];
                const Complex v = a[i + j + half] * w;
                a[i + j] = u + v;
                a[i + j + half] = u - v;
            }
        }
        tbase += half;
    }
    if (dir == Direction::Inverse) {
        const Real s = Real(1) / n;
        for (int i = 0; i < n; ++i) a[i] *= s;
    }
}

/// In-place transform along the row dimension of a split-complex tile laid
/// out as re[row*lanes + lane]; all lanes are transformed simultaneously.
inline void transform_lanes(Real* re, Real* im, const AxisTables& t, long lanes, Direction dir) {
    const int n = t.n;
    for (int i = 0; i < n; ++i) {
        const int j = t.bitrev[i];
        if (i < j) {
            Real* ri = re + i * lanes;
            Real* rj = re + j * lanes;
            for (long l = 0; l < lanes; ++l) std::swap(ri[l], rj[l]);
            Real* ii = im + i * lanes;
            Real* ij = im + j * lanes;
            for (long l = 0; l < lanes; ++l) std::swap(ii[l], ij[l]);
        }
    }
    const Complex* tw = (dir == Direction::Inverse) ? t.tw_inv.data() : t.tw_fwd.data();
    int tbase = 0;
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len / 2;
        for (int i = 0; i < n; i += len) {
            for (int j = 0; j < half; ++j) {
                const Real wr = tw[tbase + j].real();
                const Real wi = tw[tbase + j].imag();
                Real* ur = re + static_cast<long>(i + j) * lanes;
                Real* ui = im + static_cast<long>(i + j) * lanes;
                Real* vr = re + static_cast<long>(i + j + half) * lanes;
                Real* vi = im + static_cast<long>(i + j + half) * lanes;
                for (long l = 0; l < lanes; ++l) {
                    const Real tr = vr[l] * wr - vi[l] * wi;
                    const Real ti = vr[l] * wi + vi[l] * wr;
                    const Real ar = ur[l];
                    const Real ai = ui[l];
                    ur[l] = ar + tr;
                    ui[l] = ai + ti;
                    vr[l] = ar - tr;
                    vi[l] = ai - ti;
                }
            }
        }
        tbase += half;
    }
    if (dir == Direction::Inverse) {
        const Real s = Real(1) / n;
        for (long i = 0; i < n * lanes; ++i) re[i] *= s;
        for (long i = 0; i < n * lanes; ++i) im[i] *= s;
    }
}

struct Shape4 {
    std::array<int, 4> n{1, 1, 1, 1};
    long total() const { return static_cast<long>(n[0]) * n[1] * n[2] * n[3]; }
    long stride(int axis) const {
        long s = 1;
        for (int a = 3; a > axis; --a) s *= n[a];
        return s;
    }
};

using TableSet = std::array<std::shared_ptr<const AxisTables>, 4>;

namespace detail {

// Axes 2 and 3 live inside contiguous planes of length n2*n3; both are
// transformed without leaving the plane. Axis 3 runs through the lane
// kernel on a transposed split-complex copy when the plane has lanes to
// batch over, otherwise through the scalar pencil kernel.
inline void inner_pass(Complex* data, const Shape4& sh, const TableSet& tabs,
                       bool do2, bool do3, Direction dir) {
    const int n2 = sh.n[2], n3 = sh.n[3];
    const long plane_len = static_cast<long>(n2) * n3;
    const long nplanes = static_cast<long>(sh.n[0]) * sh.n[1];
    do2 = do2 && n2 > 1;
    do3 = do3 && n3 > 1;
    if (!do2 && !do3) return;
    const bool lane3 = do3 && n2 >= 8;
#pragma omp parallel
    {
        std::vector<Real> re, im, re2, im2;
        if (do2 || lane3) {
            re.resize(plane_len);
            im.resize(plane_len);
        }
        if (do2 && lane3) {
            re2.resize(plane_len);
            im2.resize(plane_len);
        }
#pragma omp for schedule(static)
        for (long p = 0; p < nplanes; ++p) {
            Complex* pl = data + p * plane_len;
            if (lane3) {
                // split-transpose to [j3][j2]; axis 3 becomes the row
                // direction with n2 lanes
                for (int j2 = 0; j2 < n2; ++j2)
                    for (int j3 = 0; j3 < n3; ++j3) {
                        const Complex v = pl[static_cast<long>(j2) * n3 + j3];
                        re[static_cast<long>(j3) * n2 + j2] = v.real();
                        im[static_cast<long>(j3) * n2 + j2] = v.imag();
                    }
                transform_lanes(re.data(), im.data(), *tabs[3], n2, dir);
                if (do2) {
                    // transpose within the split buffers, then axis 2 rows
                    for (int j3 = 0; j3 < n3; ++j3)
                        for (int j2 = 0; j2 < n2; ++j2) {
                            re2[static_cast<long>(j2) * n3 + j3] = re[static_cast<long>(j3) * n2 + j2];
                            im2[static_cast<long>(j2) * n3 + j3] = im[static_cast<long>(j3) * n2 + j2];
                        }
                    transform_lanes(re2.data(), im2.data(), *tabs[2], n3, dir);
                    for (long i = 0; i < plane_len; ++i) pl[i] = Complex(re2[i], im2[i]);
                } else {
                    for (int j3 = 0; j3 < n3; ++j3)
                        for (int j2 = 0; j2 < n2; ++j2)
                            pl[static_cast<long>(j2) * n3 + j3] =
                                Complex(re[static_cast<long>(j3) * n2 + j2],
                                        im[static_cast<long>(j3) * n2 + j2]);
                }
                continue;
            }
            if (do3) {
                for (int j2 = 0; j2 < n2; ++j2)
                    transform_pencil(pl + static_cast<long>(j2) * n3, *tabs[3], dir);
            }
            if (do2) {
                for (long i = 0; i < plane_len; ++i) {
                    re[i] = pl[i].real();
                    im[i] = pl[i].imag();
                }
                transform_lanes(re.data(), im.data(), *tabs[2], n3, dir);
                for (long i = 0; i < plane_len; ++i) pl[i] = Complex(re[i], im[i]);
            }
        }
    }
}

// Axes 0 and 1 span strided rows; a tile of B adjacent tail elements turns
// every row access into a contiguous copy. Both axes share one tile.
inline void outer_pass(Complex* data, const Shape4& sh, const TableSet& tabs,
                       bool do0, bool do1, Direction dir) {
    const int n0 = sh.n[0], n1 = sh.n[1];
    const long tail = static_cast<long>(sh.n[2]) * sh.n[3];
    do0 = do0 && n0 > 1;
    do1 = do1 && n1 > 1;
    if (!do0 && !do1) return;
    const long rows = static_cast<long>(n0) * n1;
    long block = 1;
    while (block * 2 <= tail && rows * block * 32 <= (1L << 18)) block *= 2;
    const long nblocks = tail / block;
#pragma omp parallel
    {
        std::vector<Real> re(rows * block), im(rows * block);
#pragma omp for schedule(static)
        for (long tb = 0; tb < nblocks; ++tb) {
            Complex* base = data + tb * block;
            for (long r = 0; r < rows; ++r) {
                const Complex* src = base + r * tail;
                Real* dr = re.data() + r * block;
                Real* di = im.data() + r * block;
                for (long l = 0; l < block; ++l) {
                    dr[l] = src[l].real();
                    di[l] = src[l].imag();
                }
            }
            if (do1) {
                for (int j0 = 0; j0 < n0; ++j0) {
                    const long off = static_cast<long>(j0) * n1 * block;
                    transform_lanes(re.data() + off, im.data() + off, *tabs[1], block, dir);
                }
            }
            if (do0) transform_lanes(re.data(), im.data(), *tabs[0], static_cast<long>(n1) * block, dir);
            for (long r = 0; r < rows; ++r) {
                Complex* dst = base + r * tail;
                const Real* sr = re.data() + r * block;
                const Real* si = im.data() + r * block;
                for (long l = 0; l < block; ++l) dst[l] = Complex(sr[l], si[l]);
            }
        }
    }
}

}  // namespace detail

/// Transform the field along every axis selected in `which`. Inactive axes
/// (n == 1) are skipped. Deterministic for any thread count.
inline void transform_axes(Complex* data, const Shape4& sh, const TableSet& tabs,
                           const std::array<bool, 4>& which, Direction dir) {
    detail::inner_pass(data, sh, tabs, which[2], which[3], dir);
    detail::outer_pass(data, sh, tabs, which[0], which[1], dir);
}

}  // namespace iasim::fft

#endif
