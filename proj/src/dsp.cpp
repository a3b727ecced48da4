// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common.hpp"

namespace bodyauth::dsp {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, size must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

// Chirp factor exp(sign * i*pi*k^2/n); k^2 reduced mod 2n to keep the
// angle argument small.
std::complex<double> chirp(std::size_t k, std::size_t n, double sign) {
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
    return {std::cos(ang), std::sin(ang)};
}

// Bluestein: arbitrary-length DFT as a convolution of chirped sequences.
void fft_bluestein(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    std::vector<std::complex<double>> u(m, {0.0, 0.0});
    std::vector<std::complex<double>> v(m, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = a[k] * chirp(k, n, sign);
        const std::complex<double> c = chirp(k, n, -sign);
        v[k] = c;
        if (k != 0) v[m - k] = c;
    }
    fft_pow2(u, false);
    fft_pow2(v, false);
    for (std::size_t k = 0; k < m; ++k) u[k] *= v[k];
    fft_pow2(u, true);

    for (std::size_t k = 0; k < n; ++k) a[k] = u[k] * chirp(k, n, sign);
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

}  // namespace

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    if (a.empty()) return;
    if (is_pow2(a.size())) {
        fft_pow2(a, inverse);
    } else {
        fft_bluestein(a, inverse);
    }
}

std::vector<double> magnitude_spectrum(std::span<const double> x) {
    std::vector<std::complex<double>> buf(x.begin(), x.end());
    fft(buf, false);
    const std::size_t half = x.size() / 2;
    std::vector<double> mags(half + 1);
    for (std::size_t k = 0; k <= half; ++k) mags[k] = std::abs(buf[k]);
    return mags;
}

namespace {

// DC-normalized windowed-sinc low-pass prototype (Hamming window). The
// left half is mirrored so the kernel is symmetric bit-for-bit.
std::vector<double> lowpass_taps(double cutoff_hz, int tap_count, double fs_hz) {
    const int mid = (tap_count - 1) / 2;
    const double fc = cutoff_hz / fs_hz;  // normalized cutoff, cycles/sample
    std::vector<double> h(static_cast<std::size_t>(tap_count));
    double sum = 0.0;
    for (int i = 0; i <= mid; ++i) {
        const int k = i - mid;
        const double sinc =
            (k == 0) ? 2.0 * fc : std::sin(2.0 * kPi * fc * k) / (kPi * k);
        const double window =
            0.54 - 0.46 * std::cos(2.0 * kPi * i / (tap_count - 1));
        const double tap = sinc * window;
        h[static_cast<std::size_t>(i)] = tap;
        h[static_cast<std::size_t>(tap_count - 1 - i)] = tap;
        sum += (i == mid) ? tap : 2.0 * tap;
    }
    for (auto& t : h) t /= sum;
    return h;
}

}  // namespace

FilterKernel design_fir(FilterKind kind, std::span<const double> cutoffs_hz,
                        int tap_count, double fs_hz) {
    require(tap_count >= 3 && tap_count % 2 == 1, Errc::invalid_argument,
            "FIR tap count must be odd and >= 3");
    require(fs_hz > 0.0, Errc::invalid_argument, "sample rate must be positive");
    const std::size_t want = (kind == FilterKind::band_pass) ? 2 : 1;
    require(cutoffs_hz.size() == want, Errc::invalid_argument,
            "wrong number of cutoff frequencies for filter kind");
    for (double c : cutoffs_hz) {
        require(std::isfinite(c) && c > 0.0 && c < fs_hz / 2.0,
                Errc::invalid_argument,
                "cutoff must lie strictly inside (0, fs/2)");
    }

    FilterKernel kernel;
    kernel.kind = kind;
    kernel.fs_hz = fs_hz;
    switch (kind) {
        case FilterKind::low_pass: {
            kernel.cutoff_lo_hz = cutoffs_hz[0];
            kernel.taps = lowpass_taps(cutoffs_hz[0], tap_count, fs_hz);
            break;
        }
        case FilterKind::high_pass: {
            // Spectral inversion of the unit-DC low-pass: delta - lp.
            kernel.cutoff_lo_hz = cutoffs_hz[0];
            kernel.taps = lowpass_taps(cutoffs_hz[0], tap_count, fs_hz);
            for (auto& t : kernel.taps) t = -t;
            kernel.taps[static_cast<std::size_t>((tap_count - 1) / 2)] += 1.0;
            break;
        }
        case FilterKind::band_pass: {
            require(cutoffs_hz[0] < cutoffs_hz[1], Errc::invalid_argument,
                    "band-pass cutoffs must be ordered low < high");
            kernel.cutoff_lo_hz = cutoffs_hz[0];
            kernel.cutoff_hi_hz = cutoffs_hz[1];
            kernel.taps = lowpass_taps(cutoffs_hz[1], tap_count, fs_hz);
            const auto lo = lowpass_taps(cutoffs_hz[0], tap_count, fs_hz);
            for (int i = 0; i < tap_count; ++i)
                kernel.taps[static_cast<std::size_t>(i)] -= lo[static_cast<std::size_t>(i)];
            break;
        }
    }
    return kernel;
}

std::vector<double> filter_zero_phase(std::span<const double> x,
                                      const FilterKernel& kernel) {
    require(!x.empty(), Errc::invalid_argument, "cannot filter an empty signal");
    const std::size_t n = x.size();
    const std::size_t taps = kernel.taps.size();
    const std::size_t mid = (taps - 1) / 2;

    // Reflect about the end samples (no edge repeat): pad[i] = x[mid - i].
    std::vector<double> padded(n + 2 * mid);
    auto reflect = [&](std::ptrdiff_t i) -> double {
        const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
        std::ptrdiff_t k = i;
        while (k < 0 || k > last) {
            if (k < 0) k = -k;
            if (k > last) k = 2 * last - k;
            if (last == 0) return x[0];
        }
        return x[static_cast<std::size_t>(k)];
    };
    for (std::size_t i = 0; i < padded.size(); ++i)
        padded[i] = reflect(static_cast<std::ptrdiff_t>(i) -
                            static_cast<std::ptrdiff_t>(mid));

    std::vector<double> y(n, 0.0);
    // y[i] = sum_k h[k] * padded[i + k]; the kernel is symmetric, so this
    // is the zero-phase correlation with the center tap over x[i].
    for (std::size_t k = 0; k < taps; ++k) {
        const double hk = kernel.taps[k];
        if (hk == 0.0) continue;
        const double* src = padded.data() + k;
        for (std::size_t i = 0; i < n; ++i) y[i] += hk * src[i];
    }
    return y;
}

Spectrogram stft(std::span<const double> segment, double fs_hz) {
    require(fs_hz == 500.0, Errc::invalid_argument,
            "stft expects a 500 Hz segment");
    require(segment.size() == 2500, Errc::invalid_argument,
            "stft expects exactly 2500 samples (5 s at 500 Hz)");

    Spectrogram s;
    s.window_count =
        static_cast<int>((segment.size() - kStftWindowSamples) / kStftHopSamples) + 1;
    s.bin_count = kStftBinCount;
    s.bin_hz = fs_hz / kStftWindowSamples;
    s.window_s = kStftWindowSamples / fs_hz;
    s.hop_s = kStftHopSamples / fs_hz;
    s.magnitudes.resize(static_cast<std::size_t>(s.window_count) * s.bin_count);

    for (int w = 0; w < s.window_count; ++w) {
        const auto window =
            segment.subspan(static_cast<std::size_t>(w) * kStftHopSamples,
                            kStftWindowSamples);
        const auto mags = magnitude_spectrum(window);
        std::copy(mags.begin(), mags.end(),
                  s.magnitudes.begin() +
                      static_cast<std::size_t>(w) * s.bin_count);
    }
    return s;
}

}  // namespace bodyauth::dsp
