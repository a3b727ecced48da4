// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bodyauth::dsp {

// In-place complex FFT for arbitrary length (radix-2 for powers of two,
// Bluestein otherwise). inverse=true applies the 1/N-scaled inverse.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// One-sided magnitude spectrum of a real signal: |X_k| for k = 0..N/2.
std::vector<double> magnitude_spectrum(std::span<const double> x);

enum class FilterKind { low_pass, band_pass, high_pass };

// Linear-phase windowed-sinc FIR kernel. Taps are symmetric about the
// center; the low-pass prototype is normalized to unit DC gain, so
// band-pass and high-pass kernels have exactly zero DC gain.
struct FilterKernel {
    std::vector<double> taps;
    FilterKind kind = FilterKind::low_pass;
    double cutoff_lo_hz = 0.0;  // single cutoff for low/high pass
    double cutoff_hi_hz = 0.0;  // upper edge for band-pass only
    double fs_hz = 0.0;
};

// kind=low_pass / high_pass: cutoffs_hz has one entry; band_pass: two.
FilterKernel design_fir(FilterKind kind, std::span<const double> cutoffs_hz,
                        int tap_count, double fs_hz);

// Zero-phase filtering: symmetric-kernel convolution with reflective edge
// padding. Output length equals input length; no group delay.
std::vector<double> filter_zero_phase(std::span<const double> x,
                                      const FilterKernel& kernel);

// STFT geometry for the canonical 5 s segment at 500 Hz: 1000-sample
// windows hopped by 500 samples (4 windows), rectangular window,
// one-sided magnitudes (501 bins, 0.5 Hz apart).
struct Spectrogram {
    int window_count = 0;
    int bin_count = 0;
    double bin_hz = 0.0;
    double window_s = 0.0;
    double hop_s = 0.0;
    std::vector<double> magnitudes;  // window_count x bin_count, row-major

    double at(int window, int bin) const {
        return magnitudes[static_cast<std::size_t>(window) * bin_count + bin];
    }
};

inline constexpr int kStftWindowSamples = 1000;
inline constexpr int kStftHopSamples = 500;
inline constexpr int kStftBinCount = kStftWindowSamples / 2 + 1;

Spectrogram stft(std::span<const double> segment, double fs_hz);

}  // namespace bodyauth::dsp
