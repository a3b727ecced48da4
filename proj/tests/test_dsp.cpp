// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "common.hpp"
#include "dsp.hpp"
#include "rng.hpp"

using namespace bodyauth;
using dsp::FilterKind;

namespace {

// Direct evaluation of the kernel's transfer function at one frequency;
// the oracle the design tests are checked against.
double gain_db(const dsp::FilterKernel& kernel, double f_hz) {
    std::complex<double> h(0.0, 0.0);
    for (std::size_t n = 0; n < kernel.taps.size(); ++n) {
        const double ang = -2.0 * std::numbers::pi * f_hz *
                           static_cast<double>(n) / kernel.fs_hz;
        h += kernel.taps[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return 20.0 * std::log10(std::abs(h) + 1e-300);
}

std::vector<double> sine(double f_hz, double fs, std::size_t n, double amp = 1.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = amp * std::sin(2.0 * std::numbers::pi * f_hz *
                              static_cast<double>(i) / fs);
    return x;
}

}  // namespace

TEST_CASE("fft round trips within 1e-9") {
    for (std::size_t n : {1000u, 1024u, 500u, 12500u}) {
        Rng rng(n);
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        auto y = x;
        dsp::fft(y, false);
        dsp::fft(y, true);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(y[i] - x[i]) / std::abs(x[i] + 1e-30));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("fft matches a quadratic-time DFT on a small non-power-of-two size") {
    const std::size_t n = 60;
    Rng rng(7);
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto y = x;
    dsp::fft(y, false);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> ref(0, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * std::numbers::pi *
                               static_cast<double>(k * i % n) / static_cast<double>(n);
            ref += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        CHECK(std::abs(y[k] - ref) < 1e-9);
    }
}

TEST_CASE("low-pass kernel has unit DC gain") {
    const double cutoffs[] = {0.5};
    const auto lp = dsp::design_fir(FilterKind::low_pass, cutoffs, 1001, 500.0);
    CHECK(lp.taps.size() == 1001);
    CHECK(std::abs(gain_db(lp, 0.0)) < 0.01);
    double sum = 0.0;
    for (double t : lp.taps) sum += t;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    // symmetric taps
    for (std::size_t i = 0; i < lp.taps.size(); ++i)
        CHECK(lp.taps[i] == lp.taps[lp.taps.size() - 1 - i]);
}

TEST_CASE("band-pass gain: passband within 1 dB, 50 Hz below -40 dB") {
    const double cutoffs[] = {0.5, 15.0};
    const auto bp = dsp::design_fir(FilterKind::band_pass, cutoffs, 1001, 500.0);
    CHECK(std::abs(gain_db(bp, 5.0)) < 1.0);
    CHECK(gain_db(bp, 50.0) <= -40.0);
    CHECK(gain_db(bp, 0.0) <= -60.0);  // exact DC null by construction
}

TEST_CASE("high-pass kernel blocks DC") {
    const double cutoffs[] = {15.0};
    const auto hp = dsp::design_fir(FilterKind::high_pass, cutoffs, 1001, 500.0);
    CHECK(gain_db(hp, 0.0) <= -60.0);
    CHECK(std::abs(gain_db(hp, 100.0)) < 1.0);
}

TEST_CASE("design_fir rejects invalid arguments") {
    const double one[] = {0.5};
    const double bad_pair[] = {15.0, 0.5};
    const double high[] = {300.0};
    CHECK_THROWS_AS(dsp::design_fir(FilterKind::low_pass, one, 1000, 500.0), Error);
    CHECK_THROWS_AS(dsp::design_fir(FilterKind::low_pass, high, 1001, 500.0), Error);
    CHECK_THROWS_AS(dsp::design_fir(FilterKind::band_pass, bad_pair, 1001, 500.0),
                    Error);
}

TEST_CASE("zero-phase filtering: constants, impulses, delay") {
    const double lp_c[] = {0.5};
    const double bp_c[] = {0.5, 15.0};
    const auto lp = dsp::design_fir(FilterKind::low_pass, lp_c, 1001, 500.0);
    const auto bp = dsp::design_fir(FilterKind::band_pass, bp_c, 1001, 500.0);

    SUBCASE("constant through low-pass is unchanged") {
        const std::vector<double> x(2500, -57.25);
        const auto y = dsp::filter_zero_phase(x, lp);
        REQUIRE(y.size() == x.size());
        for (double v : y) CHECK(v == doctest::Approx(-57.25).epsilon(1e-9));
    }
    SUBCASE("constant through band-pass is near zero") {
        const std::vector<double> x(2500, 40.0);
        const auto y = dsp::filter_zero_phase(x, bp);
        for (double v : y) CHECK(std::abs(v) <= 1e-3 * 40.0);
    }
    SUBCASE("impulse response equals taps centered at the impulse") {
        std::vector<double> x(2001, 0.0);
        x[1000] = 1.0;
        const auto y = dsp::filter_zero_phase(x, lp);
        for (int d = -500; d <= 500; ++d)
            CHECK(y[static_cast<std::size_t>(1000 + d)] ==
                  doctest::Approx(lp.taps[static_cast<std::size_t>(500 + d)])
                      .epsilon(1e-12));
        // zero phase: the peak stays on the impulse
        std::size_t argmax = 0;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (std::abs(y[i]) > std::abs(y[argmax])) argmax = i;
        CHECK(argmax == 1000);
    }
    SUBCASE("empty signal is rejected") {
        const std::vector<double> empty;
        CHECK_THROWS_AS(dsp::filter_zero_phase(empty, lp), Error);
    }
}

TEST_CASE("filtering is linear") {
    const double bp_c[] = {0.5, 15.0};
    const auto bp = dsp::design_fir(FilterKind::band_pass, bp_c, 1001, 500.0);
    Rng rng(3);
    std::vector<double> x(2500), y(2500);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(-1, 1);
        y[i] = rng.uniform(-1, 1);
    }
    const double a = 1.7, b = -0.4;
    std::vector<double> combo(2500);
    for (std::size_t i = 0; i < x.size(); ++i) combo[i] = a * x[i] + b * y[i];
    const auto fx = dsp::filter_zero_phase(x, bp);
    const auto fy = dsp::filter_zero_phase(y, bp);
    const auto fc = dsp::filter_zero_phase(combo, bp);
    double scale = 0.0;
    for (double v : fc) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < fc.size(); ++i)
        CHECK(std::abs(fc[i] - (a * fx[i] + b * fy[i])) <= 1e-9 * std::max(scale, 1.0));
}

TEST_CASE("stft geometry and content") {
    SUBCASE("canonical segment gives 4 x 501 bins of 0.5 Hz") {
        const auto x = sine(10.0, 500.0, 2500);
        const auto s = dsp::stft(x, 500.0);
        CHECK(s.window_count == 4);
        CHECK(s.bin_count == 501);
        CHECK(s.bin_hz == doctest::Approx(0.5));
        CHECK(s.window_s == doctest::Approx(2.0));
        CHECK(s.hop_s == doctest::Approx(1.0));
        for (double m : s.magnitudes) CHECK(m >= 0.0);
    }
    SUBCASE("pure 10 Hz sine concentrates in bin 20 of every window") {
        const auto x = sine(10.0, 500.0, 2500);
        const auto s = dsp::stft(x, 500.0);
        for (int w = 0; w < 4; ++w) {
            CHECK(s.at(w, 20) == doctest::Approx(500.0).epsilon(1e-9));
            double rest = 0.0;
            for (int k = 0; k < 501; ++k)
                if (k != 20) rest += s.at(w, k);
            CHECK(rest < 1e-6 * s.at(w, 20));
        }
    }
    SUBCASE("wrong segment length is rejected") {
        const std::vector<double> short_seg(2499, 0.0);
        CHECK_THROWS_AS(dsp::stft(short_seg, 500.0), Error);
    }
}

TEST_CASE("stft windows satisfy Parseval against a time-domain energy oracle") {
    Rng rng(11);
    std::vector<double> x(2500);
    for (auto& v : x) v = rng.normal();
    const auto s = dsp::stft(x, 500.0);
    for (int w = 0; w < s.window_count; ++w) {
        double time_energy = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double v = x[static_cast<std::size_t>(w * 500 + i)];
            time_energy += v * v;
        }
        // One-sided magnitudes: interior bins count twice.
        double freq_energy = s.at(w, 0) * s.at(w, 0) + s.at(w, 500) * s.at(w, 500);
        for (int k = 1; k < 500; ++k) freq_energy += 2.0 * s.at(w, k) * s.at(w, k);
        freq_energy /= 1000.0;
        CHECK(std::abs(freq_energy - time_energy) <= 1e-6 * time_energy);
    }
}
