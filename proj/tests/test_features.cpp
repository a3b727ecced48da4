// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ban_synth.hpp"
#include "common.hpp"
#include "features.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace bodyauth;
using ban::DeviceLabel;
using ban::MotionLabel;

namespace {

feat::RssSegment make_segment(const std::vector<double>& samples,
                              DeviceLabel link = DeviceLabel::on_body,
                              MotionLabel motion = MotionLabel::walking) {
    REQUIRE(samples.size() == feat::kSegmentSamples);
    feat::RssSegment s;
    std::copy(samples.begin(), samples.end(), s.samples.begin());
    s.link = link;
    s.motion = motion;
    return s;
}

std::vector<double> sine(double f_hz, std::size_t n = feat::kSegmentSamples,
                         double amp = 1.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = amp * std::sin(2.0 * std::numbers::pi * f_hz *
                              static_cast<double>(i) / 500.0);
    return x;
}

double branch_energy(const std::vector<double>& x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

ban::RssTrace trace_of(std::size_t n) {
    ban::RssTrace t;
    t.sample_rate_hz = 500.0;
    t.link = DeviceLabel::off_body;
    t.motion = MotionLabel::rotating;
    t.samples_dbm.assign(n, -50.0);
    for (std::size_t i = 0; i < n; ++i) t.samples_dbm[i] += 0.01 * (i % 13);
    return t;
}

}  // namespace

TEST_CASE("segment_trace splits into 2500-sample windows") {
    CHECK(feat::segment_trace(trace_of(7500)).size() == 3);
    CHECK(feat::segment_trace(trace_of(7499)).size() == 2);
    CHECK(feat::segment_trace(trace_of(2500)).size() == 1);
    try {
        feat::segment_trace(trace_of(2499));
        FAIL("expected too-short error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::too_short);
    }

    const auto segments = feat::segment_trace(trace_of(5000));
    CHECK(segments[0].link == DeviceLabel::off_body);
    CHECK(segments[0].motion == MotionLabel::rotating);
    CHECK(segments[0].samples[2499] == trace_of(5000).samples_dbm[2499]);
    CHECK(segments[1].samples[0] == trace_of(5000).samples_dbm[2500]);
}

TEST_CASE("chunk_stats on degenerate and two-point chunks") {
    SUBCASE("constant chunk") {
        const std::vector<double> chunk(250, 3.5);
        const auto s = feat::chunk_stats(chunk);
        CHECK(s == std::array<double, 6>{3.5, 3.5, 3.5, 0.0, 0.0, 0.0});
    }
    SUBCASE("alternating -1/+1") {
        std::vector<double> chunk(250);
        for (std::size_t i = 0; i < chunk.size(); ++i)
            chunk[i] = (i % 2 == 0) ? -1.0 : 1.0;
        const auto s = feat::chunk_stats(chunk);
        CHECK(s[0] == 1.0);   // max
        CHECK(s[1] == -1.0);  // min
        CHECK(s[2] == 0.0);   // median of the two central order statistics
        CHECK(s[3] == doctest::Approx(1.0).epsilon(1e-12));  // variance
        CHECK(s[4] == doctest::Approx(1.0).epsilon(1e-12));  // kurtosis
        CHECK(s[5] == doctest::Approx(0.0).epsilon(1e-12));  // skewness
    }
    SUBCASE("seeded normal chunk matches a direct-formula oracle") {
        Rng rng(101);
        std::vector<double> chunk(250);
        for (auto& v : chunk) v = 2.0 + 0.7 * rng.normal();
        const auto s = feat::chunk_stats(chunk);

        // Independent recomputation: sorted-order accumulation.
        std::vector<double> sorted = chunk;
        std::sort(sorted.begin(), sorted.end());
        const double n = 250.0;
        double mean = 0.0;
        for (double v : sorted) mean += v;
        mean /= n;
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (double v : sorted) {
            const double d = v - mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        CHECK(s[0] == sorted.back());
        CHECK(s[1] == sorted.front());
        CHECK(s[2] == doctest::Approx(0.5 * (sorted[124] + sorted[125]))
                          .epsilon(1e-15));
        CHECK(s[3] == doctest::Approx(m2).epsilon(1e-12));
        CHECK(s[4] == doctest::Approx(m4 / (m2 * m2)).epsilon(1e-12));
        CHECK(s[5] == doctest::Approx(m3 / (m2 * std::sqrt(m2))).epsilon(1e-12));
    }
    SUBCASE("wrong chunk size is rejected") {
        const std::vector<double> chunk(249, 0.0);
        CHECK_THROWS_AS(feat::chunk_stats(chunk), Error);
    }
}

TEST_CASE("decompose routes energy to the right branch") {
    SUBCASE("constant segment") {
        const auto v = feat::decompose(make_segment(std::vector<double>(2500, -41.0)));
        for (double s : v.low) CHECK(s == doctest::Approx(-41.0).epsilon(1e-9));
        for (double s : v.band) CHECK(std::abs(s) <= 1e-3 * 41.0);
        for (double s : v.high) CHECK(std::abs(s) <= 1e-3 * 41.0);
    }
    SUBCASE("5 Hz sine lands in the motion band") {
        const auto v = feat::decompose(make_segment(sine(5.0)));
        const double total =
            branch_energy(v.low) + branch_energy(v.band) + branch_energy(v.high);
        CHECK(branch_energy(v.band) >= 0.99 * total);
    }
    SUBCASE("50 Hz sine lands in the high branch") {
        const auto v = feat::decompose(make_segment(sine(50.0)));
        const double total =
            branch_energy(v.low) + branch_energy(v.band) + branch_energy(v.high);
        CHECK(branch_energy(v.high) >= 0.99 * total);
    }
}

TEST_CASE("time_features layout: branch-major, then chunk, then statistic") {
    Rng rng(5);
    std::vector<double> samples(2500);
    for (auto& v : samples) v = rng.uniform(-60, -40);
    const auto segment = make_segment(samples);
    const auto v = feat::decompose(segment);
    const auto tf = feat::time_features(v);
    REQUIRE(tf.size() == 180);

    // Spot-check: features of branch b, chunk c are chunk_stats of that slice.
    const std::vector<double>* branches[] = {&v.low, &v.band, &v.high};
    for (int b = 0; b < 3; ++b) {
        for (int c = 0; c < 10; ++c) {
            const auto stats = feat::chunk_stats(std::span<const double>(
                branches[b]->data() + static_cast<std::size_t>(c) * 250, 250));
            for (int s = 0; s < 6; ++s)
                CHECK(tf[static_cast<std::size_t>(b * 60 + c * 6 + s)] ==
                      stats[static_cast<std::size_t>(s)]);
        }
    }
}

TEST_CASE("time-reversed segment permutes chunk features") {
    Rng rng(17);
    std::vector<double> samples(2500);
    for (auto& v : samples) v = -50.0 + rng.normal();
    std::vector<double> reversed(samples.rbegin(), samples.rend());

    const auto tf = feat::time_features(feat::decompose(make_segment(samples)));
    const auto tr = feat::time_features(feat::decompose(make_segment(reversed)));

    // max, min and variance are invariant under within-chunk reversal; the
    // chunk index maps to 9 - c (zero-phase filtering commutes with
    // reversal thanks to the symmetric kernels and reflective padding).
    for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 10; ++c)
            for (int s : {0, 1, 3}) {
                const double original =
                    tf[static_cast<std::size_t>(b * 60 + c * 6 + s)];
                const double mirrored =
                    tr[static_cast<std::size_t>(b * 60 + (9 - c) * 6 + s)];
                CHECK(std::abs(original - mirrored) <=
                      1e-6 * std::max(1.0, std::abs(original)));
            }
}

TEST_CASE("freq_summary: tones, zeros, normalization") {
    SUBCASE("pure 10 Hz sine dominates interval 20") {
        const auto fs = feat::freq_summary(make_segment(sine(10.0)));
        CHECK(fs.pc[19] >= 0.95);  // interval 20 in 1-based counting
        double sum = 0.0;
        for (double p : fs.pc) sum += p;
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        CHECK_FALSE(fs.zero_energy);
    }
    SUBCASE("zero segment falls back to uniform proportions") {
        const auto fs = feat::freq_summary(make_segment(std::vector<double>(2500, 0.0)));
        for (double m : fs.m) CHECK(m == 0.0);
        for (double p : fs.pc) CHECK(p == doctest::Approx(1.0 / 40).epsilon(1e-12));
        CHECK(fs.zero_energy);
    }
    SUBCASE("every bin lands in exactly one interval") {
        // A flat magnitude spectrum distributes all 501 bins: intervals 1
        // and 31..40 get the multi-bin shares.
        Rng rng(23);
        std::vector<double> samples(2500);
        for (auto& v : samples) v = rng.normal();
        const auto fs = feat::freq_summary(make_segment(samples));
        double m_total = 0.0;
        for (double m : fs.m) m_total += m;
        const auto spec = dsp::stft(make_segment(samples).samples, 500.0);
        double bin_total = 0.0;
        for (double m : spec.magnitudes) bin_total += m;
        CHECK(m_total == doctest::Approx(bin_total).epsilon(1e-12));
    }
}

TEST_CASE("build_profile: dimensions, purity, scaling") {
    ban::SynthConfig config;
    config.duration_s = 5.0;
    const auto trace = ban::synth_trace(config, DeviceLabel::on_body,
                                        MotionLabel::arm_moving, 3);
    const auto segment = feat::segment_trace(trace)[0];

    const auto profile = feat::build_profile(segment);
    REQUIRE(profile.values.size() == 380);
    for (double v : profile.values) CHECK(std::isfinite(v));
    CHECK(profile.link == DeviceLabel::on_body);
    CHECK(profile.motion == MotionLabel::arm_moving);

    SUBCASE("identical segments give bitwise-identical profiles") {
        const auto again = feat::build_profile(segment);
        CHECK(std::equal(profile.values.begin(), profile.values.end(),
                         again.values.begin()));
    }
    SUBCASE("scaling the segment scales M and leaves pc unchanged") {
        const double k = 3.7;
        auto scaled = segment;
        for (auto& v : scaled.samples) v *= k;
        const auto a = feat::freq_summary(segment);
        const auto b = feat::freq_summary(scaled);
        for (std::size_t i = 0; i < a.m.size(); ++i)
            CHECK(b.m[i] == doctest::Approx(k * a.m[i]).epsilon(1e-9));
        for (std::size_t i = 0; i < a.pc.size(); ++i)
            CHECK(std::abs(b.pc[i] - a.pc[i]) <= 1e-9);
    }
}

TEST_CASE("profile dataset file round trips") {
    ban::SynthConfig config;
    config.duration_s = 10.0;
    std::vector<feat::ProfileRecord> records;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto trace =
            ban::synth_trace(config, seed % 2 ? DeviceLabel::on_body : DeviceLabel::off_body,
                             MotionLabel::walking, seed);
        for (const auto& segment : feat::segment_trace(trace)) {
            feat::ProfileRecord r;
            r.profile = feat::build_profile(segment);
            r.trace_id = static_cast<std::uint32_t>(seed);
            records.push_back(r);
        }
    }
    REQUIRE(records.size() == 6);

    testutil::TempDir dir;
    const auto path = dir.file("features.bin");
    feat::save_profiles(records, path);
    const auto loaded = feat::load_profiles(path);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i].trace_id == records[i].trace_id);
        CHECK(loaded[i].profile.link == records[i].profile.link);
        CHECK(loaded[i].profile.motion == records[i].profile.motion);
        CHECK(std::equal(loaded[i].profile.values.begin(),
                         loaded[i].profile.values.end(),
                         records[i].profile.values.begin()));
    }

    SUBCASE("truncated file is reported as corrupt") {
        auto bytes = testutil::slurp(path);
        testutil::spit(path, bytes.substr(0, bytes.size() - 100));
        try {
            feat::load_profiles(path);
            FAIL("expected corrupt error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::corrupt);
        }
    }
    SUBCASE("foreign magic is rejected") {
        testutil::spit(path, "NOTAFEATUREFILE................");
        try {
            feat::load_profiles(path);
            FAIL("expected parse error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::parse);
        }
    }
}
