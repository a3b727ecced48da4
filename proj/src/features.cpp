// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "common.hpp"

namespace bodyauth::feat {

namespace {

constexpr int kFirTaps = 1001;
constexpr double kFs = 500.0;
constexpr double kBandLo = 0.5;
constexpr double kBandHi = 15.0;

void require_segment(const RssSegment& segment) {
    for (double s : segment.samples)
        require(std::isfinite(s), Errc::invalid_argument,
                "segment contains non-finite samples");
}

}  // namespace

std::vector<RssSegment> segment_trace(const ban::RssTrace& trace) {
    require(trace.sample_rate_hz == kFs, Errc::invalid_argument,
            "segmentation expects 500 Hz traces");
    const std::size_t n = trace.samples_dbm.size();
    require(n >= kSegmentSamples, Errc::too_short,
            "trace shorter than one 5 s segment (" + std::to_string(n) +
                " samples)");
    std::vector<RssSegment> segments(n / kSegmentSamples);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        std::copy_n(trace.samples_dbm.begin() +
                        static_cast<std::ptrdiff_t>(s) * kSegmentSamples,
                    kSegmentSamples, segments[s].samples.begin());
        segments[s].link = trace.link;
        segments[s].motion = trace.motion;
    }
    return segments;
}

const FilterBank& default_filter_bank() {
    static const FilterBank bank = [] {
        FilterBank b;
        const double lo[] = {kBandLo};
        const double band[] = {kBandLo, kBandHi};
        const double hi[] = {kBandHi};
        b.low = dsp::design_fir(dsp::FilterKind::low_pass, lo, kFirTaps, kFs);
        b.band = dsp::design_fir(dsp::FilterKind::band_pass, band, kFirTaps, kFs);
        b.high = dsp::design_fir(dsp::FilterKind::high_pass, hi, kFirTaps, kFs);
        return b;
    }();
    return bank;
}

MultiScaleVariations decompose(const RssSegment& segment) {
    require_segment(segment);
    const FilterBank& bank = default_filter_bank();
    MultiScaleVariations v;
    v.low = dsp::filter_zero_phase(segment.samples, bank.low);
    v.band = dsp::filter_zero_phase(segment.samples, bank.band);
    v.high = dsp::filter_zero_phase(segment.samples, bank.high);
    return v;
}

std::array<double, kStatCount> chunk_stats(std::span<const double> chunk) {
    require(chunk.size() == kChunkSamples, Errc::invalid_argument,
            "chunk_stats expects exactly 250 samples");
    const std::size_t n = chunk.size();

    double mx = chunk[0], mn = chunk[0], sum = 0.0;
    for (double x : chunk) {
        mx = std::max(mx, x);
        mn = std::min(mn, x);
        sum += x;
    }
    const double mean = sum / static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : chunk) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    std::vector<double> sorted(chunk.begin(), chunk.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = (n % 2 == 1)
                              ? sorted[n / 2]
                              : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    double kurtosis = 0.0, skewness = 0.0;
    if (m2 > 0.0) {
        kurtosis = m4 / (m2 * m2);
        skewness = m3 / (m2 * std::sqrt(m2));
    }
    return {mx, mn, median, m2, kurtosis, skewness};
}

std::array<double, kTimeFeatureCount> time_features(const MultiScaleVariations& v) {
    const std::vector<double>* branches[] = {&v.low, &v.band, &v.high};
    std::array<double, kTimeFeatureCount> out{};
    std::size_t pos = 0;
    for (const auto* branch : branches) {
        require(branch->size() == kSegmentSamples, Errc::invalid_argument,
                "variation branch must have 2500 samples");
        for (int c = 0; c < kChunkCount; ++c) {
            const auto stats = chunk_stats(std::span<const double>(
                branch->data() + static_cast<std::size_t>(c) * kChunkSamples,
                kChunkSamples));
            for (double s : stats) out[pos++] = s;
        }
    }
    return out;
}

namespace {

// Interval index (0-based) for one-sided FFT bin k (bin spacing 0.5 Hz).
// Bins are assigned to the interval whose range (lo, hi] contains the bin
// frequency; the 0 Hz bin joins the first interval.
int interval_of_bin(int bin) {
    if (bin <= 1) return 0;                       // 0 Hz and (0, 0.5]
    if (bin <= 30) return bin - 1;                // (0.5, 15] in 0.5 Hz steps
    const double f = 0.5 * bin;
    const int j = 30 + static_cast<int>(std::ceil((f - 15.0) / 23.5)) - 1;
    return std::min(j, kFreqIntervalCount - 1);
}

}  // namespace

SpectroSummary freq_summary(const RssSegment& segment) {
    require_segment(segment);
    const dsp::Spectrogram spec = dsp::stft(segment.samples, kFs);

    SpectroSummary out{};
    out.m.fill(0.0);
    for (int w = 0; w < spec.window_count; ++w)
        for (int bin = 0; bin < spec.bin_count; ++bin)
            out.m[static_cast<std::size_t>(w) * kFreqIntervalCount +
                  interval_of_bin(bin)] += spec.at(w, bin);

    double total = 0.0;
    std::array<double, kFreqIntervalCount> column_sum{};
    for (int j = 0; j < kFreqIntervalCount; ++j) {
        for (int w = 0; w < spec.window_count; ++w)
            column_sum[static_cast<std::size_t>(j)] +=
                out.m[static_cast<std::size_t>(w) * kFreqIntervalCount + j];
        total += column_sum[static_cast<std::size_t>(j)];
    }
    if (total > 0.0) {
        for (int j = 0; j < kFreqIntervalCount; ++j)
            out.pc[static_cast<std::size_t>(j)] =
                column_sum[static_cast<std::size_t>(j)] / total;
    } else {
        out.pc.fill(1.0 / kFreqIntervalCount);
        out.zero_energy = true;
    }
    return out;
}

PropagationProfile build_profile(const RssSegment& segment) {
    PropagationProfile profile;
    profile.link = segment.link;
    profile.motion = segment.motion;

    const auto tf = time_features(decompose(segment));
    std::copy(tf.begin(), tf.end(), profile.values.begin());

    const SpectroSummary fs = freq_summary(segment);
    std::copy(fs.m.begin(), fs.m.end(),
              profile.values.begin() + kTimeFeatureCount);
    std::copy(fs.pc.begin(), fs.pc.end(),
              profile.values.begin() + kTimeFeatureCount + fs.m.size());

    for (double v : profile.values)
        require(std::isfinite(v), Errc::numeric,
                "profile contains non-finite feature values");
    return profile;
}

namespace {

constexpr char kMagic[4] = {'B', 'A', 'F', 'D'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_pod(std::ifstream& in, T& v, const std::string& what) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    require(in.gcount() == static_cast<std::streamsize>(sizeof v), Errc::corrupt,
            "feature file truncated while reading " + what);
}

}  // namespace

void save_profiles(std::span<const ProfileRecord> records,
                   const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::io, "cannot open for writing: " + path);
    out.write(kMagic, sizeof kMagic);
    write_pod(out, kFormatVersion);
    write_pod(out, static_cast<std::uint32_t>(records.size()));
    write_pod(out, static_cast<std::uint32_t>(kProfileDim));
    for (const ProfileRecord& r : records) {
        write_pod(out, r.trace_id);
        write_pod(out, static_cast<std::uint8_t>(r.profile.link));
        write_pod(out, static_cast<std::uint8_t>(r.profile.motion));
        write_pod(out, static_cast<std::uint16_t>(0));
        out.write(reinterpret_cast<const char*>(r.profile.values.data()),
                  sizeof(double) * kProfileDim);
    }
    require(out.good(), Errc::io, "write failed: " + path);
}

std::vector<ProfileRecord> load_profiles(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::io, "cannot open feature file: " + path);
    char magic[4];
    in.read(magic, sizeof magic);
    require(in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0, Errc::parse,
            "not a bodyauth feature file: " + path);
    std::uint32_t version = 0, count = 0, dim = 0;
    read_pod(in, version, "version");
    require(version == kFormatVersion, Errc::format_version,
            "unsupported feature file version " + std::to_string(version));
    read_pod(in, count, "record count");
    read_pod(in, dim, "dimension");
    require(dim == kProfileDim, Errc::format_version,
            "unexpected feature dimension " + std::to_string(dim));

    std::vector<ProfileRecord> records(count);
    for (ProfileRecord& r : records) {
        std::uint8_t link = 0, motion = 0;
        std::uint16_t reserved = 0;
        read_pod(in, r.trace_id, "record");
        read_pod(in, link, "record");
        read_pod(in, motion, "record");
        read_pod(in, reserved, "record");
        require(link <= 1 && motion < ban::kMotionCount, Errc::corrupt,
                "feature record carries invalid labels");
        r.profile.link = static_cast<ban::DeviceLabel>(link);
        r.profile.motion = static_cast<ban::MotionLabel>(motion);
        in.read(reinterpret_cast<char*>(r.profile.values.data()),
                sizeof(double) * kProfileDim);
        require(in.gcount() ==
                    static_cast<std::streamsize>(sizeof(double) * kProfileDim),
                Errc::corrupt, "feature file truncated mid-record");
    }
    return records;
}

std::vector<ProfileRecord> featurize_traces(std::span<const ban::RssTrace> traces) {
    std::vector<ProfileRecord> records;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        for (const RssSegment& segment : segment_trace(traces[i])) {
            ProfileRecord r;
            r.profile = build_profile(segment);
            r.trace_id = static_cast<std::uint32_t>(i);
            records.push_back(r);
        }
    }
    return records;
}

}  // namespace bodyauth::feat
