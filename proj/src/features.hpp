// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ban_synth.hpp"
#include "dsp.hpp"

namespace bodyauth::feat {

inline constexpr int kSegmentSamples = 2500;  // 5 s at 500 Hz
inline constexpr int kChunkCount = 10;
inline constexpr int kChunkSamples = kSegmentSamples / kChunkCount;
inline constexpr int kStatCount = 6;
inline constexpr int kTimeFeatureCount = 180;   // 3 branches x 10 chunks x 6
inline constexpr int kFreqIntervalCount = 40;   // 30 low + 10 high
inline constexpr int kFreqFeatureCount = 200;   // 4x40 matrix + 40 proportions
inline constexpr int kProfileDim = kTimeFeatureCount + kFreqFeatureCount;

struct RssSegment {
    std::array<double, kSegmentSamples> samples;
    ban::DeviceLabel link = ban::DeviceLabel::off_body;
    ban::MotionLabel motion = ban::MotionLabel::sitting;
};

// Non-overlapping consecutive 5 s segments; a trailing remainder shorter
// than one segment is discarded. A trace shorter than one segment is an
// error, not an empty result.
std::vector<RssSegment> segment_trace(const ban::RssTrace& trace);

struct MultiScaleVariations {
    std::vector<double> low;   // < 0.5 Hz
    std::vector<double> band;  // 0.5..15 Hz (motion-induced)
    std::vector<double> high;  // > 15 Hz
};

// The three fixed 1001-tap kernels used for decomposition.
struct FilterBank {
    dsp::FilterKernel low;
    dsp::FilterKernel band;
    dsp::FilterKernel high;
};
const FilterBank& default_filter_bank();

MultiScaleVariations decompose(const RssSegment& segment);

// [max, min, median, variance, kurtosis, skewness] of one 250-sample chunk.
// Population variance; kurtosis/skewness are the standardized (non-excess)
// fourth/third moments, defined as 0 for zero-variance chunks.
std::array<double, kStatCount> chunk_stats(std::span<const double> chunk);

// Branch-major (low, band, high) x chunk (0..9) x statistic ordering.
std::array<double, kTimeFeatureCount> time_features(const MultiScaleVariations& v);

// 4x40 summed-magnitude matrix and the per-interval proportions.
// Intervals 1..30 split [0, 15] Hz in 0.5 Hz steps (the 0 Hz bin joins
// interval 1); intervals 31..40 split (15, 250] Hz in 23.5 Hz steps.
struct SpectroSummary {
    std::array<double, 4 * kFreqIntervalCount> m;  // row-major 4x40
    std::array<double, kFreqIntervalCount> pc;
    bool zero_energy = false;  // pc fell back to uniform
};

SpectroSummary freq_summary(const RssSegment& segment);

struct PropagationProfile {
    std::array<double, kProfileDim> values;  // time features then freq features
    ban::DeviceLabel link = ban::DeviceLabel::off_body;
    ban::MotionLabel motion = ban::MotionLabel::sitting;

    std::span<const double> time() const { return {values.data(), kTimeFeatureCount}; }
    std::span<const double> freq() const {
        return {values.data() + kTimeFeatureCount, kFreqFeatureCount};
    }
};

PropagationProfile build_profile(const RssSegment& segment);

// --- feature dataset file --------------------------------------------------
//
// Little-endian binary: magic "BAFD", u32 version=1, u32 record count,
// u32 dim=380, then per record: u32 trace_id, u8 link, u8 motion,
// u16 reserved, dim f64 values.

struct ProfileRecord {
    PropagationProfile profile;
    std::uint32_t trace_id = 0;
};

void save_profiles(std::span<const ProfileRecord> records, const std::string& path);
std::vector<ProfileRecord> load_profiles(const std::string& path);

// Segment + featurize every trace; trace_id is the index into `traces`.
std::vector<ProfileRecord> featurize_traces(std::span<const ban::RssTrace> traces);

}  // namespace bodyauth::feat
