// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "ban_synth.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "common.hpp"
#include "rng.hpp"

namespace bodyauth::ban {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Where inside the motion band each motion concentrates its sinusoids,
// as fractions of [motion_band_lo, motion_band_hi]. Static postures sit
// low (posture sway, breathing); gait and rotation spread higher.
struct BandFraction {
    double lo, hi;
};
constexpr std::array<BandFraction, kMotionCount> kMotionBandFraction{{
    {0.00, 0.15},  // sitting
    {0.00, 0.20},  // standing
    {0.05, 0.45},  // arm_moving
    {0.10, 0.60},  // rotating
    {0.15, 1.00},  // walking
    {0.00, 1.00},  // uncontrolled
}};

void require_finite(double v, const char* name) {
    require(std::isfinite(v), Errc::invalid_argument,
            std::string("non-finite config value: ") + name);
}

}  // namespace

const char* to_string(DeviceLabel link) {
    return link == DeviceLabel::on_body ? "on" : "off";
}

const char* to_string(MotionLabel motion) {
    switch (motion) {
        case MotionLabel::sitting: return "sitting";
        case MotionLabel::standing: return "standing";
        case MotionLabel::arm_moving: return "arm_moving";
        case MotionLabel::rotating: return "rotating";
        case MotionLabel::walking: return "walking";
        case MotionLabel::uncontrolled: return "uncontrolled";
    }
    return "?";
}

DeviceLabel device_label_from_string(const std::string& s) {
    if (s == "on" || s == "on_body" || s == "1") return DeviceLabel::on_body;
    if (s == "off" || s == "off_body" || s == "0") return DeviceLabel::off_body;
    fail(Errc::parse, "unknown device label: " + s);
}

MotionLabel motion_label_from_string(const std::string& s) {
    for (int m = 0; m < kMotionCount; ++m) {
        if (s == to_string(static_cast<MotionLabel>(m)))
            return static_cast<MotionLabel>(m);
    }
    fail(Errc::parse, "unknown motion label: " + s);
}

void SynthConfig::validate() const {
    require(config_version == 1, Errc::format_version,
            "unsupported synth config version");
    require_finite(duration_s, "duration_s");
    require_finite(sample_rate_hz, "sample_rate_hz");
    require_finite(base_rss_dbm, "base_rss_dbm");
    require_finite(motion_band_lo_hz, "motion_band_lo_hz");
    require_finite(motion_band_hi_hz, "motion_band_hi_hz");
    require_finite(noise_floor_db, "noise_floor_db");
    require_finite(level_jitter_db, "level_jitter_db");
    require_finite(on_multipath_scale, "on_multipath_scale");
    require_finite(off_motion_scale, "off_motion_scale");
    require_finite(off_shadow_scale, "off_shadow_scale");
    require(sample_rate_hz > 0.0, Errc::invalid_argument,
            "sample_rate_hz must be positive");
    require(motion_band_lo_hz > 0.0 && motion_band_lo_hz < motion_band_hi_hz,
            Errc::invalid_argument, "motion band must satisfy 0 < lo < hi");
    require(motion_band_hi_hz < sample_rate_hz / 2.0, Errc::invalid_argument,
            "motion band must lie below Nyquist");
    require(noise_floor_db >= 0.0 && level_jitter_db >= 0.0 &&
                on_multipath_scale >= 0.0 && off_motion_scale >= 0.0 &&
                off_shadow_scale >= 0.0,
            Errc::invalid_argument, "scales and noise levels must be >= 0");
    for (const auto& a : amplitudes) {
        require_finite(a.motion_amp_db, "motion_amp_db");
        require_finite(a.multipath_amp_db, "multipath_amp_db");
        require_finite(a.shadowing_amp_db, "shadowing_amp_db");
        require(a.motion_amp_db >= 0.0 && a.multipath_amp_db >= 0.0 &&
                    a.shadowing_amp_db >= 0.0,
                Errc::invalid_argument, "amplitudes must be >= 0");
    }
}

RssTrace synth_trace(const SynthConfig& config, DeviceLabel link,
                     MotionLabel motion, std::uint64_t seed) {
    config.validate();
    require(config.duration_s >= 5.0, Errc::invalid_argument,
            "duration_s must be >= 5 (one segment)");

    const double fs = config.sample_rate_hz;
    const std::size_t n =
        static_cast<std::size_t>(std::llround(config.duration_s * fs));
    const MotionAmplitudes& amp = config.for_motion(motion);

    const bool on = link == DeviceLabel::on_body;
    const double motion_amp =
        amp.motion_amp_db * (on ? 1.0 : config.off_motion_scale);
    const double multipath_amp =
        amp.multipath_amp_db * (on ? config.on_multipath_scale : 1.0);
    const double shadow_amp =
        amp.shadowing_amp_db * (on ? 1.0 : config.off_shadow_scale);

    // Independent deterministic sub-streams per component.
    const std::uint64_t root = mix_seed(
        mix_seed(seed, static_cast<std::uint64_t>(link) + 0x11),
        static_cast<std::uint64_t>(motion) + 0x29);
    Rng rng_setup(mix_seed(root, 1));
    Rng rng_shadow(mix_seed(root, 2));
    Rng rng_multipath(mix_seed(root, 3));
    Rng rng_white(mix_seed(root, 4));
    Rng rng_envelope(mix_seed(root, 5));

    const double level =
        config.base_rss_dbm +
        rng_setup.uniform(-config.level_jitter_db, config.level_jitter_db);

    // Motion band: 3..8 sinusoids, random phases, amplitudes normalized so
    // the summed sinusoid variance equals motion_amp^2.
    const std::size_t n_sines = 3 + rng_setup.below(6);
    const BandFraction frac = kMotionBandFraction[static_cast<std::size_t>(motion)];
    const double band_span = config.motion_band_hi_hz - config.motion_band_lo_hz;
    std::vector<double> sine_freq(n_sines), sine_phase(n_sines), sine_amp(n_sines);
    double weight_sq = 0.0;
    for (std::size_t k = 0; k < n_sines; ++k) {
        sine_freq[k] = config.motion_band_lo_hz +
                       band_span * rng_setup.uniform(frac.lo, frac.hi);
        sine_phase[k] = rng_setup.uniform(0.0, kTwoPi);
        sine_amp[k] = rng_setup.uniform(0.5, 1.5);
        weight_sq += sine_amp[k] * sine_amp[k];
    }
    const double sine_scale =
        weight_sq > 0.0 ? motion_amp * std::sqrt(2.0 / weight_sq) : 0.0;
    for (auto& a : sine_amp) a *= sine_scale;

    // Shadowing: stationary AR(1) in dB (log-normal in linear units),
    // 3 dB point well below 0.5 Hz.
    const double shadow_tau_s = 2.0;
    const double rho = std::exp(-1.0 / (shadow_tau_s * fs));
    const double shadow_innov = shadow_amp * std::sqrt(1.0 - rho * rho);
    double shadow = shadow_amp * rng_shadow.normal();

    // Multipath: first-difference colored noise, energy concentrated above
    // the motion band; normalized to std = multipath_amp.
    const double mp_c = 0.85;
    const double mp_scale = multipath_amp / std::sqrt(1.0 + mp_c * mp_c);
    double mp_prev = rng_multipath.normal();

    // Casual behavior: slow log-amplitude envelope on the motion band.
    const bool enveloped = motion == MotionLabel::uncontrolled;
    const double env_tau_s = 1.5;
    const double env_rho = std::exp(-1.0 / (env_tau_s * fs));
    const double env_std = 0.6;
    const double env_innov = env_std * std::sqrt(1.0 - env_rho * env_rho);
    double env_state = env_std * (enveloped ? rng_envelope.normal() : 0.0);

    RssTrace trace;
    trace.sample_rate_hz = fs;
    trace.link = link;
    trace.motion = motion;
    trace.seed = seed;
    trace.samples_dbm.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;

        double motion_component = 0.0;
        for (std::size_t k = 0; k < n_sines; ++k)
            motion_component +=
                sine_amp[k] * std::sin(kTwoPi * sine_freq[k] * t + sine_phase[k]);
        if (enveloped) {
            motion_component *= std::exp(env_state);
            env_state = env_rho * env_state + env_innov * rng_envelope.normal();
        }

        const double mp_cur = rng_multipath.normal();
        const double multipath_component = mp_scale * (mp_cur - mp_c * mp_prev);
        mp_prev = mp_cur;

        const double white = config.noise_floor_db * rng_white.normal();

        trace.samples_dbm[i] =
            level + shadow + motion_component + multipath_component + white;

        shadow = rho * shadow + shadow_innov * rng_shadow.normal();
    }
    return trace;
}

std::vector<RssTrace> synth_dataset(const SynthConfig& config,
                                    std::span<const CellCount> counts,
                                    std::uint64_t master_seed) {
    std::vector<RssTrace> traces;
    std::size_t cell_index = 0;
    for (const CellCount& cell : counts) {
        require(cell.count >= 0, Errc::invalid_argument,
                "trace counts must be non-negative");
        for (int i = 0; i < cell.count; ++i) {
            const std::uint64_t trace_seed = mix_seed(
                master_seed, (static_cast<std::uint64_t>(cell_index) << 32) |
                                 static_cast<std::uint64_t>(i));
            traces.push_back(
                synth_trace(config, cell.link, cell.motion, trace_seed));
        }
        ++cell_index;
    }
    return traces;
}

std::vector<CellCount> balanced_counts(int per_cell, int uncontrolled_per_link) {
    std::vector<CellCount> counts;
    for (DeviceLabel link : {DeviceLabel::on_body, DeviceLabel::off_body}) {
        for (int m = 0; m < kControlledMotionCount; ++m)
            counts.push_back({link, static_cast<MotionLabel>(m), per_cell});
    }
    for (DeviceLabel link : {DeviceLabel::on_body, DeviceLabel::off_body})
        counts.push_back({link, MotionLabel::uncontrolled, uncontrolled_per_link});
    return counts;
}

RssTrace ingest_csv(std::istream& in, DeviceLabel link, MotionLabel motion) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), Errc::parse,
            "empty trace CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "t_s,rss_dbm", Errc::parse,
            "line 1: expected header `t_s,rss_dbm`, got `" + line + "`");

    std::vector<double> t, v;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        require(comma != std::string::npos, Errc::parse,
                "line " + std::to_string(line_no) + ": expected `t,rss`");
        char* end = nullptr;
        const std::string ts = line.substr(0, comma);
        const std::string vs = line.substr(comma + 1);
        const double tv = std::strtod(ts.c_str(), &end);
        require(end == ts.c_str() + ts.size() && !ts.empty(), Errc::parse,
                "line " + std::to_string(line_no) + ": bad timestamp `" + ts + "`");
        const double vv = std::strtod(vs.c_str(), &end);
        require(end == vs.c_str() + vs.size() && !vs.empty(), Errc::parse,
                "line " + std::to_string(line_no) + ": bad RSS value `" + vs + "`");
        require(std::isfinite(tv) && std::isfinite(vv), Errc::parse,
                "line " + std::to_string(line_no) + ": non-finite value");
        if (!t.empty() && tv <= t.back())
            fail(Errc::parse, "line " + std::to_string(line_no) +
                                  ": non-monotone timestamp");
        t.push_back(tv);
        v.push_back(vv);
    }
    require(t.size() >= 2, Errc::too_short, "trace CSV has fewer than 2 rows");

    const double fs = 500.0;
    const double span = t.back() - t.front();
    const double mean_dt = span / static_cast<double>(t.size() - 1);
    const double duration = span + mean_dt;
    require(duration >= 5.0 - 1e-9, Errc::too_short,
            "trace covers less than 5 s of data");

    const std::size_t n_out =
        static_cast<std::size_t>(std::llround(duration * fs));
    RssTrace trace;
    trace.sample_rate_hz = fs;
    trace.link = link;
    trace.motion = motion;
    trace.seed = 0;
    trace.samples_dbm.resize(n_out);

    std::size_t j = 0;
    for (std::size_t i = 0; i < n_out; ++i) {
        const double ti = t.front() + static_cast<double>(i) / fs;
        while (j + 1 < t.size() && t[j + 1] < ti) ++j;
        if (ti <= t[j]) {
            trace.samples_dbm[i] = v[j];
        } else if (j + 1 >= t.size() || ti >= t.back()) {
            trace.samples_dbm[i] = v.back();
        } else {
            const double w = (ti - t[j]) / (t[j + 1] - t[j]);
            trace.samples_dbm[i] = v[j] + w * (v[j + 1] - v[j]);
        }
    }
    return trace;
}

void write_csv(const RssTrace& trace, std::ostream& out) {
    out << "t_s,rss_dbm\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.samples_dbm.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f,%.17g",
                      static_cast<double>(i) / trace.sample_rate_hz,
                      trace.samples_dbm[i]);
        out << buf << '\n';
    }
}

namespace {

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, Errc::parse,
                "config line " + std::to_string(line_no) + ": expected `key = value`");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!key.empty() && !value.empty(), Errc::parse,
                "config line " + std::to_string(line_no) + ": empty key or value");
        require(!kv.count(key), Errc::parse,
                "config line " + std::to_string(line_no) + ": duplicate key " + key);
        kv[key] = value;
    }
    return kv;
}

std::vector<double> parse_doubles(const std::string& s, std::size_t expect,
                                  const std::string& key) {
    std::istringstream iss(s);
    std::vector<double> out;
    double x;
    while (iss >> x) out.push_back(x);
    require(iss.eof() && out.size() == expect, Errc::parse,
            "config key " + key + ": expected " + std::to_string(expect) +
                " numeric value(s)");
    return out;
}

}  // namespace

SynthConfig load_synth_config(std::istream& in) {
    auto kv = parse_key_values(in);
    SynthConfig config;

    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        require(it != kv.end(), Errc::parse,
                std::string("config missing key: ") + key);
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_double = [&](const char* key) {
        return parse_doubles(take(key), 1, key)[0];
    };

    config.config_version = static_cast<int>(take_double("config_version"));
    require(config.config_version == 1, Errc::format_version,
            "unsupported synth config version " +
                std::to_string(config.config_version));
    config.duration_s = take_double("duration_s");
    config.sample_rate_hz = take_double("sample_rate_hz");
    config.base_rss_dbm = take_double("base_rss_dbm");
    const auto band = parse_doubles(take("motion_band_hz"), 2, "motion_band_hz");
    config.motion_band_lo_hz = band[0];
    config.motion_band_hi_hz = band[1];
    config.noise_floor_db = take_double("noise_floor_db");
    config.level_jitter_db = take_double("level_jitter_db");
    config.on_multipath_scale = take_double("on_multipath_scale");
    config.off_motion_scale = take_double("off_motion_scale");
    config.off_shadow_scale = take_double("off_shadow_scale");
    for (int m = 0; m < kMotionCount; ++m) {
        const std::string key =
            std::string("amps.") + to_string(static_cast<MotionLabel>(m));
        const auto a = parse_doubles(take(key.c_str()), 3, key);
        config.amplitudes[static_cast<std::size_t>(m)] = {a[0], a[1], a[2]};
    }
    if (!kv.empty())
        fail(Errc::parse, "config has unknown key: " + kv.begin()->first);
    config.validate();
    return config;
}

void save_synth_config(const SynthConfig& config, std::ostream& out) {
    char buf[256];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
        out << buf;
    };
    out << "# bodyauth synthetic BAN channel configuration\n";
    put("config_version", config.config_version);
    put("duration_s", config.duration_s);
    put("sample_rate_hz", config.sample_rate_hz);
    put("base_rss_dbm", config.base_rss_dbm);
    std::snprintf(buf, sizeof buf, "motion_band_hz = %.17g %.17g\n",
                  config.motion_band_lo_hz, config.motion_band_hi_hz);
    out << buf;
    put("noise_floor_db", config.noise_floor_db);
    put("level_jitter_db", config.level_jitter_db);
    put("on_multipath_scale", config.on_multipath_scale);
    put("off_motion_scale", config.off_motion_scale);
    put("off_shadow_scale", config.off_shadow_scale);
    out << "# per-motion: motion_amp_db multipath_amp_db shadowing_amp_db\n";
    for (int m = 0; m < kMotionCount; ++m) {
        const auto& a = config.amplitudes[static_cast<std::size_t>(m)];
        std::snprintf(buf, sizeof buf, "amps.%s = %.17g %.17g %.17g\n",
                      to_string(static_cast<MotionLabel>(m)), a.motion_amp_db,
                      a.multipath_amp_db, a.shadowing_amp_db);
        out << buf;
    }
}

}  // namespace bodyauth::ban
