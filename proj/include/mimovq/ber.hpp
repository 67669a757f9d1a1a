#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"
#include "serialize.hpp"

// Monte Carlo BER harness.  Every (H, x, v) realization derives from the
// experiment seed alone — never from the detector — so two experiments that
// share a seed, grid and system config see identical per-trial realizations
// (paired comparison), and every CSV is replayable from its manifest.

namespace mimovq {

inline constexpr std::size_t kTrialChunk = 1024;
inline constexpr double kZ95 = 1.959963984540054;

struct StoppingRule {
    std::uint64_t min_bit_errors = 200;
    std::uint64_t max_trials = 10'000'000;
};

struct FixedChannelSet {
    std::uint64_t size = 0;  // 0 = fresh channel per draw
    std::uint64_t seed = 0;
};

struct DetectorDescriptor {
    DetectorKind kind = DetectorKind::ZF;
    std::string bundle_path;  // vq / mnnet only
};

struct ExperimentSpec {
    std::string name = "experiment";
    DetectorDescriptor detector;
    MimoConfig config;
    std::vector<double> snr_grid_db;
    StoppingRule stop;
    std::uint64_t seed = 1;
    int transmissions_per_channel = 1;
    FixedChannelSet channel_set;
};

// detect(channel, y, noise_variance) -> per-antenna symbol indices
using DetectFn =
    std::function<std::vector<int>(const ChannelRealization&, const std::vector<cdouble>&, double)>;

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t symbol_errors = 0;
    double ber = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct BerCurve {
    std::string name;
    std::vector<BerPoint> points;
};

// 95% Wilson score interval; always brackets k/n.
inline std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    const double p = static_cast<double>(k) / static_cast<double>(n);
    const double z2 = kZ95 * kZ95;
    const double nn = static_cast<double>(n);
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace detail {

inline void validate_spec(const ExperimentSpec& spec) {
    if (spec.snr_grid_db.empty()) throw std::invalid_argument("experiment: empty SNR grid");
    for (std::size_t i = 0; i < spec.snr_grid_db.size(); ++i) {
        if (std::isnan(spec.snr_grid_db[i])) throw std::invalid_argument("experiment: NaN SNR point");
        if (i > 0 && spec.snr_grid_db[i] <= spec.snr_grid_db[i - 1])
            throw std::invalid_argument("experiment: SNR grid must be strictly increasing");
    }
    if (spec.stop.min_bit_errors < 1) throw std::invalid_argument("experiment: min_bit_errors must be >= 1");
    if (spec.stop.max_trials < 1) throw std::invalid_argument("experiment: max_trials must be >= 1");
    if (spec.transmissions_per_channel < 1)
        throw std::invalid_argument("experiment: transmissions_per_channel must be >= 1");
}

// Runs fn(channel, transmission) for `count` trials of chunk `chunk_idx` at
// grid point `point_idx`.  The chunk owns an independent substream, so trial
// realizations depend only on (seed, point, chunk, offset).
template <typename Fn>
inline void run_chunk(const ExperimentSpec& spec, const NoiseModel& noise,
                      const std::vector<ChannelRealization>* set, std::size_t point_idx,
                      std::size_t chunk_idx, std::size_t count, Fn&& fn) {
    Rng rng(derive_seed(spec.seed, 0x747269616cull, point_idx, chunk_idx));
    ChannelRealization current;
    for (std::size_t i = 0; i < count; ++i) {
        if (i % static_cast<std::size_t>(spec.transmissions_per_channel) == 0) {
            if (set)
                current = (*set)[rng.uniform_int(set->size())];
            else
                current = draw_channel(rng, spec.config);
        }
        const Transmission t = transmit(rng, spec.config, current, noise);
        fn(current, t);
    }
}

}  // namespace detail

// The realizations behind a FixedChannelSet descriptor; training against the
// same descriptor sees the same channels the harness will test on.
inline std::vector<ChannelRealization> materialize_channel_set(const FixedChannelSet& cs,
                                                               const MimoConfig& config) {
    std::vector<ChannelRealization> set;
    if (cs.size > 0) {
        Rng rng(derive_seed(cs.seed, 0x63686f6c64ull));
        set = draw_channel_set(rng, config, cs.size);
    }
    return set;
}

namespace detail {

inline std::vector<ChannelRealization> materialize_channel_set(const ExperimentSpec& spec) {
    return mimovq::materialize_channel_set(spec.channel_set, spec.config);
}

}  // namespace detail

struct TrialRecord {
    ChannelRealization channel;
    Transmission tx;
};

// Re-derives the first `count` trial realizations of one grid point; used to
// audit the paired-stream and replay contracts.
inline std::vector<TrialRecord> replay_trials(const ExperimentSpec& spec, std::size_t point_idx,
                                              std::size_t count) {
    detail::validate_spec(spec);
    if (point_idx >= spec.snr_grid_db.size()) throw std::invalid_argument("replay_trials: bad point");
    const NoiseModel noise = calibrate_noise(spec.snr_grid_db[point_idx], spec.config);
    const std::vector<ChannelRealization> set = detail::materialize_channel_set(spec);
    std::vector<TrialRecord> records;
    records.reserve(count);
    std::size_t chunk_idx = 0;
    while (records.size() < count) {
        const std::size_t want = std::min(kTrialChunk, count - records.size());
        detail::run_chunk(spec, noise, set.empty() ? nullptr : &set, point_idx, chunk_idx, want,
                          [&records](const ChannelRealization& ch, const Transmission& t) {
                              records.push_back({ch, t});
                          });
        ++chunk_idx;
    }
    return records;
}

inline BerCurve run_experiment(const ExperimentSpec& spec, const DetectFn& detect) {
    detail::validate_spec(spec);
    const std::vector<ChannelRealization> set = detail::materialize_channel_set(spec);
    const std::vector<ChannelRealization>* set_ptr = set.empty() ? nullptr : &set;
    const Constellation& constellation = spec.config.constellation;
    const int bits_per_trial = spec.config.tx_antennas * constellation.bits_per_symbol;

    BerCurve curve;
    curve.name = spec.name;
    for (std::size_t p = 0; p < spec.snr_grid_db.size(); ++p) {
        const NoiseModel noise = calibrate_noise(spec.snr_grid_db[p], spec.config);
        BerPoint point;
        point.snr_db = spec.snr_grid_db[p];

        std::size_t chunk_idx = 0;
        while (point.trials < spec.stop.max_trials && point.bit_errors < spec.stop.min_bit_errors) {
            const std::size_t count =
                std::min(kTrialChunk, static_cast<std::size_t>(spec.stop.max_trials - point.trials));
            detail::run_chunk(
                spec, noise, set_ptr, p, chunk_idx, count,
                [&](const ChannelRealization& ch, const Transmission& t) {
                    const std::vector<int> detected = detect(ch, t.y, noise.variance);
                    if (detected.size() != t.indices.size())
                        throw std::runtime_error("experiment: detector returned wrong arity");
                    for (std::size_t m = 0; m < detected.size(); ++m) {
                        if (detected[m] != t.indices[m]) {
                            ++point.symbol_errors;
                            point.bit_errors += bit_errors_between(constellation, t.indices[m], detected[m]);
                        }
                    }
                });
            point.trials += count;
            ++chunk_idx;
        }

        const std::uint64_t bits = point.trials * static_cast<std::uint64_t>(bits_per_trial);
        point.ber = bits ? static_cast<double>(point.bit_errors) / static_cast<double>(bits) : 0.0;
        const auto [lo, hi] = wilson_interval(point.bit_errors, bits);
        point.ci_low = lo;
        point.ci_high = hi;
        curve.points.push_back(point);
    }
    return curve;
}

// Builds the detection callback named by the spec, loading ANN bundles from
// disk and checking that they match the system config.
inline DetectFn make_detect_fn(const ExperimentSpec& spec) {
    const MimoConfig& config = spec.config;
    switch (spec.detector.kind) {
        case DetectorKind::MF:
            return [&config](const ChannelRealization& ch, const std::vector<cdouble>& y, double) {
                return demap_hard(config.constellation, mf_equalize(ch.h, y).x_soft);
            };
        case DetectorKind::ZF:
            return [&config](const ChannelRealization& ch, const std::vector<cdouble>& y, double) {
                return demap_hard(config.constellation, zf_equalize(ch.h, y).x_soft);
            };
        case DetectorKind::LMMSE:
            return [&config](const ChannelRealization& ch, const std::vector<cdouble>& y, double nv) {
                return demap_hard(config.constellation, lmmse_equalize(ch.h, y, nv).x_soft);
            };
        case DetectorKind::MLSD:
            if (config.codebook_size > kMlsdCandidateBudget)
                throw BudgetExceededError("experiment: MLSD candidate count exceeds the search budget");
            return [&config](const ChannelRealization& ch, const std::vector<cdouble>& y, double) {
                return mlsd_detect(config, ch.h, y).indices;
            };
        case DetectorKind::VQ: {
            if (spec.detector.bundle_path.empty())
                throw std::invalid_argument("experiment: vq detector needs a bundle path");
            auto det = std::make_shared<VqDetector>(load_detector_file(spec.detector.bundle_path));
            if (det->config.tx_antennas != config.tx_antennas ||
                det->config.rx_antennas != config.rx_antennas ||
                det->config.constellation.scheme != config.constellation.scheme)
                throw std::invalid_argument("experiment: bundle does not match system config");
            return [det](const ChannelRealization& ch, const std::vector<cdouble>& y, double nv) {
                return vq_detect(*det, ch, y, nv);
            };
        }
        case DetectorKind::MNNET: {
            if (spec.detector.bundle_path.empty())
                throw std::invalid_argument("experiment: mnnet detector needs a bundle path");
            auto graph = std::make_shared<MnnetGraph>(load_mnnet_file(spec.detector.bundle_path));
            if (graph->config.tx_antennas != config.tx_antennas ||
                graph->config.rx_antennas != config.rx_antennas ||
                graph->config.constellation.scheme != config.constellation.scheme)
                throw std::invalid_argument("experiment: bundle does not match system config");
            return [graph](const ChannelRealization& ch, const std::vector<cdouble>& y, double) {
                return mnnet_detect(*graph, ch, y);
            };
        }
    }
    throw std::invalid_argument("experiment: unknown detector kind");
}

inline BerCurve run_experiment(const ExperimentSpec& spec) {
    return run_experiment(spec, make_detect_fn(spec));
}

// -- CSV ---------------------------------------------------------------------------

inline void write_ber_csv(std::ostream& os, const BerCurve& curve) {
    os << "snr_db,trials,bit_errors,ber,ci_low,ci_high\n";
    char buf[160];
    for (const BerPoint& p : curve.points) {
        std::snprintf(buf, sizeof buf, "%.10g,%llu,%llu,%.17g,%.17g,%.17g\n", p.snr_db,
                      static_cast<unsigned long long>(p.trials),
                      static_cast<unsigned long long>(p.bit_errors), p.ber, p.ci_low, p.ci_high);
        os << buf;
    }
}

inline void save_ber_csv(const std::string& path, const BerCurve& curve) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_ber_csv(os, curve);
}

// -- manifests ------------------------------------------------------------------------

// Flat key=value block; reloads through parse_config + spec_from_config.
inline void write_manifest(std::ostream& os, const ExperimentSpec& spec, const std::string& csv_path) {
    os << "name = " << spec.name << '\n';
    os << "detector = " << to_string(spec.detector.kind) << '\n';
    if (!spec.detector.bundle_path.empty()) os << "bundle = " << spec.detector.bundle_path << '\n';
    os << "scheme = " << to_string(spec.config.constellation.scheme) << '\n';
    os << "tx = " << spec.config.tx_antennas << '\n';
    os << "rx = " << spec.config.rx_antennas << '\n';
    os << "snr_db = ";
    char buf[40];
    for (std::size_t i = 0; i < spec.snr_grid_db.size(); ++i) {
        // full precision: replay must reconstruct the exact grid doubles
        std::snprintf(buf, sizeof buf, "%.17g", spec.snr_grid_db[i]);
        os << (i ? "," : "") << buf;
    }
    os << '\n';
    os << "min_bit_errors = " << spec.stop.min_bit_errors << '\n';
    os << "max_trials = " << spec.stop.max_trials << '\n';
    os << "seed = " << spec.seed << '\n';
    os << "transmissions_per_channel = " << spec.transmissions_per_channel << '\n';
    os << "channel_set_size = " << spec.channel_set.size << '\n';
    os << "channel_set_seed = " << spec.channel_set.seed << '\n';
    if (!csv_path.empty()) os << "output = " << csv_path << '\n';
}

inline void save_manifest(const std::string& path, const ExperimentSpec& spec,
                          const std::string& csv_path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_manifest(os, spec, csv_path);
}

// Builds a spec from one config section (or a manifest's global section).
inline ExperimentSpec spec_from_config(const ConfigSection& section,
                                       const ConfigSection* defaults = nullptr) {
    auto value = [&](const std::string& key) -> std::string {
        if (section.has(key)) return section.get(key);
        if (defaults && defaults->has(key)) return defaults->get(key);
        throw std::invalid_argument("config: missing key '" + key + "' for experiment '" +
                                    section.name + "'");
    };
    auto value_or = [&](const std::string& key, const std::string& fallback) -> std::string {
        if (section.has(key)) return section.get(key);
        if (defaults && defaults->has(key)) return defaults->get(key);
        return fallback;
    };

    ExperimentSpec spec;
    spec.name = section.name.empty() ? value_or("name", "experiment") : section.name;
    spec.detector.kind = parse_detector_kind(value("detector"));
    spec.detector.bundle_path = value_or("bundle", "");
    spec.config = make_mimo_config(std::stoi(value("tx")), std::stoi(value("rx")),
                                   parse_scheme(value("scheme")));
    spec.snr_grid_db = parse_snr_grid(value("snr_db"));
    spec.stop.min_bit_errors = std::stoull(value_or("min_bit_errors", "200"));
    spec.stop.max_trials = std::stoull(value_or("max_trials", "10000000"));
    spec.seed = std::stoull(value_or("seed", "1"));
    spec.transmissions_per_channel = std::stoi(value_or("transmissions_per_channel", "1"));
    spec.channel_set.size = std::stoull(value_or("channel_set_size", "0"));
    spec.channel_set.seed = std::stoull(value_or("channel_set_seed", "0"));
    return spec;
}

// -- sweeps ---------------------------------------------------------------------------

struct SweepEntry {
    std::string name;
    bool ok = false;
    std::string message;
    std::string csv_path;
    BerCurve curve;
};

// Runs every named section as one experiment; global keys are defaults.
// A failing entry is reported and does not disturb the others.
inline std::vector<SweepEntry> sweep(const Config& cfg, const std::string& out_dir) {
    if (cfg.sections.size() < 2) throw std::invalid_argument("sweep: no experiment sections");
    std::filesystem::create_directories(out_dir);
    std::vector<SweepEntry> entries;
    for (std::size_t i = 1; i < cfg.sections.size(); ++i) {
        const ConfigSection& section = cfg.sections[i];
        SweepEntry entry;
        entry.name = section.name;
        try {
            const ExperimentSpec spec = spec_from_config(section, &cfg.global());
            entry.curve = run_experiment(spec);
            entry.csv_path = (std::filesystem::path(out_dir) / (section.name + ".csv")).string();
            save_ber_csv(entry.csv_path, entry.curve);
            save_manifest(entry.csv_path + ".manifest", spec, entry.csv_path);
            entry.ok = true;
        } catch (const std::exception& e) {
            entry.ok = false;
            entry.message = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

// -- curve utilities --------------------------------------------------------------------

// SNR (dB) at which the curve crosses `target_ber`, interpolating linearly in
// (snr, log10 ber) between the first bracketing pair of grid points.
inline std::optional<double> snr_at_ber(const BerCurve& curve, double target_ber) {
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const BerPoint& a = curve.points[i];
        const BerPoint& b = curve.points[i + 1];
        if (a.ber <= 0.0 || b.ber <= 0.0) continue;
        const bool brackets = (a.ber >= target_ber && target_ber >= b.ber) ||
                              (b.ber >= target_ber && target_ber >= a.ber);
        if (!brackets) continue;
        const double la = std::log10(a.ber), lb = std::log10(b.ber), lt = std::log10(target_ber);
        if (la == lb) return a.snr_db;
        const double f = (lt - la) / (lb - la);
        return a.snr_db + f * (b.snr_db - a.snr_db);
    }
    return std::nullopt;
}

}  // namespace mimovq
