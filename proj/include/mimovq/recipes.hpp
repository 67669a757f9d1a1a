#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ber.hpp"

// Canned experiment recipes behind `reproduce fig<n>`.  Each recipe keeps the
// structure of one published comparison (detector lineup, training point,
// fading model) but shrinks antennas, network widths, iteration counts and
// trial budgets to desk scale, so a full run finishes in minutes on one core.
// Every curve lands as CSV + manifest; ANN bundles and loss traces sit next to
// them, and the manifest alone is enough to replay any curve bit for bit.

namespace mimovq {

struct RecipeReport {
    std::string fig;
    std::vector<SweepEntry> entries;
    std::vector<std::string> artifacts;  // bundles, loss traces, notes
};

namespace detail {

// Stable name -> tag fold (FNV-1a), so recipe training seeds do not depend on
// the standard library's std::hash.
inline std::uint64_t name_tag(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct RecipeContext {
    std::string fig;
    std::filesystem::path out_dir;
    std::uint64_t seed = 1;
    RecipeReport report;

    std::string path_of(const std::string& file) const { return (out_dir / file).string(); }

    void note(const std::string& text) {
        const std::string p = path_of(fig + "_notes.txt");
        std::ofstream os(p, std::ios::app);
        os << text << '\n';
        if (!has_artifact(p)) report.artifacts.push_back(p);
    }

    bool has_artifact(const std::string& p) const {
        for (const std::string& a : report.artifacts)
            if (a == p) return true;
        return false;
    }

    void save_loss_trace(const std::string& name, const std::vector<double>& trace) {
        const std::string p = path_of(name + "_loss.csv");
        std::ofstream os(p);
        if (!os) throw std::runtime_error("cannot open for writing: " + p);
        os << "iteration,loss\n";
        char buf[48];
        for (std::size_t i = 0; i < trace.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, trace[i]);
            os << buf;
        }
        report.artifacts.push_back(p);
    }

    // Trains a VQ detector, saves bundle + loss trace, returns the bundle path.
    std::string train_vq(const std::string& name, const MimoConfig& config, MappingKind mapping,
                         FrontEnd front_end, double train_db, int iterations, int batch,
                         const std::vector<int>& widths,
                         const std::vector<ChannelRealization>* channel_set = nullptr) {
        TrainingConfig training;
        training.iterations = iterations;
        training.batch_size = batch;
        training.seed = derive_seed(seed, 0x726563697065ull, name_tag(name));
        TrainedDetector trained = train_vq_detector(config, mapping, front_end, train_db, training,
                                                    widths, channel_set);
        const std::string p = path_of(name + ".bundle");
        save_detector_file(p, trained.detector);
        report.artifacts.push_back(p);
        save_loss_trace(name, trained.loss_trace);
        return p;
    }

    std::string train_mnnet_bundle(const std::string& name, const MimoConfig& config,
                                   double train_db, int iterations, int batch,
                                   const std::vector<int>& widths) {
        TrainingConfig training;
        training.iterations = iterations;
        training.batch_size = batch;
        training.seed = derive_seed(seed, 0x726563697065ull, name_tag(name));
        TrainedMnnet trained = train_mnnet(config, train_db, training, widths);
        const std::string p = path_of(name + ".bundle");
        save_mnnet_file(p, trained.graph);
        report.artifacts.push_back(p);
        for (std::size_t m = 0; m < trained.layer_loss_traces.size(); ++m)
            save_loss_trace(name + "_layer" + std::to_string(m + 1), trained.layer_loss_traces[m]);
        return p;
    }

    void run(ExperimentSpec spec) {
        spec.seed = derive_seed(seed, 0x737765657045ull);  // one stream for the whole figure:
        SweepEntry entry;                                  // same trials for every detector
        entry.name = spec.name;
        try {
            entry.curve = run_experiment(spec);
            entry.csv_path = path_of(spec.name + ".csv");
            save_ber_csv(entry.csv_path, entry.curve);
            save_manifest(entry.csv_path + ".manifest", spec, entry.csv_path);
            entry.ok = true;
        } catch (const std::exception& e) {
            entry.ok = false;
            entry.message = e.what();
        }
        report.entries.push_back(std::move(entry));
    }
};

inline ExperimentSpec base_spec(const std::string& name, const MimoConfig& config,
                                double snr_stop_db, std::uint64_t max_trials) {
    ExperimentSpec spec;
    spec.name = name;
    spec.config = config;
    for (double db = 0.0; db <= snr_stop_db + 1e-9; db += 2.0) spec.snr_grid_db.push_back(db);
    spec.stop.min_bit_errors = 100;
    spec.stop.max_trials = max_trials;
    return spec;
}

// fig4 shape: one-hot vs cluster-level one-hot vs cluster-level bits, fresh
// channels, NN trained at 5 dB, exhaustive search as the reference curve.
inline void recipe_fig4(RecipeContext& ctx) {
    const MimoConfig config = make_mimo_config(2, 4, Scheme::QPSK);
    ctx.note("fig4: codebook mapping comparison, desk-scaled to 2x4 QPSK, fresh channels.");
    const std::vector<int> widths{96, 48};
    struct Row {
        const char* name;
        MappingKind mapping;
    } rows[] = {{"fig4_vq_onehot", MappingKind::OneHot},
                {"fig4_vq_cluster_onehot", MappingKind::ClusterOneHot},
                {"fig4_vq_cluster_bits", MappingKind::ClusterBits}};
    for (const Row& row : rows) {
        const std::string bundle =
            ctx.train_vq(row.name, config, row.mapping, FrontEnd::None, 5.0, 3000, 128, widths);
        ExperimentSpec spec = base_spec(row.name, config, 12.0, 200'000);
        spec.detector = {DetectorKind::VQ, bundle};
        ctx.run(spec);
    }
    ExperimentSpec mlsd = base_spec("fig4_mlsd", config, 12.0, 200'000);
    mlsd.detector = {DetectorKind::MLSD, ""};
    ctx.run(mlsd);
}

// fig5 shape: fixed channel-realization sets of growing size against fresh
// fading, one-hot mapping trained at 8 dB, exhaustive search reference.
inline void recipe_fig5(RecipeContext& ctx) {
    const MimoConfig config = make_mimo_config(2, 2, Scheme::QPSK);
    ctx.note("fig5: channel-set size study, desk-scaled to 2x2 QPSK; set sizes 16/64/fresh.");
    const std::vector<int> widths{64, 32};
    for (std::uint64_t size : {std::uint64_t{16}, std::uint64_t{64}, std::uint64_t{0}}) {
        const std::string tag = size ? "set" + std::to_string(size) : "fresh";
        const std::string name = "fig5_vq_" + tag;
        FixedChannelSet cs{size, derive_seed(ctx.seed, 0x666978736574ull, size)};
        const std::vector<ChannelRealization> set = materialize_channel_set(cs, config);
        const std::string bundle =
            ctx.train_vq(name, config, MappingKind::OneHot, FrontEnd::None, 8.0, 3000, 128, widths,
                         set.empty() ? nullptr : &set);
        ExperimentSpec spec = base_spec(name, config, 12.0, 200'000);
        spec.detector = {DetectorKind::VQ, bundle};
        spec.channel_set = cs;
        ctx.run(spec);
    }
    ExperimentSpec mlsd = base_spec("fig5_mlsd", config, 12.0, 200'000);
    mlsd.detector = {DetectorKind::MLSD, ""};
    ctx.run(mlsd);
}

// fig6 shape: equalizer front ends with and without the ANN de-mapper, slow
// fading (channel held for three transmissions), training at 10 dB.
inline void recipe_fig6(RecipeContext& ctx) {
    const MimoConfig config = make_mimo_config(2, 4, Scheme::BPSK);
    ctx.note("fig6: channel-equalized detectors, desk-scaled to 2x4 BPSK, slow fading x3.");
    const std::vector<int> widths{32, 16};
    struct Row {
        const char* name;
        FrontEnd fe;
        DetectorKind raw;
    } rows[] = {{"fig6_mf", FrontEnd::MF, DetectorKind::MF},
                {"fig6_zf", FrontEnd::ZF, DetectorKind::ZF},
                {"fig6_lmmse", FrontEnd::LMMSE, DetectorKind::LMMSE}};
    for (const Row& row : rows) {
        ExperimentSpec raw = base_spec(row.name, config, 12.0, 200'000);
        raw.detector = {row.raw, ""};
        raw.transmissions_per_channel = 3;
        ctx.run(raw);

        const std::string vq_name = std::string(row.name) + "_vq";
        const std::string bundle =
            ctx.train_vq(vq_name, config, MappingKind::OneHot, row.fe, 10.0, 2000, 128, widths);
        ExperimentSpec vq = base_spec(vq_name, config, 12.0, 200'000);
        vq.detector = {DetectorKind::VQ, bundle};
        vq.transmissions_per_channel = 3;
        ctx.run(vq);
    }
    ExperimentSpec mlsd = base_spec("fig6_mlsd", config, 12.0, 200'000);
    mlsd.detector = {DetectorKind::MLSD, ""};
    mlsd.transmissions_per_channel = 3;
    ctx.run(mlsd);
}

// fig7 shape: matched-filter front end against the ANN-assisted matched
// filter across modulations, slow fading x3, training at 10 dB.
inline void recipe_fig7(RecipeContext& ctx) {
    ctx.note("fig7: MF vs ANN-assisted MF, desk-scaled to 2x8, BPSK and QPSK.");
    const std::vector<int> widths{32, 16};
    for (Scheme scheme : {Scheme::BPSK, Scheme::QPSK}) {
        const MimoConfig config = make_mimo_config(2, 8, scheme);
        const std::string tag = to_string(scheme);
        ExperimentSpec raw = base_spec("fig7_mf_" + tag, config, 10.0, 200'000);
        raw.detector = {DetectorKind::MF, ""};
        raw.transmissions_per_channel = 3;
        ctx.run(raw);

        const std::string name = "fig7_mf_vq_" + tag;
        const std::string bundle =
            ctx.train_vq(name, config, MappingKind::OneHot, FrontEnd::MF, 10.0, 2000, 128, widths);
        ExperimentSpec vq = base_spec(name, config, 10.0, 200'000);
        vq.detector = {DetectorKind::VQ, bundle};
        vq.transmissions_per_channel = 3;
        ctx.run(vq);
    }
}

// fig8 shape: one-hot detector across modulation orders against exhaustive
// search; low-order schemes train at 5 dB, high-order at 8 dB.
inline void recipe_fig8(RecipeContext& ctx) {
    ctx.note("fig8: modulation-scheme sweep on 2x8, VQ vs exhaustive search.");
    for (Scheme scheme : {Scheme::BPSK, Scheme::QPSK, Scheme::PSK8, Scheme::QAM16}) {
        const MimoConfig config = make_mimo_config(2, 8, scheme);
        const std::string tag = to_string(scheme);
        const bool high_order = scheme == Scheme::PSK8 || scheme == Scheme::QAM16;
        const double train_db = high_order ? 8.0 : 5.0;
        const std::vector<int> widths = high_order ? std::vector<int>{128, 64}
                                                   : std::vector<int>{64, 32};
        const std::string name = "fig8_vq_" + tag;
        const std::string bundle = ctx.train_vq(name, config, MappingKind::OneHot, FrontEnd::None,
                                                train_db, high_order ? 4000 : 3000, 128, widths);
        ExperimentSpec vq = base_spec(name, config, 14.0, 100'000);
        vq.detector = {DetectorKind::VQ, bundle};
        ctx.run(vq);

        ExperimentSpec mlsd = base_spec("fig8_mlsd_" + tag, config, 14.0, 100'000);
        mlsd.detector = {DetectorKind::MLSD, ""};
        ctx.run(mlsd);
    }
}

// fig9..fig11 share one lineup: linear baseline, flat VQ, modular network,
// exhaustive search.  They differ in loading (under / critical / over).
inline void recipe_mnnet_lineup(RecipeContext& ctx, const std::string& fig, int tx, int rx,
                                double snr_stop_db) {
    for (Scheme scheme : {Scheme::BPSK, Scheme::QPSK}) {
        const MimoConfig config = make_mimo_config(tx, rx, scheme);
        const std::string tag = to_string(scheme);
        const std::vector<int> widths =
            scheme == Scheme::QPSK ? std::vector<int>{96, 48} : std::vector<int>{64, 32};
        const int layer_iterations = 1500;

        // Linear baseline: pseudo-inverse when it exists, matched filter in
        // the overloaded case where the Gram matrix is singular.
        const bool overloaded = tx > rx;
        ExperimentSpec lin = base_spec(fig + (overloaded ? "_mf_" : "_zf_") + tag, config,
                                       snr_stop_db, 100'000);
        lin.detector = {overloaded ? DetectorKind::MF : DetectorKind::ZF, ""};
        ctx.run(lin);

        // Flat VQ gets the same total iteration budget the modular network
        // spends across its layers.
        const std::string vq_name = fig + "_vq_" + tag;
        const std::string vq_bundle =
            ctx.train_vq(vq_name, config, MappingKind::OneHot, FrontEnd::None, 5.0,
                         layer_iterations * tx, 128, widths);
        ExperimentSpec vq = base_spec(vq_name, config, snr_stop_db, 100'000);
        vq.detector = {DetectorKind::VQ, vq_bundle};
        ctx.run(vq);

        const std::string mn_name = fig + "_mnnet_" + tag;
        const std::string mn_bundle =
            ctx.train_mnnet_bundle(mn_name, config, 5.0, layer_iterations, 128, widths);
        ExperimentSpec mn = base_spec(mn_name, config, snr_stop_db, 100'000);
        mn.detector = {DetectorKind::MNNET, mn_bundle};
        ctx.run(mn);

        ExperimentSpec mlsd = base_spec(fig + "_mlsd_" + tag, config, snr_stop_db, 100'000);
        mlsd.detector = {DetectorKind::MLSD, ""};
        ctx.run(mlsd);
    }
}

inline void recipe_fig9(RecipeContext& ctx) {
    ctx.note("fig9: underloaded lineup, desk-scaled to 4x8, BPSK and QPSK.");
    recipe_mnnet_lineup(ctx, "fig9", 4, 8, 10.0);
}

inline void recipe_fig10(RecipeContext& ctx) {
    ctx.note("fig10: critically loaded lineup, desk-scaled to 4x4, BPSK and QPSK.");
    recipe_mnnet_lineup(ctx, "fig10", 4, 4, 12.0);
}

inline void recipe_fig11(RecipeContext& ctx) {
    ctx.note("fig11: overloaded lineup, desk-scaled to 4x2, BPSK and QPSK.");
    recipe_mnnet_lineup(ctx, "fig11", 4, 2, 14.0);
}

}  // namespace detail

inline std::vector<std::string> recipe_names() {
    return {"fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11"};
}

inline RecipeReport run_recipe(const std::string& fig, const std::string& out_dir,
                               std::uint64_t seed = 1) {
    std::filesystem::create_directories(out_dir);
    detail::RecipeContext ctx;
    ctx.fig = fig;
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    ctx.report.fig = fig;
    if (fig == "fig4")
        detail::recipe_fig4(ctx);
    else if (fig == "fig5")
        detail::recipe_fig5(ctx);
    else if (fig == "fig6")
        detail::recipe_fig6(ctx);
    else if (fig == "fig7")
        detail::recipe_fig7(ctx);
    else if (fig == "fig8")
        detail::recipe_fig8(ctx);
    else if (fig == "fig9")
        detail::recipe_fig9(ctx);
    else if (fig == "fig10")
        detail::recipe_fig10(ctx);
    else if (fig == "fig11")
        detail::recipe_fig11(ctx);
    else
        throw std::invalid_argument("unknown recipe '" + fig + "' (expected fig4..fig11)");
    return ctx.report;
}

}  // namespace mimovq
