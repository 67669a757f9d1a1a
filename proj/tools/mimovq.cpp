// Command-line front end: train detector bundles, run Monte Carlo BER
// experiments, batch sweeps, analysis reports, and canned figure recipes.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <mimovq/mimovq.hpp>

namespace {

void print_curve(std::ostream& os, const mimovq::BerCurve& curve) {
    mimovq::write_ber_csv(os, curve);
}

int run_train(const std::string& scheme_name, int tx, int rx, const std::string& mapping_name,
              const std::string& front_end_name, bool mnnet, double train_snr_db, int iterations,
              int batch, std::uint64_t seed, const std::string& widths_text,
              std::uint64_t channel_set_size, std::uint64_t channel_set_seed,
              int fine_tune_iterations, const std::string& out_path,
              const std::string& loss_trace_path, const std::string& dataset_path,
              int dataset_count) {
    using namespace mimovq;
    const Scheme scheme = parse_scheme(scheme_name);
    const MimoConfig config = make_mimo_config(tx, rx, scheme);
    const double train_db = std::isnan(train_snr_db) ? default_training_snr_db(scheme) : train_snr_db;
    const std::vector<int> widths = widths_text.empty() ? std::vector<int>{} : parse_width_list(widths_text);

    TrainingConfig training;
    training.iterations = iterations;
    training.batch_size = batch;
    training.seed = seed;

    FixedChannelSet cs{channel_set_size, channel_set_seed};
    const std::vector<ChannelRealization> set = materialize_channel_set(cs, config);
    const std::vector<ChannelRealization>* set_ptr = set.empty() ? nullptr : &set;

    if (!dataset_path.empty()) {
        const CodebookMapping mapping = make_mapping(parse_mapping(mapping_name), tx, config.constellation);
        const NoiseModel noise = calibrate_noise(train_db, config);
        Rng rng(derive_seed(seed, 0x64617461ull));
        const std::vector<TrainingSample> samples =
            generate_dataset(rng, config, noise, mapping, static_cast<std::size_t>(dataset_count), set_ptr);
        std::ofstream os(dataset_path);
        if (!os) throw std::runtime_error("cannot open for writing: " + dataset_path);
        export_dataset(os, samples);
        std::printf("wrote %s (%d samples)\n", dataset_path.c_str(), dataset_count);
    }
    if (out_path.empty()) return 0;

    std::vector<double> trace;
    if (mnnet) {
        TrainedMnnet trained = train_mnnet(config, train_db, training, widths, fine_tune_iterations);
        save_mnnet_file(out_path, trained.graph);
        for (const std::vector<double>& layer : trained.layer_loss_traces)
            trace.insert(trace.end(), layer.begin(), layer.end());
        std::printf("wrote %s (modular graph, %d super-layers, training snr %.6g dB)\n",
                    out_path.c_str(), tx, train_db);
    } else {
        TrainedDetector trained = train_vq_detector(config, parse_mapping(mapping_name),
                                                    parse_front_end(front_end_name), train_db,
                                                    training, widths, set_ptr);
        save_detector_file(out_path, trained.detector);
        trace = trained.loss_trace;
        std::printf("wrote %s (mapping %s, front end %s, training snr %.6g dB)\n", out_path.c_str(),
                    to_string(trained.detector.mapping.kind).c_str(),
                    to_string(trained.detector.front_end).c_str(), train_db);
    }
    if (!trace.empty()) std::printf("final loss %.6g over %zu iterations\n", trace.back(), trace.size());
    if (!loss_trace_path.empty()) {
        std::ofstream os(loss_trace_path);
        if (!os) throw std::runtime_error("cannot open for writing: " + loss_trace_path);
        os << "iteration,loss\n";
        char buf[48];
        for (std::size_t i = 0; i < trace.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, trace[i]);
            os << buf;
        }
        std::printf("wrote %s\n", loss_trace_path.c_str());
    }
    return 0;
}

int run_ber(const mimovq::ExperimentSpec& spec, std::string out_path) {
    using namespace mimovq;
    const BerCurve curve = run_experiment(spec);
    if (out_path.empty()) {
        print_curve(std::cout, curve);
        return 0;
    }
    save_ber_csv(out_path, curve);
    save_manifest(out_path + ".manifest", spec, out_path);
    std::printf("wrote %s and %s.manifest\n", out_path.c_str(), out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mimovq;

    CLI::App app{"MIMO vector-quantization detection laboratory"};
    app.require_subcommand(1);

    // ---- train ----------------------------------------------------------------
    auto* train = app.add_subcommand("train", "train a detector bundle (or export a dataset)");
    std::string t_scheme = "qpsk", t_mapping = "one-hot", t_front = "none";
    int t_tx = 2, t_rx = 4, t_iter = 1000, t_batch = 500, t_fine_tune = 0, t_ds_count = 1000;
    bool t_mnnet = false;
    double t_snr = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t t_seed = 1, t_cs_size = 0, t_cs_seed = 0;
    std::string t_widths, t_out, t_loss, t_dataset;
    train->add_option("--scheme", t_scheme, "bpsk|qpsk|8psk|16qam")->capture_default_str();
    train->add_option("--tx", t_tx, "transmit antennas")->capture_default_str();
    train->add_option("--rx", t_rx, "receive antennas")->capture_default_str();
    train->add_option("--mapping", t_mapping, "one-hot|cluster-one-hot|cluster-bits")->capture_default_str();
    train->add_option("--front-end", t_front, "none|mf|zf|lmmse")->capture_default_str();
    train->add_flag("--mnnet", t_mnnet, "train the modular network instead of a flat detector");
    train->add_option("--train-snr-db", t_snr, "training Eb/N0 in dB (default: per-scheme convention)");
    train->add_option("--iterations", t_iter, "training iterations")->capture_default_str();
    train->add_option("--batch", t_batch, "mini-batch size")->capture_default_str();
    train->add_option("--seed", t_seed, "training seed")->capture_default_str();
    train->add_option("--widths", t_widths, "hidden widths, e.g. 64,32 (default 1024,512,256)");
    train->add_option("--channel-set-size", t_cs_size, "fixed channel set size (0 = fresh fading)")
        ->capture_default_str();
    train->add_option("--channel-set-seed", t_cs_seed, "fixed channel set seed")->capture_default_str();
    train->add_option("--fine-tune-iterations", t_fine_tune, "modular network fine-tune iterations")
        ->capture_default_str();
    train->add_option("--out", t_out, "bundle output path");
    train->add_option("--loss-trace", t_loss, "write the loss trace CSV here");
    train->add_option("--export-dataset", t_dataset, "write a labelled dataset here instead of/besides training");
    train->add_option("--dataset-count", t_ds_count, "samples for --export-dataset")->capture_default_str();

    // ---- ber ------------------------------------------------------------------
    auto* ber = app.add_subcommand("ber", "run one Monte Carlo BER experiment");
    std::string b_config, b_name = "experiment", b_detector = "zf", b_bundle, b_scheme = "qpsk";
    std::string b_snr = "0:2:10", b_out;
    int b_tx = 2, b_rx = 4, b_tpc = 1;
    std::uint64_t b_min_err = 200, b_max_trials = 10'000'000, b_seed = 1, b_cs_size = 0, b_cs_seed = 0;
    ber->add_option("--config", b_config, "replay an experiment manifest");
    ber->add_option("--name", b_name, "experiment name")->capture_default_str();
    ber->add_option("--detector", b_detector, "mf|zf|lmmse|mlsd|vq|mnnet")->capture_default_str();
    ber->add_option("--bundle", b_bundle, "detector bundle (vq/mnnet)");
    ber->add_option("--scheme", b_scheme, "bpsk|qpsk|8psk|16qam")->capture_default_str();
    ber->add_option("--tx", b_tx, "transmit antennas")->capture_default_str();
    ber->add_option("--rx", b_rx, "receive antennas")->capture_default_str();
    ber->add_option("--snr", b_snr, "grid: start:step:stop or comma list (dB)")->capture_default_str();
    ber->add_option("--min-errors", b_min_err, "stop a point after this many bit errors")
        ->capture_default_str();
    ber->add_option("--max-trials", b_max_trials, "trial cap per point")->capture_default_str();
    ber->add_option("--seed", b_seed, "experiment seed")->capture_default_str();
    ber->add_option("--transmissions-per-channel", b_tpc, "transmissions per channel draw")
        ->capture_default_str();
    ber->add_option("--channel-set-size", b_cs_size, "fixed channel set size (0 = fresh fading)")
        ->capture_default_str();
    ber->add_option("--channel-set-seed", b_cs_seed, "fixed channel set seed")->capture_default_str();
    ber->add_option("--out", b_out, "CSV output path (default: stdout); manifest lands beside it");

    // ---- sweep ----------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "run every experiment section of a config file");
    std::string s_config, s_out_dir = "results";
    sweep_cmd->add_option("--config", s_config, "config file with one section per experiment")->required();
    sweep_cmd->add_option("--out-dir", s_out_dir, "output directory")->capture_default_str();

    // ---- analyze ---------------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "compression / complexity / quantization reports");
    analyze->require_subcommand(1);

    auto* comp = analyze->add_subcommand("compression", "codebook compression-rate bounds");
    std::string c_tx = "1,2,4,8";
    int c_order = 4;
    double c_sigma = 1.0;
    std::string c_out;
    comp->add_option("--tx", c_tx, "transmit antenna counts, comma list")->capture_default_str();
    comp->add_option("--order", c_order, "constellation order L")->capture_default_str();
    comp->add_option("--sigma-h-sq", c_sigma, "per-coefficient channel variance")->capture_default_str();
    comp->add_option("--out", c_out, "CSV output path (default: stdout)");

    auto* cplx = analyze->add_subcommand("complexity", "instrumented operation counts");
    std::string x_scheme = "qpsk", x_detectors = "mf,zf,lmmse,mlsd,vq,mnnet", x_widths = "64,32", x_out;
    int x_tx = 2, x_rx = 4, x_batch = 100;
    double x_snr = 10.0;
    std::uint64_t x_seed = 11;
    cplx->add_option("--scheme", x_scheme, "bpsk|qpsk|8psk|16qam")->capture_default_str();
    cplx->add_option("--tx", x_tx, "transmit antennas")->capture_default_str();
    cplx->add_option("--rx", x_rx, "receive antennas")->capture_default_str();
    cplx->add_option("--detectors", x_detectors, "comma list of detector kinds")->capture_default_str();
    cplx->add_option("--widths", x_widths, "ANN hidden widths")->capture_default_str();
    cplx->add_option("--batch", x_batch, "training batch for per-iteration cost")->capture_default_str();
    cplx->add_option("--snr-db", x_snr, "operating Eb/N0")->capture_default_str();
    cplx->add_option("--seed", x_seed, "instrumentation seed")->capture_default_str();
    cplx->add_option("--out", x_out, "CSV output path (default: stdout)");

    auto* quant = analyze->add_subcommand("quantization", "empirical quantization loss of a bundle");
    std::string q_bundle, q_space = "input";
    int q_trials = 10000;
    double q_snr = 8.0;
    std::uint64_t q_seed = 1, q_cs_size = 0, q_cs_seed = 0;
    quant->add_option("--bundle", q_bundle, "one-hot detector bundle")->required();
    quant->add_option("--trials", q_trials, "Monte Carlo trials")->capture_default_str();
    quant->add_option("--snr-db", q_snr, "operating Eb/N0")->capture_default_str();
    quant->add_option("--seed", q_seed, "sampling seed")->capture_default_str();
    quant->add_option("--space", q_space, "input|hidden anchor space")->capture_default_str();
    quant->add_option("--channel-set-size", q_cs_size, "fixed channel set size")->capture_default_str();
    quant->add_option("--channel-set-seed", q_cs_seed, "fixed channel set seed")->capture_default_str();

    // ---- reproduce -------------------------------------------------------------
    auto* repro = app.add_subcommand("reproduce", "run a canned figure recipe (fig4..fig11)");
    std::string r_fig, r_out_dir;
    std::uint64_t r_seed = 1;
    repro->add_option("fig", r_fig, "fig4|fig5|fig6|fig7|fig8|fig9|fig10|fig11")->required();
    repro->add_option("--out-dir", r_out_dir, "output directory (default results/<fig>)");
    repro->add_option("--seed", r_seed, "recipe seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (train->parsed()) {
            if (t_out.empty() && t_dataset.empty())
                throw std::invalid_argument("train: give --out and/or --export-dataset");
            return run_train(t_scheme, t_tx, t_rx, t_mapping, t_front, t_mnnet, t_snr, t_iter,
                             t_batch, t_seed, t_widths, t_cs_size, t_cs_seed, t_fine_tune, t_out,
                             t_loss, t_dataset, t_ds_count);
        }
        if (ber->parsed()) {
            ExperimentSpec spec;
            if (!b_config.empty()) {
                const Config cfg = parse_config_file(b_config);
                spec = spec_from_config(cfg.global());
                if (b_out.empty() && cfg.global().has("output")) b_out = cfg.global().get("output");
            } else {
                spec.name = b_name;
                spec.detector = {parse_detector_kind(b_detector), b_bundle};
                spec.config = make_mimo_config(b_tx, b_rx, parse_scheme(b_scheme));
                spec.snr_grid_db = parse_snr_grid(b_snr);
                spec.stop = {b_min_err, b_max_trials};
                spec.seed = b_seed;
                spec.transmissions_per_channel = b_tpc;
                spec.channel_set = {b_cs_size, b_cs_seed};
            }
            return run_ber(spec, b_out);
        }
        if (sweep_cmd->parsed()) {
            const Config cfg = parse_config_file(s_config);
            const std::vector<SweepEntry> entries = sweep(cfg, s_out_dir);
            bool all_ok = true;
            for (const SweepEntry& e : entries) {
                if (e.ok)
                    std::printf("%s: ok -> %s\n", e.name.c_str(), e.csv_path.c_str());
                else
                    std::printf("%s: FAILED (%s)\n", e.name.c_str(), e.message.c_str());
                all_ok = all_ok && e.ok;
            }
            return all_ok ? 0 : 1;
        }
        if (comp->parsed()) {
            std::ostringstream os;
            os << "tx,order,sigma_h_sq,rate_bound,rate_bound_energy\n";
            char buf[160];
            for (int tx : parse_width_list(c_tx)) {
                const CompressionReport r = compression_bound(tx, c_order, c_sigma);
                std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", r.tx_antennas, r.order,
                              r.sigma_h_sq, r.rate_bound, r.rate_bound_energy);
                os << buf;
            }
            if (c_out.empty()) {
                std::cout << os.str();
            } else {
                std::ofstream f(c_out);
                if (!f) throw std::runtime_error("cannot open for writing: " + c_out);
                f << os.str();
                std::printf("wrote %s\n", c_out.c_str());
            }
            return 0;
        }
        if (cplx->parsed()) {
            const MimoConfig config = make_mimo_config(x_tx, x_rx, parse_scheme(x_scheme));
            ComplexityOptions options;
            options.hidden_widths = parse_width_list(x_widths);
            options.train_batch = x_batch;
            options.eb_n0_db = x_snr;
            options.seed = x_seed;
            std::ostringstream os;
            os << "detector,detect_macs,solve_dim,train_iteration_macs,train_batch\n";
            char buf[200];
            std::stringstream names(x_detectors);
            std::string name;
            while (std::getline(names, name, ',')) {
                const ComplexityReport r = count_operations(parse_detector_kind(name), config, options);
                std::snprintf(buf, sizeof buf, "%s,%llu,%d,%llu,%d\n", r.detector.c_str(),
                              static_cast<unsigned long long>(r.detect_macs), r.solve_dim,
                              static_cast<unsigned long long>(r.train_iteration_macs), r.train_batch);
                os << buf;
            }
            if (x_out.empty()) {
                std::cout << os.str();
            } else {
                std::ofstream f(x_out);
                if (!f) throw std::runtime_error("cannot open for writing: " + x_out);
                f << os.str();
                std::printf("wrote %s\n", x_out.c_str());
            }
            return 0;
        }
        if (quant->parsed()) {
            const VqDetector det = load_detector_file(q_bundle);
            const NoiseModel noise = calibrate_noise(q_snr, det.config);
            FixedChannelSet cs{q_cs_size, q_cs_seed};
            const std::vector<ChannelRealization> set = materialize_channel_set(cs, det.config);
            Rng rng(derive_seed(q_seed, 0x7175616e74ull));
            const AnchorSpace space = q_space == "hidden" ? AnchorSpace::Hidden : AnchorSpace::Input;
            const QuantizationLossReport report = empirical_quantization_loss(
                det, static_cast<std::size_t>(q_trials), noise, rng, space,
                set.empty() ? nullptr : &set);
            std::printf("space %s, %d trials, mean quantization loss %.17g\n",
                        space == AnchorSpace::Hidden ? "hidden" : "input", q_trials, report.mean_loss);
            if (!report.samples.empty()) {
                double signal = 0.0, csi = 0.0;
                for (const LossDecomposition& d : report.samples) {
                    signal += d.signal_part;
                    csi += d.csi_part;
                }
                const double n = static_cast<double>(report.samples.size());
                std::printf("  signal part %.17g, csi part %.17g\n", signal / n, csi / n);
            }
            return 0;
        }
        if (repro->parsed()) {
            const std::string out_dir = r_out_dir.empty() ? "results/" + r_fig : r_out_dir;
            const RecipeReport report = run_recipe(r_fig, out_dir, r_seed);
            bool all_ok = true;
            for (const SweepEntry& e : report.entries) {
                if (e.ok)
                    std::printf("%s: ok -> %s\n", e.name.c_str(), e.csv_path.c_str());
                else
                    std::printf("%s: FAILED (%s)\n", e.name.c_str(), e.message.c_str());
                all_ok = all_ok && e.ok;
            }
            for (const std::string& a : report.artifacts) std::printf("artifact: %s\n", a.c_str());
            return all_ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
