// Smallest useful run: sweep two classical detectors over a short SNR grid on
// a 2x2 QPSK link and print both curves as CSV.

#include <cstdio>

#include <mimovq/mimovq.hpp>

int main() {
    using namespace mimovq;

    ExperimentSpec spec;
    spec.config = make_mimo_config(2, 2, Scheme::QPSK);
    spec.snr_grid_db = {0.0, 4.0, 8.0, 12.0};
    spec.stop.min_bit_errors = 100;
    spec.stop.max_trials = 50'000;
    spec.seed = 7;

    for (DetectorKind kind : {DetectorKind::ZF, DetectorKind::MLSD}) {
        spec.name = to_string(kind);
        spec.detector.kind = kind;
        const BerCurve curve = run_experiment(spec);
        std::printf("# %s\n", spec.name.c_str());
        write_ber_csv(std::cout, curve);
    }
    return 0;
}
