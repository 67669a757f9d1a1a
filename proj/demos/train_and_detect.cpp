// Trains a small one-hot detector on a fixed set of 2x2 BPSK channels, then
// compares its decisions against exhaustive search on fresh noisy receptions.

#include <cstdio>

#include <mimovq/mimovq.hpp>

int main() {
    using namespace mimovq;

    const MimoConfig config = make_mimo_config(2, 2, Scheme::BPSK);

    // channel set of size J = 4, matching the codebook
    Rng set_rng(derive_seed(99, 0x64656d6full));
    const std::vector<ChannelRealization> channels = draw_channel_set(set_rng, config, 4);

    TrainingConfig training;
    training.iterations = 1500;
    training.batch_size = 64;
    training.seed = 5;
    const TrainedDetector trained = train_vq_detector(config, MappingKind::OneHot, FrontEnd::None,
                                                      8.0, training, {32, 16}, &channels);
    std::printf("trained: final loss %.4f\n", trained.loss_trace.back());

    const NoiseModel noise = calibrate_noise(8.0, config);
    Rng rng(derive_seed(99, 0x74657374ull));
    int agree = 0;
    const int trials = 2000;
    for (int i = 0; i < trials; ++i) {
        const ChannelRealization& ch = channels[rng.uniform_int(channels.size())];
        const Transmission t = transmit(rng, config, ch, noise);
        const std::vector<int> ann = vq_detect(trained.detector, ch, t.y);
        const std::vector<int> opt = mlsd_detect(config, ch.h, t.y).indices;
        if (ann == opt) ++agree;
    }
    std::printf("agreement with exhaustive search: %.1f%% over %d trials\n",
                100.0 * agree / trials, trials);
    return 0;
}
