#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hwy/nn/checkpoint.hpp"

using namespace hwy;
using namespace hwy::nn;

namespace {

Network sample_net(HeadKind head, NoisyPlacement noisy) {
    NetworkSpec spec;
    spec.head = head;
    spec.noisy = noisy;
    Network net(spec, 42);
    if (net.has_noisy_layers()) {
        Rng rng(3);
        net.sample_noise(rng);
    }
    return net;
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitIdentical) {
    std::vector<double> x(22);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.1 * static_cast<double>(i) - 1.0;
    for (auto head : {HeadKind::plain, HeadKind::duelling}) {
        for (auto noisy : {NoisyPlacement::none, NoisyPlacement::final_two, NoisyPlacement::all}) {
            const auto net = sample_net(head, noisy);
            const auto bytes = checkpoint_bytes(net);
            const auto back = network_from_bytes(bytes);
            EXPECT_EQ(back.forward(x), net.forward(x));
            EXPECT_EQ(checkpoint_bytes(back), bytes);
            EXPECT_EQ(back.head(), head);
        }
    }
}

TEST(Checkpoint, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "hwy_ckpt_test.bin";
    const auto net = sample_net(HeadKind::duelling, NoisyPlacement::final_two);
    save_checkpoint(net, path);
    const auto back = load_checkpoint(path);
    EXPECT_EQ(checkpoint_bytes(back), checkpoint_bytes(net));
    std::filesystem::remove(path);
}

TEST(Checkpoint, NoiseSwitchSurvives) {
    auto net = sample_net(HeadKind::plain, NoisyPlacement::all);
    net.set_noise_enabled(false);
    const auto back = network_from_bytes(checkpoint_bytes(net));
    for (const auto& l : back.layers()) EXPECT_FALSE(l.noise_enabled);
}

TEST(Checkpoint, CorruptionDetected) {
    const auto bytes = checkpoint_bytes(sample_net(HeadKind::plain, NoisyPlacement::none));
    auto flipped = bytes;
    flipped[flipped.size() / 2] ^= 0x01;
    EXPECT_THROW(network_from_bytes(flipped), CheckpointError);
    auto truncated = bytes;
    truncated.resize(bytes.size() - 9);
    EXPECT_THROW(network_from_bytes(truncated), CheckpointError);
    auto magic = bytes;
    magic[0] = 'X';
    EXPECT_THROW(network_from_bytes(magic), CheckpointError);
    EXPECT_THROW(load_checkpoint("/nonexistent/dir/net.ckpt"), IoError);
}
