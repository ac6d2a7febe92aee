#include "sleepsched/stochastic.hpp"

namespace sleepsched {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamLabel label, int node_id) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ static_cast<std::uint64_t>(label));
    k = splitmix64(k ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(node_id)));
    key_ = k;
}

std::uint64_t RngStream::bits(std::uint64_t slot, std::uint32_t draw) const {
    std::uint64_t x = splitmix64(key_ ^ splitmix64(slot));
    return splitmix64(x + static_cast<std::uint64_t>(draw) * 0xd1342543de82ef95ULL);
}

double RngStream::uniform(std::uint64_t slot, std::uint32_t draw) const {
    return static_cast<double>(bits(slot, draw) >> 11) * 0x1.0p-53;
}

ChannelDraw sample_channel(const ChannelModel& model, const RngStream& rng, std::uint64_t slot) {
    const double u = rng.uniform(slot);
    double acc = 0.0;
    int chosen = -1;
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        const double p = model.states[i].probability;
        if (p <= 0.0) continue;
        chosen = static_cast<int>(i);
        acc += p;
        if (u < acc) break;
    }
    if (chosen < 0) chosen = 0;
    return {chosen, model.states[static_cast<std::size_t>(chosen)].rate};
}

int sample_arrival(const ArrivalModel& model, const RngStream& rng, std::uint64_t slot) {
    const double u = rng.uniform(slot);
    double acc = 0.0;
    int packets = 0;
    for (const auto& o : model.distribution) {
        if (o.probability <= 0.0) continue;
        packets = o.packets;
        acc += o.probability;
        if (u < acc) break;
    }
    return packets;
}

std::vector<ChannelDraw> sample_channels(const SimConfig& cfg, std::uint64_t slot) {
    std::vector<ChannelDraw> out;
    out.reserve(static_cast<std::size_t>(cfg.node_count));
    for (int n = 0; n < cfg.node_count; ++n)
        out.push_back(sample_channel(cfg.channel, RngStream(cfg.seed, StreamLabel::Channel, n), slot));
    return out;
}

std::vector<int> sample_arrivals(const SimConfig& cfg, std::uint64_t slot) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(cfg.node_count));
    for (int n = 0; n < cfg.node_count; ++n)
        out.push_back(
            sample_arrival(cfg.arrivals_for(n), RngStream(cfg.seed, StreamLabel::Arrival, n), slot));
    return out;
}

}  // namespace sleepsched
