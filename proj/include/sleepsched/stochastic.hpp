#pragma once

#include <cstdint>
#include <vector>

#include "sleepsched/model.hpp"

namespace sleepsched {

enum class StreamLabel : std::uint64_t {
    Channel = 0x6368616e6e656cULL,  // "channel"
    Arrival = 0x617272697661ULL,    // "arriva"
    Policy = 0x706f6c696379ULL,     // "policy"
};

// Counter-based stream: the value for (slot, draw) is a pure function of
// (seed, label, node, slot, draw), so no sample depends on sampling order.
class RngStream {
public:
    RngStream(std::uint64_t seed, StreamLabel label, int node_id);

    std::uint64_t bits(std::uint64_t slot, std::uint32_t draw = 0) const;
    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform(std::uint64_t slot, std::uint32_t draw = 0) const;

private:
    std::uint64_t key_;
};

struct ChannelDraw {
    int index = 0;  // into ChannelModel::states
    int rate = 0;
};

// Both samplers use an inverse-CDF lookup in which the last positive-probability
// entry absorbs rounding in the cumulative sum.
ChannelDraw sample_channel(const ChannelModel& model, const RngStream& rng, std::uint64_t slot);
int sample_arrival(const ArrivalModel& model, const RngStream& rng, std::uint64_t slot);

std::vector<ChannelDraw> sample_channels(const SimConfig& cfg, std::uint64_t slot);
std::vector<int> sample_arrivals(const SimConfig& cfg, std::uint64_t slot);

}  // namespace sleepsched
