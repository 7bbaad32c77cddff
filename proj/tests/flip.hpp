#pragma once

#include "easic/bitstream.hpp"
#include "easic/sim.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>

namespace easic::test {

struct FlipCandidate {
    std::string lut;
    std::uint64_t row = 0;
    /// Position in the bitstream.
    std::size_t bit = 0;
};

/// Key bits worth flipping, best first: rows of reconfigurable LUTs that drive primary
/// outputs (then all others), most frequently exercised rows first under random stimulus.
inline std::vector<FlipCandidate> flip_candidates(const Netlist& programmed, const Bitstream& key, std::size_t per_lut = 2)
{
    const Simulator sim(programmed);
    std::map<std::string, std::size_t> net_index;
    for (std::size_t i = 0; i < sim.net_names().size(); ++i)
        net_index[sim.net_names()[i]] = i;

    std::map<std::string, std::map<std::uint64_t, std::size_t>> rows;
    std::mt19937_64 rng(5);
    auto state = sim.initial_state();
    const int rounds = programmed.is_sequential() ? 64 : 16;
    for (int r = 0; r < rounds; ++r) {
        std::vector<std::uint64_t> in(programmed.inputs.size());
        for (auto& w : in)
            w = rng();
        std::vector<std::uint64_t> next;
        std::vector<std::uint64_t> nets;
        sim.evaluate(in, state, &next, &nets);
        state = next;
        for (const auto& e : key.chain) {
            const Cell& c = programmed.cells.at(e.lut_id);
            for (unsigned lane = 0; lane < 64; ++lane) {
                std::uint64_t row = 0;
                for (std::size_t p = 0; p < c.inputs.size(); ++p)
                    row |= ((nets[net_index.at(c.inputs[p])] >> lane) & 1u) << p;
                ++rows[e.lut_id][row];
            }
        }
    }

    const std::set<std::string> outputs(programmed.outputs.begin(), programmed.outputs.end());
    std::vector<FlipCandidate> first;
    std::vector<FlipCandidate> rest;
    std::size_t offset = 0;
    for (const auto& e : key.chain) {
        std::vector<std::pair<std::size_t, std::uint64_t>> ranked;
        for (auto [row, n] : rows[e.lut_id])
            ranked.push_back({n, row});
        std::sort(ranked.begin(), ranked.end(), [](auto a, auto b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
        for (std::size_t k = 0; k < std::min(per_lut, ranked.size()); ++k) {
            FlipCandidate c{e.lut_id, ranked[k].second, offset + ranked[k].second};
            (outputs.contains(programmed.cells.at(e.lut_id).output) ? first : rest).push_back(c);
        }
        offset += std::size_t{1} << e.width;
    }
    first.insert(first.end(), rest.begin(), rest.end());
    return first;
}

inline Bitstream flipped(const Bitstream& key, std::size_t bit)
{
    Bitstream out = key;
    out.bits[bit] = !out.bits[bit];
    return out;
}

} // namespace easic::test
