#pragma once

#include "easic/blif.hpp"
#include "easic/netlist.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace easic::test {

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path corpus_dir()
{
    return EASIC_CORPUS_DIR;
}

/// Every corpus design, sorted by file name.
inline std::vector<Netlist> corpus()
{
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(corpus_dir()))
        if (e.path().extension() == ".blif")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<Netlist> out;
    for (const auto& f : files)
        out.push_back(parse_blif(read_text(f)));
    return out;
}

inline Netlist corpus_design(const std::string& name)
{
    return parse_blif(read_text(corpus_dir() / (name + ".blif")));
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag)
{
    static std::mt19937_64 rng(std::random_device{}());
    auto dir = std::filesystem::temp_directory_path() / ("easic_test_" + tag + "_" + std::to_string(rng() % 1000000007));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline LutMask random_mask(std::mt19937_64& rng, unsigned width)
{
    return LutMask(width, rng() & LutMask::full_bits(width));
}

/// Random combinational LUT DAG: `inputs` PIs, `cells` LUTs of width 1..6 reading earlier nets,
/// the last few nets exposed as outputs. With `ffs` > 0, that many FFs close feedback loops.
inline Netlist random_dag(std::mt19937_64& rng, std::size_t inputs, std::size_t cells, std::size_t outputs,
                          std::size_t ffs = 0)
{
    Netlist nl;
    nl.name = "rand";
    std::vector<std::string> nets;
    if (ffs > 0) {
        nl.clock = "clk";
        nl.inputs.push_back("clk");
    }
    for (std::size_t i = 0; i < inputs; ++i) {
        nl.inputs.push_back("i" + std::to_string(i));
        nets.push_back(nl.inputs.back());
    }
    for (std::size_t f = 0; f < ffs; ++f)
        nets.push_back("q" + std::to_string(f));
    for (std::size_t c = 0; c < cells; ++c) {
        const unsigned width = 1 + static_cast<unsigned>(rng() % 6);
        std::vector<std::string> in;
        for (unsigned k = 0; k < width; ++k) {
            // bias towards recent nets for deeper graphs
            const std::size_t span = std::min<std::size_t>(nets.size(), 12);
            const std::size_t pick = rng() % 3 == 0 ? rng() % nets.size() : nets.size() - 1 - rng() % span;
            in.push_back(nets[pick]);
        }
        const std::string out = "n" + std::to_string(c);
        nl.add_cell(make_lut("u" + std::to_string(c), in, out, random_mask(rng, width)));
        nets.push_back(out);
    }
    for (std::size_t f = 0; f < ffs; ++f)
        nl.add_cell(make_ff("ff" + std::to_string(f), nets[nets.size() - 1 - (f % cells)], "q" + std::to_string(f), "clk",
                            f % 2 == 1));
    for (std::size_t o = 0; o < outputs && o < cells; ++o)
        nl.outputs.push_back("n" + std::to_string(cells - 1 - o));
    nl.validate();
    return nl;
}

/// Two-input LUT netlist y = f(a, b).
inline Netlist lut2_design(std::uint64_t mask, const std::string& name = "lut2")
{
    Netlist nl;
    nl.name = name;
    nl.inputs = {"a", "b"};
    nl.outputs = {"y"};
    nl.add_cell(make_lut("u", {"a", "b"}, "y", LutMask(2, mask)));
    nl.validate();
    return nl;
}

} // namespace easic::test
