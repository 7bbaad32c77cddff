#include "support.hpp"

#include "easic/bitstream.hpp"
#include "easic/error.hpp"
#include "easic/obfuscate.hpp"

#include <doctest.h>

#include <deque>

using namespace easic;

namespace {

Netlist two_lut1()
{
    Netlist nl;
    nl.name = "two";
    nl.inputs = {"a"};
    nl.outputs = {"x", "y"};
    nl.add_cell(make_lut("b", {"a"}, "x", LutMask(1, 0b10)));
    nl.add_cell(make_lut("i", {"a"}, "y", LutMask(1, 0b01)));
    return nl;
}

Bitstream key_of(const Netlist& nl, double level)
{
    ObfuscationConfig cfg;
    cfg.obf_percent = level;
    return serialize(run_obfuscation(nl, default_library(), cfg).netlist);
}

} // namespace

TEST_SUITE("bitstream")
{
    TEST_CASE("chain order")
    {
        Netlist nl;
        nl.name = "o";
        nl.inputs = {"a"};
        nl.outputs = {"x", "y"};
        nl.add_cell(make_lut("u2", {"a"}, "x", LutMask(1, 1)));
        nl.add_cell(make_lut("u1", {"a"}, "y", LutMask(1, 2)));
        const auto chain = chain_order(nl);
        REQUIRE(chain.size() == 2);
        CHECK(chain[0].lut_id == "u1");
        CHECK(chain[1].lut_id == "u2");

        ObfuscationConfig cfg;
        cfg.obf_percent = 0;
        CHECK(chain_order(run_obfuscation(nl, default_library(), cfg).netlist).empty());

        const Netlist sha = test::corpus_design("sha8");
        cfg.obf_percent = 90;
        const auto r = run_obfuscation(sha, default_library(), cfg);
        CHECK(chain_order(r.netlist).size() == stats(r.netlist).lut_re());
    }

    TEST_CASE("serialization examples")
    {
        CHECK(serialize(test::lut2_design(0x8)).bits == std::vector<bool>{false, false, false, true});
        CHECK(serialize(two_lut1()).bits == std::vector<bool>{false, true, true, false});
        Netlist empty;
        empty.name = "e";
        CHECK(serialize(empty).bits.empty());
        CHECK(serialize(empty).total_len() == 0);
        CHECK_THROWS_AS(serialize(blank(two_lut1())), ConfigError);
    }

    TEST_CASE("blank clears every reconfigurable LUT")
    {
        const Netlist b = blank(test::corpus_design("sbm"));
        for (const auto& [id, c] : b.cells)
            if (c.is_lut()) {
                CHECK_FALSE(c.configured);
                CHECK(c.mask.bits() == 0);
            }
    }

    TEST_CASE("shift register matches an independent model")
    {
        const std::vector<ChainEntry> chain = {{"a", 1}, {"b", 2}, {"c", 3}};
        ConfigChain cc(chain);
        std::deque<bool> model(2 + 4 + 8, false);
        std::mt19937_64 rng(3);
        for (int t = 0; t < 500; ++t) {
            const bool in = rng() & 1;
            const bool en = rng() % 4 != 0;
            const bool expect_out = model.back();
            if (en) {
                model.pop_back();
                model.push_front(in);
            }
            CHECK(cc.clock(in, en) == expect_out);
            CHECK(std::equal(model.begin(), model.end(), cc.registers().begin()));
        }
        ConfigChain empty({});
        CHECK_FALSE(empty.clock(true, true));
    }

    TEST_CASE("program round trip on the corpus")
    {
        for (const Netlist& nl : test::corpus()) {
            for (double level : {100.0, 86.0, 50.0, 0.0}) {
                ObfuscationConfig cfg;
                cfg.obf_percent = level;
                const auto hybrid = run_obfuscation(nl, default_library(), cfg).netlist;
                const Bitstream key = serialize(hybrid);
                const Netlist programmed = program(blank(hybrid), key);
                CAPTURE(nl.name);
                CAPTURE(level);
                CHECK(programmed == hybrid);
                CHECK(serialize(programmed) == key);
                ConfigChain cc(key.chain);
                for (auto it = key.bits.rbegin(); it != key.bits.rend(); ++it)
                    cc.clock(*it, true);
                CHECK(cc.readback() == key.masks());
            }
        }
    }

    TEST_CASE("under-programming is detected")
    {
        const Bitstream key = key_of(test::corpus_design("prio16"), 80);
        REQUIRE(key.total_len() > 8);
        for (std::size_t k : {std::size_t{1}, key.total_len() / 2, key.total_len() - 1}) {
            ConfigChain cc(key.chain);
            // the last k bits of the stream, shifted in last first
            for (std::size_t i = 0; i < k; ++i)
                cc.clock(key.bits[key.total_len() - 1 - i], true);
            CHECK(cc.readback() != key.masks());
        }
    }

    TEST_CASE("length and chain mismatches")
    {
        const Netlist sbm = test::corpus_design("sbm");
        Bitstream key = serialize(sbm);
        key.bits.pop_back();
        try {
            program(blank(sbm), key);
            FAIL("expected a length error");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find(std::to_string(key.total_len())) != std::string::npos);
            CHECK(msg.find(std::to_string(key.bits.size())) != std::string::npos);
        }
        Bitstream other = serialize(sbm);
        other.chain[0].lut_id = "nope";
        CHECK_THROWS_AS(program(blank(sbm), other), ConfigError);
    }

    TEST_CASE("ebs encoding")
    {
        const Bitstream key = key_of(test::corpus_design("rr_arb8"), 70);
        const auto bytes = write_ebs(key);
        CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "EASICBS1");
        CHECK(read_ebs(bytes) == key);

        auto truncated = bytes;
        truncated.pop_back();
        CHECK_THROWS_AS(read_ebs(truncated), ConfigError);
        auto trailing = bytes;
        trailing.push_back(0);
        CHECK_THROWS_AS(read_ebs(trailing), ConfigError);
        auto magic = bytes;
        magic[0] = 'X';
        CHECK_THROWS_AS(read_ebs(magic), ConfigError);
        CHECK_THROWS_AS(read_ebs({}), ConfigError);
        if (key.total_len() % 8 != 0) {
            auto padding = bytes;
            padding.back() |= 0x80;
            CHECK_THROWS_AS(read_ebs(padding), ConfigError);
        }
    }

    TEST_CASE("apply_masks and manifest")
    {
        const Netlist sbm = test::corpus_design("sbm");
        const Bitstream key = serialize(sbm);
        CHECK(apply_masks(blank(sbm), key.masks()) == sbm);
        const auto j = chain_manifest(key);
        CHECK(j.at("total_len").get<std::size_t>() == key.total_len());
        CHECK(j.at("chain").size() == key.chain.size());
        std::size_t offset = 0;
        for (const auto& e : j.at("chain")) {
            CHECK(e.at("offset").get<std::size_t>() == offset);
            offset += std::size_t{1} << e.at("width").get<unsigned>();
        }
    }
}
