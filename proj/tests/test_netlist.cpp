#include "support.hpp"

#include "easic/blif.hpp"
#include "easic/error.hpp"
#include "easic/netlist.hpp"
#include "easic/obfuscate.hpp"
#include "easic/techlib.hpp"
#include "easic/verilog.hpp"

#include <doctest.h>

#include <regex>

using namespace easic;

TEST_SUITE("netlist")
{
    TEST_CASE("lut mask bit order and hex")
    {
        const LutMask m(2, 0x8);
        CHECK(m.value(3));
        CHECK_FALSE(m.value(1));
        CHECK(m.hex() == "8");
        CHECK(LutMask::from_hex(6, m.hex()) != m);
        CHECK(LutMask(6, 0x123456789abcdef0ULL).hex() == "123456789abcdef0");
        CHECK(LutMask::from_hex(3, "e8") == LutMask(3, 0xe8));
        CHECK_THROWS_AS(LutMask(2, 0x10), std::invalid_argument);
        CHECK_THROWS_AS(LutMask(7, 0), std::invalid_argument);
        // in0 projection lifted to six inputs repeats 0b10
        CHECK(LutMask(1, 0b10).lifted() == 0xaaaaaaaaaaaaaaaaULL);
        CHECK(LutMask(2, 0x8).lifted() == 0x8888888888888888ULL);
    }

    TEST_CASE("blif cover to mask")
    {
        const auto and2 = parse_blif(".model t\n.inputs a b\n.outputs y\n.names a b y\n11 1\n.end\n");
        REQUIRE(and2.cells.size() == 1);
        CHECK(and2.cells.at("y").mask == LutMask(2, 0x8));
        CHECK(and2.cells.at("y").is_reconfigurable());

        const auto tie = parse_blif(".model t\n.outputs y\n.names y\n1\n.end\n");
        CHECK(tie.cells.at("y").kind == CellKind::Tie1);

        const auto or2 = parse_blif(".model t\n.inputs a b\n.outputs y\n.names a b y\n1- 1\n-1 1\n.end\n");
        CHECK(or2.cells.at("y").mask == LutMask(2, 0xe));

        // off-set cover
        const auto nand = parse_blif(".model t\n.inputs a b\n.outputs y\n.names a b y\n11 0\n.end\n");
        CHECK(nand.cells.at("y").mask == LutMask(2, 0x7));

        const auto tie0 = parse_blif(".model t\n.outputs y\n.names y\n.end\n");
        CHECK(tie0.cells.at("y").kind == CellKind::Tie0);
    }

    TEST_CASE("blif latch and continuation")
    {
        const auto nl = parse_blif(".model t\n.inputs clk d\n.outputs q\n.latch d q re clk 1\n.end\n");
        REQUIRE(nl.clock);
        CHECK(*nl.clock == "clk");
        const Cell& ff = nl.cells.at("q");
        CHECK(ff.kind == CellKind::Ff);
        CHECK(ff.init);
        CHECK(nl.data_inputs() == std::vector<std::string>{"d"});
        CHECK(nl.is_sequential());

        const auto cont = parse_blif(".model t\n.inputs a \\\n b\n.outputs y\n.names a b \\\n y\n11 1\n.end\n");
        CHECK(cont.inputs.size() == 2);
        CHECK(cont.cells.at("y").inputs.size() == 2);
    }

    TEST_CASE("blif errors carry line numbers")
    {
        try {
            parse_blif(".model t\n.inputs a\n.outputs y\n.names a y\n2 1\n.end\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 5);
        }
        CHECK_THROWS_AS(parse_blif(".model t\n.inputs a b c d e f g\n.outputs y\n.names a b c d e f g y\n1111111 1\n.end\n"),
                        ParseError);
        // two drivers of one net
        CHECK_THROWS_AS(parse_blif(".model t\n.inputs a\n.outputs y\n.names a y\n1 1\n.names a y\n0 1\n.end\n"), ParseError);
        // mixed on/off set
        CHECK_THROWS_AS(parse_blif(".model t\n.inputs a b\n.outputs y\n.names a b y\n11 1\n00 0\n.end\n"), ParseError);
        // combinational loop
        CHECK_THROWS_AS(parse_blif(".model t\n.inputs a\n.outputs y\n.names a z y\n11 1\n.names y z\n1 1\n.end\n"), Error);
        // undriven net
        CHECK_THROWS_AS(parse_blif(".model t\n.inputs a\n.outputs y\n.names a w y\n11 1\n.end\n"), Error);
    }

    TEST_CASE("blif round trip on the corpus and on hybrids")
    {
        const auto lib = default_library();
        for (const Netlist& nl : test::corpus()) {
            CAPTURE(nl.name);
            CHECK(parse_blif(emit_blif(nl)) == nl);
            ObfuscationConfig cfg;
            cfg.obf_percent = 50;
            const auto r = run_obfuscation(nl, lib, cfg);
            CHECK(parse_blif(emit_blif(r.netlist)) == r.netlist);
        }
    }

    TEST_CASE("blif emitter shapes")
    {
        const auto text = emit_blif(test::lut2_design(0x8));
        CHECK(text.find(".names a b y\n11 1\n") != std::string::npos);
        Netlist ff;
        ff.name = "ff";
        ff.inputs = {"clk", "d"};
        ff.clock = "clk";
        ff.outputs = {"q"};
        ff.add_cell(make_ff("r", "d", "q", "clk"));
        const auto t = emit_blif(ff);
        std::size_t latches = 0;
        for (std::size_t pos = 0; (pos = t.find(".latch", pos)) != std::string::npos; ++pos)
            ++latches;
        CHECK(latches == 1);
    }

    TEST_CASE("verilog daisy chain")
    {
        Netlist none = test::lut2_design(0x8);
        ObfuscationConfig cfg;
        cfg.obf_percent = 0;
        const auto lib = default_library();
        const auto st = run_obfuscation(none, lib, cfg).netlist;
        const std::string v0 = emit_verilog(st);
        CHECK(v0.find("serial_in") == std::string::npos);
        CHECK(v0.find("serial_out") == std::string::npos);

        Netlist two;
        two.name = "two";
        two.inputs = {"a", "b"};
        two.outputs = {"y", "z"};
        two.add_cell(make_lut("u2", {"a", "b"}, "y", LutMask(2, 0x8)));
        two.add_cell(make_lut("u1", {"a", "b"}, "z", LutMask(2, 0xe)));
        const std::string v = emit_verilog(two);
        // chain order u1 -> u2: the wire leaving u1 feeds u2
        const std::regex first(R"(LUT2 u_u1 \([^;]*\.serial_out\((\w+)\))");
        std::smatch m;
        REQUIRE(std::regex_search(v, m, first));
        const std::string wire = m[1];
        CHECK(wire != "serial_out");
        CHECK(std::regex_search(v, std::regex("LUT2 u_u2 \\([^;]*\\.serial_in\\(" + wire + "\\)")));
        CHECK(std::regex_search(v, std::regex(R"(LUT2 u_u1 \([^;]*\.serial_in\(serial_in\))")));
    }

    TEST_CASE("verilog legalization collision")
    {
        Netlist nl;
        nl.name = "c";
        nl.inputs = {"a.b", "a_b"};
        nl.outputs = {"y"};
        nl.add_cell(make_lut("u", {"a.b", "a_b"}, "y", LutMask(2, 0x6)));
        try {
            emit_verilog(nl);
            FAIL("expected a collision");
        } catch (const ValidationError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("a.b") != std::string::npos);
            CHECK(msg.find("a_b") != std::string::npos);
        }
    }

    TEST_CASE("verilog macro count on the 29-LUT design")
    {
        const Netlist sbm = test::corpus_design("sbm");
        ObfuscationConfig cfg;
        cfg.obf_percent = 98;
        const auto r = run_obfuscation(sbm, default_library(), cfg);
        const std::string v = emit_verilog(r.netlist);
        const std::regex inst(R"(\n  LUT[1-6] )");
        const auto n = std::distance(std::sregex_iterator(v.begin(), v.end(), inst), std::sregex_iterator());
        CHECK(n == 29);
    }

    TEST_CASE("stats")
    {
        const auto empty = stats(Netlist{});
        CHECK(empty.total_luts() == 0);
        CHECK(empty.ffs == 0);
        CHECK(empty.gate_count() == 0);

        const Netlist sbm = test::corpus_design("sbm");
        CHECK(stats(sbm).total_luts() == 29);
        ObfuscationConfig cfg;
        cfg.obf_percent = 95;
        const auto s = stats(run_obfuscation(sbm, default_library(), cfg).netlist);
        CHECK(s.lut_re() == 28);
        CHECK(s.lut_st() == 1);
    }

    TEST_CASE("topological order")
    {
        std::mt19937_64 rng(7);
        const Netlist nl = test::random_dag(rng, 6, 80, 4, 3);
        std::map<std::string, std::size_t> pos;
        const auto order = topological_cells(nl);
        for (std::size_t i = 0; i < order.size(); ++i)
            pos[order[i]->output] = i;
        for (const Cell* c : order)
            for (const auto& in : c->inputs)
                if (pos.contains(in))
                    CHECK(pos[in] < pos[c->output]);
    }
}

TEST_SUITE("techlib")
{
    TEST_CASE("default library is calibrated")
    {
        const auto lib = default_library();
        CHECK(lib.calibrated());
        CHECK_FALSE(lib.calibration_warning);
        for (unsigned n = 1; n <= 6; ++n)
            CHECK(lib.lut_delay(n) >= lib.gate_delay(CellKind::Mux2) * n);
    }

    TEST_CASE("json round trip and errors")
    {
        const auto lib = default_library();
        CHECK(load_library(lib.to_json()) == lib);

        auto missing = lib.to_json();
        missing["gates"]["AND2"].erase("area_um2");
        try {
            load_library(missing);
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("AND2") != std::string::npos);
        }

        auto negative = lib.to_json();
        negative["gates"]["INV"]["delay_ns"] = -0.1;
        CHECK_THROWS_AS(load_library(negative), ConfigError);

        auto unknown = lib.to_json();
        unknown["gates"]["XOR9"] = {{"delay_ns", 1.0}, {"area_um2", 1.0}};
        CHECK_THROWS_AS(load_library(unknown), ConfigError);

        auto slow = lib.to_json();
        slow["luts"]["6"]["delay_ns"] = 0.1;
        slow["gates"]["MUX2"]["delay_ns"] = 0.05;
        const auto loaded = load_library(slow);
        CHECK(loaded.calibration_warning);
        CHECK_FALSE(loaded.calibrated());
    }

    TEST_CASE("cell delay and area lookups")
    {
        const auto lib = default_library();
        CHECK(cell_delay(lib, make_gate("t", CellKind::Tie1, {}, "y")) == Delay{});
        Cell lut6 = make_lut("l", {"a", "b", "c", "d", "e", "f"}, "y", LutMask(6, 1));
        CHECK(cell_delay(lib, lut6) == lib.lut_delay(6));
        CHECK(cell_area(lib, lut6) == lib.lut_area(6));
        CHECK(cell_area(lib, make_ff("r", "d", "q", "clk")) == lib.ff_area);
        CHECK(cell_delay(lib, make_ff("r", "d", "q", "clk")) == lib.ff_clk2q);
    }
}
