#include "support.hpp"

#include "easic/blif.hpp"
#include "easic/error.hpp"
#include "easic/obfuscate.hpp"
#include "easic/sim.hpp"
#include "easic/timing.hpp"

#include <doctest.h>

using namespace easic;

namespace {

/// a..f -> LUT6 -> LUT4 -> LUT2 -> y
Netlist three_lut_chain()
{
    Netlist nl;
    nl.name = "chain";
    nl.inputs = {"a", "b", "c", "d", "e", "f", "g", "h", "k"};
    nl.outputs = {"y"};
    nl.add_cell(make_lut("l6", {"a", "b", "c", "d", "e", "f"}, "n6", LutMask(6, 0x8000000000000001ULL)));
    nl.add_cell(make_lut("l4", {"n6", "g", "h", "a"}, "n4", LutMask(4, 0x6996)));
    nl.add_cell(make_lut("l2", {"n4", "k"}, "y", LutMask(2, 0x6)));
    nl.validate();
    return nl;
}

} // namespace

TEST_SUITE("obfuscate")
{
    TEST_CASE("static target rounding")
    {
        const std::vector<double> levels = {98, 95, 92, 89, 86};
        const std::vector<std::size_t> expect = {0, 1, 2, 3, 4};
        for (std::size_t i = 0; i < levels.size(); ++i)
            CHECK(static_target(29, levels[i]) == expect[i]);
        CHECK(static_target(29, 100) == 0);
        CHECK(static_target(29, 0) == 29);
        CHECK(static_target(0, 50) == 0);
        CHECK(static_target(20, 95) == 1);
        CHECK(static_target(10, 70) == 3);
    }

    TEST_CASE("level bounds")
    {
        const Netlist nl = three_lut_chain();
        ObfuscationConfig cfg;
        cfg.obf_percent = 101;
        CHECK_THROWS_AS(run_obfuscation(nl, default_library(), cfg), ConfigError);
        cfg.obf_percent = -1;
        CHECK_THROWS_AS(run_obfuscation(nl, default_library(), cfg), ConfigError);
    }

    TEST_CASE("full and zero obfuscation")
    {
        const auto lib = default_library();
        const Netlist sbm = test::corpus_design("sbm");
        ObfuscationConfig cfg;
        cfg.obf_percent = 100;
        const auto full = run_obfuscation(sbm, lib, cfg);
        CHECK(full.l_st.empty());
        CHECK(full.netlist == sbm);
        CHECK(area_report(full, lib).area_st == 0.0);

        cfg.obf_percent = 0;
        const auto none = run_obfuscation(sbm, lib, cfg);
        CHECK(none.l_re.empty());
        CHECK(none.l_st.size() == 29);
        for (const auto& [id, c] : none.netlist.cells)
            CHECK_FALSE(c.is_lut());
        CHECK(none.netlist.static_origins.size() == 29);
        CHECK(area_report(none, lib).area_re == 0.0);
    }

    TEST_CASE("slowest LUT on the critical path goes first")
    {
        ObfuscationConfig cfg;
        cfg.obf_percent = 60; // floor(3 * 0.4) = 1
        const auto r = run_obfuscation(three_lut_chain(), default_library(), cfg);
        REQUIRE(r.l_st.size() == 1);
        CHECK(r.l_st[0] == "l6");
        CHECK(r.trace.at(0).endpoint == "y");
        CHECK_FALSE(r.trace.at(0).fallback);
        CHECK(r.trace.at(0).cp_after < r.trace.at(0).cp_before);
    }

    TEST_CASE("replacement naming and origins")
    {
        const auto lib = default_library();
        Netlist nl = test::lut2_design(0x6);
        replace_with_static(nl, "u", decompose_lut(LutMask(2, 0x6), lib));
        nl.validate();
        CHECK(nl.static_origins.at("u") == LutMask(2, 0x6));
        CHECK_FALSE(nl.cells.contains("u"));
        bool drives_y = false;
        for (const auto& [id, c] : nl.cells) {
            CHECK(id.rfind("u$st", 0) == 0);
            CHECK((c.output == "y" || c.output.rfind("u$n", 0) == 0));
            drives_y = drives_y || c.output == "y";
        }
        CHECK(drives_y);
        for (unsigned r = 0; r < 4; ++r)
            CHECK(eval_comb(nl, {(r & 1) != 0, (r & 2) != 0}) == std::vector<bool>{((r & 1) ^ (r >> 1)) != 0});
    }

    TEST_CASE("case constraints")
    {
        Netlist full = test::lut2_design(0x6);
        CHECK(gen_case_constraints(full).empty());
        Netlist proj = test::lut2_design(0xa);
        const auto c = gen_case_constraints(proj);
        REQUIRE(c.size() == 1);
        CHECK(c[0] == CaseConstraint{"u", 1, "b", false});

        std::mt19937_64 rng(77);
        const Netlist dag = test::random_dag(rng, 8, 200, 4);
        std::vector<CaseConstraint> expect;
        for (const auto& [id, cell] : dag.cells)
            for (unsigned p = 0; p < cell.inputs.size(); ++p) {
                bool flips = false;
                for (std::uint64_t r = 0; r < cell.mask.size(); ++r)
                    flips = flips || cell.mask.value(r) != cell.mask.value(r ^ (1ULL << p));
                if (!flips)
                    expect.push_back({id, p, cell.inputs[p], false});
            }
        CHECK(gen_case_constraints(dag) == expect);
    }

    TEST_CASE("sweep on the 29-LUT design")
    {
        const auto lib = default_library();
        const Netlist sbm = test::corpus_design("sbm");
        const auto one = sweep(sbm, lib, {100});
        REQUIRE(one.size() == 1);
        CHECK(one[0].area_st == 0.0);
        CHECK(one[0].lut_st == 0);

        const auto rows = sweep(sbm, lib, {98, 95, 92, 89, 86}, 3);
        std::vector<std::size_t> st;
        for (const auto& r : rows)
            st.push_back(r.lut_st);
        CHECK(st == std::vector<std::size_t>{0, 1, 2, 3, 4});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].cp <= rows[i - 1].cp);
            CHECK(rows[i].sum_cp <= rows[i - 1].sum_cp);
            CHECK(rows[i].area_re <= rows[i - 1].area_re);
            CHECK(rows[i].area_st >= rows[i - 1].area_st);
        }
        const std::string csv = sweep_csv(rows);
        CHECK(csv.rfind("obf,sum_cp_ns,cp_ns,area_re_um2,area_st_um2,lut_re,lut_st\n", 0) == 0);
        CHECK(sweep(sbm, lib, {98, 95, 92, 89, 86}, 1).size() == 5);
        CHECK_THROWS_AS(sweep(sbm, lib, {50, 120}), ConfigError);
    }

    TEST_CASE("parallel and serial sweeps agree")
    {
        const auto lib = default_library();
        const Netlist nl = test::corpus_design("crc32x8");
        const std::vector<double> levels = {100, 90, 75, 50, 25, 0};
        const auto a = sweep(nl, lib, levels, 1);
        const auto b = sweep(nl, lib, levels, 4);
        CHECK(sweep_csv(a) == sweep_csv(b));
    }

    TEST_CASE("engine timing equals gate-level timing of the result")
    {
        const auto lib = default_library();
        for (const Netlist& nl : test::corpus()) {
            for (double level : {100.0, 92.0, 75.0, 40.0, 0.0}) {
                ObfuscationConfig cfg;
                cfg.obf_percent = level;
                const auto r = run_obfuscation(nl, lib, cfg);
                const auto gate = report(build_and_time(r.netlist, lib));
                CAPTURE(nl.name);
                CAPTURE(level);
                CHECK(r.timing.cp == gate.cp);
                CHECK(r.timing.sum_cp == gate.sum_cp);
            }
        }
    }

    TEST_CASE("literal exclusion loop and direct search pick the same LUTs")
    {
        const auto lib = default_library();
        std::mt19937_64 rng(31337);
        for (int t = 0; t < 25; ++t) {
            const Netlist nl = test::random_dag(rng, 4 + rng() % 4, 10 + rng() % 30, 2 + rng() % 4, t % 3 == 0 ? 2 : 0);
            for (double level : {80.0, 50.0, 0.0}) {
                ObfuscationConfig direct;
                direct.obf_percent = level;
                ObfuscationConfig literal = direct;
                literal.literal_exclusion = true;
                const auto a = run_obfuscation(nl, lib, direct);
                const auto b = run_obfuscation(nl, lib, literal);
                CAPTURE(t);
                CAPTURE(level);
                CHECK(a.l_st == b.l_st);
                CHECK(a.netlist == b.netlist);
                CHECK(a.timing.cp == b.timing.cp);
                CHECK(a.excluded_paths == 0);
            }
        }
        for (const char* name : {"sbm", "secded8", "prio16"}) {
            const Netlist nl = test::corpus_design(name);
            ObfuscationConfig direct;
            direct.obf_percent = 60;
            ObfuscationConfig literal = direct;
            literal.literal_exclusion = true;
            CHECK(run_obfuscation(nl, lib, direct).l_st == run_obfuscation(nl, lib, literal).l_st);
        }
    }

    TEST_CASE("static sets are nested across levels")
    {
        const auto lib = default_library();
        const Netlist nl = test::corpus_design("alu8");
        std::vector<std::string> prev;
        for (double level : {100.0, 95.0, 86.0, 70.0, 50.0, 20.0, 0.0}) {
            ObfuscationConfig cfg;
            cfg.obf_percent = level;
            const auto r = run_obfuscation(nl, lib, cfg);
            REQUIRE(r.l_st.size() >= prev.size());
            CHECK(std::equal(prev.begin(), prev.end(), r.l_st.begin()));
            prev = r.l_st;
        }
    }

    TEST_CASE("conversion preserves function")
    {
        const auto lib = default_library();
        std::mt19937_64 rng(8);
        const Netlist nl = test::random_dag(rng, 8, 60, 5);
        ObfuscationConfig cfg;
        cfg.obf_percent = 0;
        const auto r = run_obfuscation(nl, lib, cfg);
        for (std::uint64_t v = 0; v < 256; ++v) {
            std::vector<bool> in;
            for (unsigned i = 0; i < 8; ++i)
                in.push_back((v >> i) & 1u);
            REQUIRE(eval_comb(nl, in) == eval_comb(r.netlist, in));
        }
    }

    TEST_CASE("determinism")
    {
        const auto lib = default_library();
        const Netlist nl = test::corpus_design("counter16");
        ObfuscationConfig cfg;
        cfg.obf_percent = 45;
        const auto a = run_obfuscation(nl, lib, cfg);
        const auto b = run_obfuscation(nl, lib, cfg);
        CHECK(a.l_st == b.l_st);
        CHECK(emit_blif(a.netlist) == emit_blif(b.netlist));
        CHECK(trace_json(a).dump() == trace_json(b).dump());
    }

    TEST_CASE("area report")
    {
        const auto lib = default_library();
        const Netlist nl = test::corpus_design("uart_tx");
        ObfuscationConfig cfg;
        cfg.obf_percent = 50;
        const auto r = run_obfuscation(nl, lib, cfg);
        double re = 0;
        for (const auto& [id, c] : r.netlist.cells)
            if (c.is_lut())
                re += lib.lut_area(c.mask.width());
        const AreaReport a = area_report(r, lib);
        CHECK(a.area_re == doctest::Approx(re));
        const AreaReport b = area_report(r.netlist, lib);
        CHECK(a.area_st == doctest::Approx(b.area_st));
        CHECK(a.other_static == doctest::Approx(b.other_static));
        CHECK(a.area_st > 0);
        const auto j = area_json(a);
        CHECK(j.contains("area_re_um2"));
    }
}
