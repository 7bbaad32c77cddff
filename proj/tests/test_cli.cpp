#include "flip.hpp"
#include "support.hpp"

#include "cli.hpp"

#include "easic/bitstream.hpp"
#include "easic/blif.hpp"
#include "easic/obfuscate.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

using namespace easic;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args)
{
    args.insert(args.begin(), "easic");
    return cli::run(args);
}

nlohmann::json read_json(const fs::path& p)
{
    return nlohmann::json::parse(test::read_text(p));
}

std::string blif(const std::string& name)
{
    return (test::corpus_dir() / (name + ".blif")).string();
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_bytes(const fs::path& p)
{
    const std::string s = test::read_text(p);
    return {s.begin(), s.end()};
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("sha256")
    {
        CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("obfuscate outputs")
    {
        const fs::path dir = test::scratch_dir("obf");
        REQUIRE(run({"obfuscate", "--input", blif("sbm"), "--obf", "95", "--out", (dir / "o95").string()}) == cli::ok);
        for (const char* f : {"easic.v", "easic.blif", "easic.ebs", "chain.json", "timing.json", "area.json",
                              "constraints.json", "trace.json", "manifest.json"})
            CHECK(fs::exists(dir / "o95" / f));
        CHECK(read_json(dir / "o95" / "trace.json").at("steps").size() == 1);
        const auto manifest = read_json(dir / "o95" / "manifest.json");
        CHECK(manifest.at("outputs").size() == 8);
        CHECK(manifest.at("inputs")[0].at("sha256") == cli::sha256_hex(test::read_text(blif("sbm"))));
        for (const auto& o : manifest.at("outputs"))
            CHECK(o.at("sha256") == cli::sha256_hex(test::read_text(dir / "o95" / o.at("file").get<std::string>())));

        REQUIRE(run({"obfuscate", "--input", blif("sbm"), "--obf", "100", "--out", (dir / "o100").string()}) == cli::ok);
        CHECK(read_json(dir / "o100" / "chain.json").at("chain").size() == 29);
        CHECK(read_json(dir / "o100" / "area.json").at("area_st_um2").get<double>() == 0.0);

        REQUIRE(run({"obfuscate", "--input", blif("sbm"), "--obf", "0", "--out", (dir / "o0").string()}) == cli::ok);
        CHECK(read_ebs(read_bytes(dir / "o0" / "easic.ebs")).bits.empty());
        CHECK(test::read_text(dir / "o0" / "easic.v").find("  LUT") == std::string::npos);
        // the shipped netlist carries no key
        const Netlist shipped = parse_blif(test::read_text(dir / "o95" / "easic.blif"));
        for (const auto& [id, c] : shipped.cells)
            if (c.is_lut())
                CHECK_FALSE(c.configured);
        fs::remove_all(dir);
    }

    TEST_CASE("manifests are byte-identical across runs")
    {
        const fs::path dir = test::scratch_dir("det");
        REQUIRE(run({"obfuscate", "--input", blif("uart_tx"), "--obf", "70", "--seed", "9", "--out", (dir / "a").string()}) == 0);
        REQUIRE(run({"obfuscate", "--input", blif("uart_tx"), "--obf", "70", "--seed", "9", "--out", (dir / "b").string()}) == 0);
        CHECK(test::read_text(dir / "a" / "manifest.json") == test::read_text(dir / "b" / "manifest.json"));
        fs::remove_all(dir);
    }

    TEST_CASE("verify, flipped key bits and corrupt bitstreams")
    {
        const fs::path dir = test::scratch_dir("verify");
        const fs::path out = dir / "e";
        REQUIRE(run({"obfuscate", "--input", blif("secded8"), "--obf", "80", "--out", out.string()}) == 0);
        CHECK(run({"verify", "--golden", blif("secded8"), "--easic", out.string()}) == cli::ok);
        CHECK(read_json(out / "verify.json").at("verdict") == "equivalent");

        const Netlist hybrid = parse_blif(test::read_text(out / "easic.blif"));
        const Bitstream key = read_ebs(read_bytes(out / "easic.ebs"));
        const auto candidates = test::flip_candidates(program(hybrid, key), key);
        REQUIRE_FALSE(candidates.empty());
        write_bytes(dir / "flip.ebs", write_ebs(test::flipped(key, candidates[0].bit)));
        CHECK(run({"verify", "--golden", blif("secded8"), "--easic", out.string(), "--bitstream", (dir / "flip.ebs").string(),
                   "--out", (dir / "flip.json").string()}) == cli::counterexample);
        CHECK(read_json(dir / "flip.json").at("counterexample").is_object());

        auto bytes = read_bytes(out / "easic.ebs");
        bytes.pop_back();
        write_bytes(dir / "short.ebs", bytes);
        CHECK(run({"verify", "--golden", blif("secded8"), "--easic", out.string(), "--bitstream",
                   (dir / "short.ebs").string()}) == cli::config_error);
        fs::remove_all(dir);
    }

    TEST_CASE("program, report, sweep and histogram")
    {
        const fs::path dir = test::scratch_dir("misc");
        const fs::path out = dir / "e";
        REQUIRE(run({"obfuscate", "--input", blif("crc32x8"), "--obf", "60", "--out", out.string()}) == 0);
        REQUIRE(run({"program", "--easic", out.string(), "--out", (dir / "p.blif").string()}) == 0);
        const Netlist programmed = parse_blif(test::read_text(dir / "p.blif"));
        CHECK(check_equivalence(test::corpus_design("crc32x8"), programmed).equivalent());

        REQUIRE(run({"report", "--input", out.string(), "--out", (dir / "r.json").string()}) == 0);
        const auto rep = read_json(dir / "r.json");
        CHECK(rep.at("timing").at("cp_ns").get<double>() > 0);
        CHECK(rep.at("stats").at("lut_st").get<std::size_t>() == static_target(99, 60));

        REQUIRE(run({"sweep", "--input", blif("sbm"), "--levels", "98,95,92,89,86", "--jobs", "2", "--out",
                     (dir / "s.csv").string()}) == 0);
        const std::string csv = test::read_text(dir / "s.csv");
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
        CHECK(run({"sweep", "--input", blif("sbm"), "--levels", "90,abc"}) == cli::config_error);

        REQUIRE(run({"histogram", "--input", out.string(), "--scope", "static", "--out", (dir / "h.json").string(),
                     "--csv", (dir / "h.csv").string()}) == 0);
        CHECK(read_json(dir / "h.json").at("scope") == "static");
        CHECK(fs::exists(dir / "h.csv"));
        CHECK(run({"histogram", "--input", out.string(), "--scope", "reconfigurable"}) == cli::config_error);
        fs::remove_all(dir);
    }

    TEST_CASE("attacks")
    {
        const fs::path dir = test::scratch_dir("atk");
        REQUIRE(run({"obfuscate", "--input", blif("prio16"), "--obf", "0", "--out", (dir / "p0").string()}) == 0);
        REQUIRE(run({"attack", "composition", "--victim", (dir / "p0").string(), "--corpus", test::corpus_dir().string(),
                     "--out", (dir / "c.json").string()}) == 0);
        const auto comp = read_json(dir / "c.json");
        CHECK(comp.at("verdict") == "self-correlation");
        CHECK(comp.at("matches")[0].at("design") == "prio16");

        REQUIRE(run({"obfuscate", "--input", blif("prio16"), "--obf", "100", "--out", (dir / "p100").string()}) == 0);
        REQUIRE(run({"attack", "structural", "--easic", (dir / "p100").string(), "--out", (dir / "s").string()}) == 0);
        const auto st = read_json(dir / "s" / "structural.json");
        CHECK(st.at("static_unique") == 0);
        CHECK_FALSE(st.at("warnings").empty());

        REQUIRE(run({"obfuscate", "--input", blif("prio16"), "--obf", "60", "--out", (dir / "p60").string()}) == 0);
        REQUIRE(run({"attack", "structural", "--easic", (dir / "p60").string(), "--corpus", test::corpus_dir().string(),
                     "--out", (dir / "s60").string()}) == 0);
        const auto s60 = read_json(dir / "s60" / "structural.json");
        CHECK(s60.at("search_space").contains("l2"));
        CHECK(fs::exists(dir / "s60" / "settling.csv"));

        // two-key-bit toy
        std::ofstream(dir / "toy.blif") << ".model toy\n.inputs a\n.outputs y\n.names a y\n0 1\n.end\n";
        REQUIRE(run({"obfuscate", "--input", (dir / "toy.blif").string(), "--obf", "100", "--out", (dir / "t").string()}) == 0);
        REQUIRE(run({"attack", "bruteforce", "--easic", (dir / "t").string(), "--golden", (dir / "toy.blif").string(),
                     "--out", (dir / "bf").string()}) == 0);
        const auto bf = read_json(dir / "bf" / "bruteforce.json");
        CHECK(bf.at("key_bits") == 2);
        CHECK(bf.at("key") == "10");
        CHECK(run({"attack", "bruteforce", "--easic", (dir / "p60").string(), "--golden", blif("prio16"),
                   "--max-key-bits", "4"}) == cli::config_error);
        CHECK(run({"attack", "composition", "--victim", (dir / "p0").string(), "--corpus", (dir / "none").string()}) ==
              cli::config_error);
        fs::remove_all(dir);
    }

    TEST_CASE("exit codes")
    {
        const fs::path dir = test::scratch_dir("codes");
        std::ofstream(dir / "bad.blif") << ".model bad\n.inputs a\n.outputs y\n.names a y\n2 1\n.end\n";
        CHECK(run({"obfuscate", "--input", (dir / "bad.blif").string(), "--obf", "50", "--out", (dir / "x").string()}) ==
              cli::parse_error);
        CHECK(run({"obfuscate", "--input", blif("sbm")}) == cli::config_error);
        CHECK(run({"obfuscate", "--input", blif("sbm"), "--obf", "150", "--out", (dir / "y").string()}) == cli::config_error);
        CHECK(run({"frobnicate"}) == cli::config_error);
        CHECK(run({"obfuscate", "--input", (dir / "missing.blif").string(), "--obf", "50"}) == cli::config_error);
        std::ofstream(dir / "lib.json") << "{\"gates\": {}}";
        CHECK(run({"report", "--input", blif("sbm"), "--lib", (dir / "lib.json").string()}) == cli::config_error);
        fs::remove_all(dir);
    }
}
