#include "cli.hpp"

#include "easic/attacks.hpp"
#include "easic/bitstream.hpp"
#include "easic/blif.hpp"
#include "easic/error.hpp"
#include "easic/obfuscate.hpp"
#include "easic/sim.hpp"
#include "easic/techlib.hpp"
#include "easic/timing.hpp"
#include "easic/verilog.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace easic::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* tool_version = "1.0.0";

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << bytes;
}

std::string dump(const nlohmann::json& j)
{
    return j.dump(2) + "\n";
}

/// A BLIF file, or an obfuscation output directory (its easic.blif).
Netlist load_netlist(const fs::path& path)
{
    const fs::path file = fs::is_directory(path) ? path / "easic.blif" : path;
    return parse_blif(read_file(file));
}

Bitstream load_bitstream(const fs::path& path)
{
    const std::string raw = read_file(path);
    return read_ebs(std::vector<std::uint8_t>(raw.begin(), raw.end()));
}

struct LoadedLibrary {
    TechLibrary lib;
    std::string source = "builtin";
    std::string hash;
};

LoadedLibrary load_lib(const std::string& flag)
{
    LoadedLibrary out;
    std::string path = flag;
    if (path.empty())
        if (const char* env = std::getenv("EASIC_LIB"))
            path = env;
    if (path.empty()) {
        out.lib = default_library();
    } else {
        const std::string text = read_file(path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError("library " + path + ": " + ex.what());
        }
        out.lib = load_library(j);
        out.source = path;
    }
    out.hash = sha256_hex(out.lib.to_json().dump());
    if (out.lib.calibration_warning) {
        std::cerr << "warning: library is not calibrated (";
        const auto v = out.lib.calibration_violations();
        for (std::size_t i = 0; i < v.size(); ++i)
            std::cerr << (i ? ", " : "") << v[i];
        std::cerr << "); static replacements may be slower than their LUTs\n";
    }
    return out;
}

std::vector<double> parse_levels(const std::string& text)
{
    std::vector<double> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            levels.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad obfuscation level '" + item + "'");
        }
    }
    if (levels.empty())
        throw ConfigError("--levels is empty");
    return levels;
}

/// Full-design histograms of every *.blif and histogram *.json in a directory, by file name.
std::vector<PatternHistogram> load_corpus(const std::string& dir)
{
    if (dir.empty() || !fs::is_directory(dir))
        throw ConfigError("corpus directory '" + dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && (e.path().extension() == ".blif" || e.path().extension() == ".json"))
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<PatternHistogram> out;
    for (const auto& f : files) {
        if (f.extension() == ".blif") {
            out.push_back(pattern_histogram(parse_blif(read_file(f)), HistogramScope::Whole));
        } else {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(read_file(f));
            } catch (const nlohmann::json::exception& ex) {
                throw ConfigError(f.string() + ": " + ex.what());
            }
            out.push_back(histogram_from_json(j));
        }
    }
    if (out.empty())
        throw ConfigError("corpus directory '" + dir + "' holds no designs");
    return out;
}

struct Options {
    std::string input;
    double obf = 100.0;
    std::string levels;
    std::string lib;
    std::string out;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    double threshold = default_threshold;
    unsigned max_key_bits = default_max_key_bits;
    std::string golden;
    std::string easic_dir;
    std::string bitstream;
    std::string victim;
    std::string corpus;
    std::string scope = "whole";
    std::string csv;
    unsigned degree = 3;
};

int cmd_obfuscate(const Options& o)
{
    const std::string text = read_file(o.input);
    const Netlist original = parse_blif(text);
    const LoadedLibrary lib = load_lib(o.lib);
    ObfuscationConfig cfg;
    cfg.obf_percent = o.obf;
    cfg.seed = o.seed;
    const ObfuscationResult r = run_obfuscation(original, lib.lib, cfg);

    const fs::path dir = o.out.empty() ? fs::path("easic_out") : fs::path(o.out);
    const Bitstream key = serialize(r.netlist);
    const auto ebs = write_ebs(key);
    const AreaReport area = area_report(r, lib.lib);
    const auto st = stats(r.netlist);
    nlohmann::json area_doc = area_json(area);
    area_doc["lut_re"] = st.lut_re();
    area_doc["lut_st"] = st.lut_st();
    const TimingReport timing = report(build_and_time(r.netlist, lib.lib));

    std::vector<std::pair<std::string, std::string>> files = {
        {"easic.v", emit_verilog(r.netlist)},
        {"easic.blif", emit_blif(blank(r.netlist))},
        {"easic.ebs", std::string(ebs.begin(), ebs.end())},
        {"chain.json", dump(chain_manifest(key))},
        {"timing.json", dump(timing_report_json(timing))},
        {"area.json", dump(area_doc)},
        {"constraints.json", dump(constraints_json(gen_case_constraints(r)))},
        {"trace.json", dump(trace_json(r))},
    };
    nlohmann::json manifest;
    manifest["tool"] = "easic";
    manifest["version"] = tool_version;
    manifest["command"] = "obfuscate";
    manifest["inputs"] = nlohmann::json::array({{{"path", fs::path(o.input).filename().string()}, {"sha256", sha256_hex(text)}}});
    manifest["library"] = {{"source", lib.source == "builtin" ? lib.source : fs::path(lib.source).filename().string()},
                           {"sha256", lib.hash}};
    manifest["config"] = {{"obf_percent", o.obf}, {"seed", o.seed}};
    manifest["seed"] = o.seed;
    manifest["outputs"] = nlohmann::json::array();
    for (const auto& [name, bytes] : files) {
        write_file(dir / name, bytes);
        manifest["outputs"].push_back({{"file", name}, {"sha256", sha256_hex(bytes)}});
    }
    write_file(dir / "manifest.json", dump(manifest));
    std::cout << r.netlist.name << ": " << r.l_re.size() << " reconfigurable, " << r.l_st.size()
              << " static LUTs; cp " << timing.cp.ns() << " ns, sum_cp " << timing.sum_cp.ns() << " ns; key "
              << key.total_len() << " bits -> " << dir.string() << "\n";
    return ok;
}

int cmd_sweep(const Options& o)
{
    const Netlist nl = parse_blif(read_file(o.input));
    const LoadedLibrary lib = load_lib(o.lib);
    const auto rows = sweep(nl, lib.lib, parse_levels(o.levels), o.jobs);
    const std::string csv = sweep_csv(rows);
    if (o.out.empty())
        std::cout << csv;
    else
        write_file(o.out, csv);
    return ok;
}

int cmd_verify(const Options& o)
{
    const Netlist golden = load_netlist(o.golden);
    const fs::path dir(o.easic_dir);
    const Netlist hybrid = load_netlist(dir);
    const Bitstream key = load_bitstream(o.bitstream.empty() ? dir / "easic.ebs" : fs::path(o.bitstream));
    const Netlist programmed = program(hybrid, key);
    EquivalencePolicy policy;
    policy.seed = o.seed;
    const auto rep = check_equivalence(golden, programmed, policy);
    const fs::path out = o.out.empty() ? dir / "verify.json" : fs::path(o.out);
    write_file(out, dump(report_json(rep)));
    std::cout << (rep.equivalent() ? "equivalent" : "counterexample") << " (" << mode_name(rep.mode) << ", "
              << rep.note << ")\n";
    if (!rep.equivalent()) {
        std::cout << "output " << rep.counterexample->output << ": golden " << rep.counterexample->value_a
                  << ", programmed " << rep.counterexample->value_b << "\n";
        return counterexample;
    }
    return ok;
}

int cmd_program(const Options& o)
{
    const fs::path dir(o.easic_dir);
    const Netlist hybrid = load_netlist(dir);
    const Bitstream key = load_bitstream(o.bitstream.empty() ? dir / "easic.ebs" : fs::path(o.bitstream));
    const std::string text = emit_blif(program(hybrid, key));
    if (o.out.empty())
        std::cout << text;
    else
        write_file(o.out, text);
    return ok;
}

int cmd_report(const Options& o)
{
    const Netlist nl = load_netlist(o.input);
    const LoadedLibrary lib = load_lib(o.lib);
    const auto s = stats(nl);
    nlohmann::json j;
    j["design"] = nl.name;
    j["stats"] = {{"lut_re", s.lut_re()}, {"lut_st", s.lut_st()}, {"ffs", s.ffs},
                  {"gates", s.gate_count()}, {"inputs", s.inputs}, {"outputs", s.outputs}};
    j["timing"] = timing_report_json(report(build_and_time(nl, lib.lib)));
    j["area"] = area_json(area_report(nl, lib.lib));
    if (o.out.empty())
        std::cout << dump(j);
    else
        write_file(o.out, dump(j));
    return ok;
}

int cmd_histogram(const Options& o)
{
    const Netlist nl = load_netlist(o.input);
    const auto h = pattern_histogram(nl, scope_from_name(o.scope));
    if (o.out.empty())
        std::cout << dump(histogram_json(h));
    else
        write_file(o.out, dump(histogram_json(h)));
    if (!o.csv.empty())
        write_file(o.csv, histogram_csv(h));
    return ok;
}

int cmd_structural(const Options& o)
{
    const Netlist nl = load_netlist(o.easic_dir.empty() ? o.input : o.easic_dir);
    const fs::path dir = o.out.empty() ? fs::path("attack_out") : fs::path(o.out);
    const auto h = pattern_histogram(nl, HistogramScope::Static);
    nlohmann::json summary;
    summary["design"] = nl.name;
    summary["static_unique"] = h.entries.size();
    summary["static_luts"] = h.total();
    summary["warnings"] = nlohmann::json::array();
    if (h.entries.empty()) {
        summary["warnings"].push_back("static portion is empty: the histogram has no entries");
        std::cerr << "warning: static portion of " << nl.name << " is empty\n";
    }
    write_file(dir / "histogram_static.json", dump(histogram_json(h)));
    write_file(dir / "histogram_static.csv", histogram_csv(h));
    if (h.entries.size() >= o.degree + 1) {
        const auto t = fit_trendline(h, o.degree);
        summary["trendline"] = {{"degree", t.degree},
                                {"coefficients", t.coefficients},
                                {"max_abs_residual", t.max_abs_residual},
                                {"max_residual_id", t.max_residual_id}};
    } else {
        summary["warnings"].push_back("too few static patterns for a degree-" + std::to_string(o.degree) +
                                      " trendline");
    }
    std::optional<UniquePatternSet> corpus;
    std::optional<PatternHistogram> matched;
    if (!o.corpus.empty()) {
        const auto hists = load_corpus(o.corpus);
        corpus = corpus_union(hists);
        write_file(dir / "settling.csv", settling_csv(*corpus));
        if (hists.size() >= 2 && !h.entries.empty()) {
            const auto rep = composition_attack(h, hists, o.threshold);
            summary["composition"] = correlation_json(rep);
            if (rep.verdict != Verdict::NoCorrelation)
                for (const auto& c : hists)
                    if (c.design == rep.matches.front().design)
                        matched = c;
        }
    }
    const auto space = search_space_report(nl, corpus ? &*corpus : nullptr, matched ? &*matched : nullptr);
    summary["search_space"] = search_space_json(space);
    write_file(dir / "structural.json", dump(summary));
    std::cout << nl.name << ": " << h.entries.size() << " unique static patterns, key " << space.key_bits
              << " bits -> " << dir.string() << "\n";
    return ok;
}

int cmd_composition(const Options& o)
{
    const Netlist victim = load_netlist(o.victim);
    const auto hists = load_corpus(o.corpus);
    auto h = pattern_histogram(victim, HistogramScope::Static);
    const auto rep = composition_attack(h, hists, o.threshold);
    for (const auto& w : rep.warnings)
        std::cerr << "warning: " << w << "\n";
    const std::string doc = dump(correlation_json(rep));
    if (o.out.empty())
        std::cout << doc;
    else
        write_file(o.out, doc);
    std::cerr << rep.victim << ": " << verdict_name(rep.verdict) << "\n";
    return ok;
}

int cmd_bruteforce(const Options& o)
{
    const Netlist golden = load_netlist(o.golden);
    const Netlist hybrid = load_netlist(o.easic_dir.empty() ? o.input : o.easic_dir);
    const auto r = brute_force_key(hybrid, golden, o.max_key_bits);
    const fs::path dir = o.out.empty() ? fs::path("attack_out") : fs::path(o.out);
    const auto ebs = write_ebs(r.key);
    write_file(dir / "recovered.ebs", std::string(ebs.begin(), ebs.end()));
    std::string bits;
    for (bool b : r.key.bits)
        bits.push_back(b ? '1' : '0');
    nlohmann::json j = {{"design", hybrid.name},
                        {"key_bits", r.key.total_len()},
                        {"trials", r.trials},
                        {"seconds", r.seconds},
                        {"key", bits},
                        {"chain", chain_manifest(r.key)["chain"]}};
    write_file(dir / "bruteforce.json", dump(j));
    std::cout << "recovered a " << r.key.total_len() << "-bit key after " << r.trials << " trials\n";
    return ok;
}

} // namespace

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw InternalError("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

int run(const std::vector<std::string>& args)
{
    CLI::App app{"eASIC obfuscation compiler"};
    app.require_subcommand(1);
    Options o;
    auto lib_opt = [&](CLI::App* c) {
        c->add_option("--lib", o.lib, "technology library JSON (default: $EASIC_LIB or built-in)");
    };

    auto* obf = app.add_subcommand("obfuscate", "convert a LUT netlist into an eASIC netlist");
    obf->add_option("--input", o.input, "LUT-mapped BLIF")->required();
    obf->add_option("--obf", o.obf, "percentage of LUTs that stay reconfigurable")->required();
    obf->add_option("--out", o.out, "output directory");
    obf->add_option("--seed", o.seed, "seed recorded in the manifest");
    lib_opt(obf);

    auto* sw = app.add_subcommand("sweep", "obfuscate at several levels and tabulate timing and area");
    sw->add_option("--input", o.input, "LUT-mapped BLIF")->required();
    sw->add_option("--levels", o.levels, "comma-separated obfuscation levels")->required();
    sw->add_option("--out", o.out, "CSV file (default: stdout)");
    sw->add_option("--jobs", o.jobs, "parallel levels");
    lib_opt(sw);

    auto* ver = app.add_subcommand("verify", "program an eASIC netlist and check it against the original");
    ver->add_option("--golden", o.golden, "original BLIF")->required();
    ver->add_option("--easic", o.easic_dir, "obfuscation output directory")->required();
    ver->add_option("--bitstream", o.bitstream, "bitstream file (default: <easic>/easic.ebs)");
    ver->add_option("--seed", o.seed, "stimulus seed");
    ver->add_option("--out", o.out, "report file (default: <easic>/verify.json)");

    auto* prog = app.add_subcommand("program", "write the programmed netlist as BLIF");
    prog->add_option("--easic", o.easic_dir, "obfuscation output directory")->required();
    prog->add_option("--bitstream", o.bitstream, "bitstream file (default: <easic>/easic.ebs)");
    prog->add_option("--out", o.out, "BLIF file (default: stdout)");

    auto* rep = app.add_subcommand("report", "timing, area and cell statistics of a netlist");
    rep->add_option("--input", o.input, "BLIF file or obfuscation output directory")->required();
    rep->add_option("--out", o.out, "JSON file (default: stdout)");
    lib_opt(rep);

    auto* hist = app.add_subcommand("histogram", "masking-pattern histogram");
    hist->add_option("--input", o.input, "BLIF file or obfuscation output directory")->required();
    hist->add_option("--scope", o.scope, "whole | static | reconfigurable");
    hist->add_option("--out", o.out, "JSON file (default: stdout)");
    hist->add_option("--csv", o.csv, "also write id,pattern,frequency CSV");

    auto* atk = app.add_subcommand("attack", "adversary analyses");
    atk->require_subcommand(1);
    auto* structural = atk->add_subcommand("structural", "pattern statistics of the exposed static portion");
    structural->add_option("--easic", o.easic_dir, "obfuscation output directory or eASIC BLIF")->required();
    structural->add_option("--corpus", o.corpus, "directory of known designs (BLIF or histogram JSON)");
    structural->add_option("--threshold", o.threshold, "correlation threshold");
    structural->add_option("--degree", o.degree, "trendline degree");
    structural->add_option("--out", o.out, "output directory");
    auto* comp = atk->add_subcommand("composition", "correlate the static portion against known designs");
    comp->add_option("--victim", o.victim, "obfuscation output directory or eASIC BLIF")->required();
    comp->add_option("--corpus", o.corpus, "directory of known designs (BLIF or histogram JSON)")->required();
    comp->add_option("--threshold", o.threshold, "correlation threshold");
    comp->add_option("--out", o.out, "JSON file (default: stdout)");
    auto* brute = atk->add_subcommand("bruteforce", "enumerate keys against a functional oracle");
    brute->add_option("--easic", o.easic_dir, "obfuscation output directory or eASIC BLIF")->required();
    brute->add_option("--golden", o.golden, "oracle BLIF")->required();
    brute->add_option("--max-key-bits", o.max_key_bits, "refuse longer keys");
    brute->add_option("--out", o.out, "output directory");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        if (!rev.empty())
            rev.pop_back();
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (obf->parsed())
            return cmd_obfuscate(o);
        if (sw->parsed())
            return cmd_sweep(o);
        if (ver->parsed())
            return cmd_verify(o);
        if (prog->parsed())
            return cmd_program(o);
        if (rep->parsed())
            return cmd_report(o);
        if (hist->parsed())
            return cmd_histogram(o);
        if (structural->parsed())
            return cmd_structural(o);
        if (comp->parsed())
            return cmd_composition(o);
        if (brute->parsed())
            return cmd_bruteforce(o);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return parse_error;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const ValidationError& e) {
        std::cerr << "invalid design: " << e.what() << "\n";
        return config_error;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal_error;
    }
    return internal_error;
}

} // namespace easic::cli
