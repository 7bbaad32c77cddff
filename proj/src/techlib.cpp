#include "easic/techlib.hpp"

#include "easic/error.hpp"

#include <fstream>
#include <set>

namespace easic {

Delay TechLibrary::gate_delay(CellKind kind) const
{
    auto it = gates.find(kind);
    if (it == gates.end())
        throw ConfigError("library has no entry for " + std::string(kind_name(kind)));
    return it->second.delay;
}

double TechLibrary::gate_area(CellKind kind) const
{
    auto it = gates.find(kind);
    if (it == gates.end())
        throw ConfigError("library has no entry for " + std::string(kind_name(kind)));
    return it->second.area;
}

std::vector<std::string> TechLibrary::calibration_violations() const
{
    std::vector<std::string> out;
    const Delay mux = gate_delay(CellKind::Mux2);
    for (unsigned n = 1; n <= LutMask::max_width; ++n)
        if (lut_delay(n) < mux * n)
            out.push_back("LUT" + std::to_string(n));
    return out;
}

bool TechLibrary::calibrated() const
{
    return calibration_violations().empty();
}

nlohmann::json TechLibrary::to_json() const
{
    nlohmann::json j;
    for (CellKind kind : gate_kinds) {
        const auto& t = gates.at(kind);
        j["gates"][std::string(kind_name(kind))] = {{"delay_ns", t.delay.ns()}, {"area_um2", t.area}};
    }
    for (unsigned n = 1; n <= LutMask::max_width; ++n)
        j["luts"][std::to_string(n)] = {{"delay_ns", luts[n].delay.ns()}, {"area_um2", luts[n].area}};
    j["ff"] = {{"clk2q_ns", ff_clk2q.ns()}, {"setup_ns", ff_setup.ns()}, {"area_um2", ff_area}};
    return j;
}

TechLibrary default_library()
{
    TechLibrary lib;
    auto gate = [&](CellKind k, double ns, double area) { lib.gates[k] = {Delay::from_ns(ns), area}; };
    gate(CellKind::Inv, 0.015, 1.08);
    gate(CellKind::Buf, 0.025, 1.44);
    gate(CellKind::And2, 0.035, 1.80);
    gate(CellKind::Or2, 0.035, 1.80);
    gate(CellKind::Nand2, 0.020, 1.44);
    gate(CellKind::Nor2, 0.025, 1.44);
    gate(CellKind::Mux2, 0.050, 2.88);
    gate(CellKind::Tie0, 0.000, 0.72);
    gate(CellKind::Tie1, 0.000, 0.72);
    const double lut_ns[] = {0, 0.100, 0.140, 0.180, 0.220, 0.270, 0.310};
    const double lut_um2[] = {0, 62.0, 98.0, 160.0, 262.0, 358.0, 455.0};
    for (unsigned n = 1; n <= LutMask::max_width; ++n)
        lib.luts[n] = {Delay::from_ns(lut_ns[n]), lut_um2[n]};
    lib.ff_clk2q = Delay::from_ns(0.080);
    lib.ff_setup = Delay::from_ns(0.040);
    lib.ff_area = 5.40;
    return lib;
}

namespace {

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object())
        throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const nlohmann::json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key))
        throw ConfigError(where + " is missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (x < 0)
        throw ConfigError(where + "." + key + " is negative");
    return x;
}

CellTiming timing_entry(const nlohmann::json& obj, const std::string& where)
{
    reject_unknown(obj, {"delay_ns", "area_um2"}, where);
    CellTiming t{Delay::from_ns(number(obj, "delay_ns", where)), number(obj, "area_um2", where)};
    if (t.area <= 0)
        throw ConfigError(where + ".area_um2 must be positive");
    return t;
}

} // namespace

TechLibrary load_library(const nlohmann::json& config)
{
    reject_unknown(config, {"gates", "luts", "ff"}, "library");
    for (const char* section : {"gates", "luts", "ff"})
        if (!config.contains(section))
            throw ConfigError(std::string("library is missing section '") + section + "'");

    TechLibrary lib;
    const auto& gates = config.at("gates");
    std::set<std::string> gate_names;
    for (CellKind kind : gate_kinds)
        gate_names.insert(std::string(kind_name(kind)));
    reject_unknown(gates, gate_names, "gates");
    for (CellKind kind : gate_kinds) {
        const std::string name(kind_name(kind));
        if (!gates.contains(name))
            throw ConfigError("gates is missing " + name);
        lib.gates[kind] = timing_entry(gates.at(name), "gates." + name);
    }

    const auto& luts = config.at("luts");
    reject_unknown(luts, {"1", "2", "3", "4", "5", "6"}, "luts");
    for (unsigned n = 1; n <= LutMask::max_width; ++n) {
        const std::string key = std::to_string(n);
        if (!luts.contains(key))
            throw ConfigError("luts is missing LUT" + key);
        lib.luts[n] = timing_entry(luts.at(key), "luts." + key);
    }

    const auto& ff = config.at("ff");
    reject_unknown(ff, {"clk2q_ns", "setup_ns", "area_um2"}, "ff");
    lib.ff_clk2q = Delay::from_ns(number(ff, "clk2q_ns", "ff"));
    lib.ff_setup = Delay::from_ns(number(ff, "setup_ns", "ff"));
    lib.ff_area = number(ff, "area_um2", "ff");
    if (lib.ff_area <= 0)
        throw ConfigError("ff.area_um2 must be positive");

    lib.calibration_warning = !lib.calibrated();
    return lib;
}

TechLibrary load_library_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open library file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("library file " + path.string() + " is not valid JSON: " + e.what());
    }
    return load_library(j);
}

Delay cell_delay(const TechLibrary& lib, const Cell& cell)
{
    switch (cell.kind) {
    case CellKind::Lut:
        return lib.lut_delay(cell.mask.width());
    case CellKind::Ff:
        return lib.ff_clk2q;
    default:
        return lib.gate_delay(cell.kind);
    }
}

double cell_area(const TechLibrary& lib, const Cell& cell)
{
    switch (cell.kind) {
    case CellKind::Lut:
        return lib.lut_area(cell.mask.width());
    case CellKind::Ff:
        return lib.ff_area;
    default:
        return lib.gate_area(cell.kind);
    }
}

} // namespace easic
