#include "awm/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "awm/errors.hpp"

namespace awm {

namespace {

void write_row(std::ostream& out, double a, double b) {
    char buf[64];
    int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", a, b);
    out.write(buf, len);
}

std::pair<std::vector<double>, std::vector<double>>
read_two_columns(std::istream& in, const std::string& expected_header) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line))
        throw ParseError("empty input: expected header '" + expected_header + "'");
    ++lineno;
    {
        std::string h = line;
        h.erase(std::remove_if(h.begin(), h.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                h.end());
        if (h != expected_header)
            throw ParseError("expected header '" + expected_header + "', got '" + line + "'",
                             lineno);
    }
    std::vector<double> col1, col2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("expected two comma-separated fields", lineno);
        auto parse = [&](std::string_view s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.remove_prefix(1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.remove_suffix(1);
            double v = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size())
                throw ParseError("could not parse number '" + std::string(s) + "'", lineno);
            return v;
        };
        col1.push_back(parse(std::string_view(line).substr(0, comma)));
        col2.push_back(parse(std::string_view(line).substr(comma + 1)));
    }
    if (col1.size() < 2)
        throw ParseError("need at least two data rows");
    return {std::move(col1), std::move(col2)};
}

nlohmann::json grid_values_json(const std::vector<double>& grid,
                                const std::vector<double>& values, const ParamMap& params) {
    nlohmann::json j;
    j["grid"] = grid;
    j["values"] = values;
    j["params"] = params;
    return j;
}

} // namespace

void write_lorenz_csv(const LorenzCurve& curve, std::ostream& out) {
    out << "f,l\n";
    for (std::size_t i = 0; i < curve.f.size(); ++i)
        write_row(out, curve.f[i], curve.l[i]);
}

LorenzCurve read_lorenz_csv(std::istream& in) {
    auto [f, l] = read_two_columns(in, "f,l");
    LorenzCurve curve;
    curve.f = std::move(f);
    curve.l = std::move(l);
    curve.terminal = curve.l.back();
    curve.is_supercritical = curve.terminal < 1.0 - 1e-9;
    return curve;
}

void write_density_csv(const CanonicalDensity& p, std::ostream& out) {
    out << "w,p\n";
    for (std::size_t i = 0; i < p.grid.size(); ++i)
        write_row(out, p.grid[i], p.density[i]);
}

CanonicalDensity read_density_csv(std::istream& in) {
    auto [w, pv] = read_two_columns(in, "w,p");
    CanonicalDensity d;
    d.grid = std::move(w);
    d.density = std::move(pv);
    d.support_lo = d.grid.front();
    d.n_total = measure_agents(d);
    d.w_total = measure_wealth(d);
    return d;
}

std::string lorenz_to_json(const LorenzCurve& curve, const ParamMap& params) {
    nlohmann::json j = grid_values_json(curve.f, curve.l, params);
    j["terminal"] = curve.terminal;
    return j.dump(2);
}

LorenzCurve lorenz_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    LorenzCurve curve;
    try {
        curve.f = j.at("grid").get<std::vector<double>>();
        curve.l = j.at("values").get<std::vector<double>>();
        curve.terminal = j.contains("terminal") && !j["terminal"].is_null()
                             ? j["terminal"].get<double>()
                             : curve.l.back();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad Lorenz JSON: ") + e.what());
    }
    if (curve.f.size() != curve.l.size() || curve.f.size() < 2)
        throw ParseError("Lorenz JSON needs matching grid/values arrays");
    curve.is_supercritical = curve.terminal < 1.0 - 1e-9;
    return curve;
}

std::string density_to_json(const CanonicalDensity& p, const ParamMap& params) {
    ParamMap full = params;
    full["support_lo"] = p.support_lo;
    full["n_total"] = p.n_total;
    full["w_total"] = p.w_total;
    nlohmann::json j = grid_values_json(p.grid, p.density, full);
    j["terminal"] = nullptr; // a density has no right-boundary Lorenz value
    return j.dump(2);
}

CanonicalDensity density_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    CanonicalDensity d;
    try {
        d.grid = j.at("grid").get<std::vector<double>>();
        d.density = j.at("values").get<std::vector<double>>();
        const auto& params = j.at("params");
        d.support_lo = params.contains("support_lo") ? params["support_lo"].get<double>()
                                                     : d.grid.front();
        d.n_total = params.contains("n_total") ? params["n_total"].get<double>()
                                               : measure_agents(d);
        d.w_total = params.contains("w_total") ? params["w_total"].get<double>()
                                               : measure_wealth(d);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad density JSON: ") + e.what());
    }
    if (d.grid.size() != d.density.size() || d.grid.size() < 2)
        throw ParseError("density JSON needs matching grid/values arrays");
    return d;
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

std::string load_text(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_lorenz_csv(const LorenzCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    write_lorenz_csv(curve, out);
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

LorenzCurve load_lorenz_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    return read_lorenz_csv(in);
}

void save_density_csv(const CanonicalDensity& p, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    write_density_csv(p, out);
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

} // namespace awm
