#include "awm/empirical.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "awm/errors.hpp"

namespace awm {

namespace {

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, std::size_t line) {
    field = trimmed(field);
    if (field.empty())
        throw ParseError("empty numeric field", line);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("could not parse number '" + std::string(field) + "'", line);
    return value;
}

void sort_records(std::vector<HouseholdRecord>& records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const HouseholdRecord& a, const HouseholdRecord& b) {
                         return a.networth < b.networth;
                     });
}

} // namespace

EmpiricalDistribution load_households(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line))
        throw ParseError("empty input: expected a weight,networth header");
    ++lineno;
    {
        std::string header = line;
        header.erase(std::remove_if(header.begin(), header.end(),
                                    [](unsigned char c) { return std::isspace(c); }),
                     header.end());
        std::transform(header.begin(), header.end(), header.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (header != "weight,networth")
            throw ParseError("expected header 'weight,networth', got '" + line + "'", lineno);
    }

    EmpiricalDistribution d;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty())
            continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("expected two comma-separated fields", lineno);
        if (line.find(',', comma + 1) != std::string::npos)
            throw ParseError("expected exactly two fields", lineno);
        const double weight = parse_number(std::string_view(line).substr(0, comma), lineno);
        const double networth = parse_number(std::string_view(line).substr(comma + 1), lineno);
        if (!std::isfinite(weight) || !std::isfinite(networth))
            throw ParseError("non-finite value", lineno);
        if (weight < 0.0)
            throw ParseError("negative weight", lineno);
        if (weight == 0.0) {
            ++d.dropped_zero_weight;
            continue;
        }
        d.records.push_back(HouseholdRecord{weight, networth});
    }
    if (d.records.empty())
        throw ParseError("no usable records in input");
    sort_records(d.records);
    return d;
}

EmpiricalDistribution load_households_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    return load_households(in);
}

EmpiricalDistribution merge(const EmpiricalDistribution& base,
                            const EmpiricalDistribution& extra) {
    EmpiricalDistribution out;
    out.records = base.records;
    out.records.insert(out.records.end(), extra.records.begin(), extra.records.end());
    out.dropped_zero_weight = base.dropped_zero_weight + extra.dropped_zero_weight;
    sort_records(out.records);
    return out;
}

EmpiricalDistribution canonicalize(EmpiricalDistribution d) {
    if (d.records.empty())
        throw DomainError("cannot canonicalize an empty distribution");
    sort_records(d.records);

    double total_weight = 0.0;
    for (const auto& r : d.records)
        total_weight += r.weight;
    if (!(total_weight > 0.0))
        throw DomainError("total weight must be positive");

    double mean = 0.0;
    for (auto& r : d.records) {
        r.weight /= total_weight;
        mean += r.weight * r.networth;
    }
    if (!(mean > 0.0))
        throw DomainError("total wealth must be positive to canonicalize");
    for (auto& r : d.records)
        r.networth /= mean;

    // Ordinates: cumulative sums over ascending wealth, ties pooled.
    d.f_ord.clear();
    d.l_ord.clear();
    double f = 0.0, l = 0.0;
    std::size_t i = 0;
    const std::size_t n = d.records.size();
    while (i < n) {
        std::size_t j = i;
        while (j < n && d.records[j].networth == d.records[i].networth)
            ++j;
        for (std::size_t k = i; k < j; ++k) {
            f += d.records[k].weight;
            l += d.records[k].weight * d.records[k].networth;
        }
        d.f_ord.push_back(f);
        d.l_ord.push_back(l);
        i = j;
    }
    d.f_ord.back() = 1.0;
    d.l_ord.back() = 1.0;
    d.normalized = true;
    return d;
}

LorenzCurve lorenz_ordinates(const EmpiricalDistribution& d) {
    if (!d.normalized || d.f_ord.empty())
        throw DomainError("lorenz_ordinates requires a canonicalized distribution");
    LorenzCurve curve;
    curve.f.reserve(d.f_ord.size() + 1);
    curve.l.reserve(d.f_ord.size() + 1);
    curve.f.push_back(0.0);
    curve.l.push_back(0.0);
    curve.f.insert(curve.f.end(), d.f_ord.begin(), d.f_ord.end());
    curve.l.insert(curve.l.end(), d.l_ord.begin(), d.l_ord.end());
    curve.terminal = 1.0;
    curve.is_supercritical = false;
    return curve;
}

} // namespace awm
