#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "awm/lorenz.hpp"

namespace awm {

struct HouseholdRecord {
    double weight = 0.0;   // population weight, raw scale
    double networth = 0.0; // may be negative
};

// Weighted household records standing for a sum of weighted point masses.
// Canonical form: weights sum to 1 and the weighted mean net worth is 1.
struct EmpiricalDistribution {
    std::vector<HouseholdRecord> records; // sorted by networth ascending
    bool normalized = false;
    std::vector<double> f_ord, l_ord; // Lorenz ordinates, filled on canonicalize
    std::size_t dropped_zero_weight = 0;
};

// Parses a `weight,networth` CSV stream (header required). Zero-weight rows
// are dropped and counted; malformed rows and negative weights raise
// ParseError carrying the line number.
EmpiricalDistribution load_households(std::istream& in);
EmpiricalDistribution load_households_file(const std::string& path);

// Concatenates two raw record sets (e.g. a survey and a rich list on the same
// absolute weight scale) and re-sorts. No reweighting is performed.
EmpiricalDistribution merge(const EmpiricalDistribution& base,
                            const EmpiricalDistribution& extra);

// Normalizes weights to probabilities and rescales net worths to unit
// weighted mean, then tabulates the Lorenz ordinates. Idempotent.
EmpiricalDistribution canonicalize(EmpiricalDistribution d);

// The ordinates as a piecewise-linear curve from (0,0) to (1,1); records tied
// in wealth are accumulated into a single ordinate.
LorenzCurve lorenz_ordinates(const EmpiricalDistribution& d);

} // namespace awm
