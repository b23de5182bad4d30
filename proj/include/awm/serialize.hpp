#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "awm/density.hpp"
#include "awm/lorenz.hpp"

namespace awm {

// Text formats: CSV with a header row (`f,l` for curves, `w,p` for
// densities) and a JSON object {grid, values, terminal, params}. Values are
// written with enough digits that a decimal round trip preserves at least 15
// significant figures.

void write_lorenz_csv(const LorenzCurve& curve, std::ostream& out);
LorenzCurve read_lorenz_csv(std::istream& in);

void write_density_csv(const CanonicalDensity& p, std::ostream& out);
CanonicalDensity read_density_csv(std::istream& in);

using ParamMap = std::map<std::string, double>;

std::string lorenz_to_json(const LorenzCurve& curve, const ParamMap& params = {});
LorenzCurve lorenz_from_json(const std::string& text);

std::string density_to_json(const CanonicalDensity& p, const ParamMap& params = {});
CanonicalDensity density_from_json(const std::string& text);

// File helpers; these throw IoError when the path cannot be opened.
void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);
void save_lorenz_csv(const LorenzCurve& curve, const std::string& path);
LorenzCurve load_lorenz_csv(const std::string& path);
void save_density_csv(const CanonicalDensity& p, const std::string& path);

} // namespace awm
