#pragma once

#include "conjresp/field.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace conjresp::io {

/// {"dim": n, "resolution": [N...], "values": [...]}, row-major, axis 0 slowest.
nlohmann::json field_to_json(const ScalarField& field);
ScalarField field_from_json(const nlohmann::json& j);

/// One row per grid point: x1[,x2],value with 17 significant digits.
void write_field_csv(std::ostream& os, const ScalarField& field);

/// Shortest round-trip text for a double at 17 significant digits.
std::string format_real(double value);

}  // namespace conjresp::io
