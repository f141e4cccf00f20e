#include "conjresp/io.hpp"

#include "conjresp/errors.hpp"

#include <cstdio>
#include <ostream>

namespace conjresp::io {

nlohmann::json field_to_json(const ScalarField& field) {
    const TorusGrid& g = field.grid();
    nlohmann::json res = nlohmann::json::array();
    for (int a = 0; a < g.dim(); ++a) res.push_back(g.size(a));
    return {{"dim", g.dim()},
            {"resolution", res},
            {"values", std::vector<double>(field.values().begin(), field.values().end())}};
}

ScalarField field_from_json(const nlohmann::json& j) {
    try {
        int dim = j.at("dim").get<int>();
        auto res = j.at("resolution").get<std::vector<int>>();
        if (static_cast<int>(res.size()) != dim)
            throw ConfigError("field JSON: resolution length does not match dim");
        TorusGrid grid(dim, {res[0], dim == 2 ? res[1] : 1});
        return ScalarField(grid, j.at("values").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("field JSON: ") + e.what());
    }
}

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_field_csv(std::ostream& os, const ScalarField& field) {
    const TorusGrid& g = field.grid();
    os << (g.dim() == 1 ? "x1,value\n" : "x1,x2,value\n");
    for (std::size_t i = 0; i < field.size(); ++i) {
        Vec p = g.point(i);
        os << format_real(p[0]) << ',';
        if (g.dim() == 2) os << format_real(p[1]) << ',';
        os << format_real(field[i]) << '\n';
    }
}

}  // namespace conjresp::io
