#pragma once

// JSON (de)serialization for the domain types and deterministic CSV output.
//
//   measures:   {"type":"atomic","atoms":[[x,w],...]}
//               {"type":"grid","x0":...,"dx":...,"values":[...]}
//   cumulants:  {"kappa":[...]}
//   coefficients: {"a":[...],"b":[...]}

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "freeforms/admissibility.hpp"
#include "freeforms/common.hpp"
#include "freeforms/cumulants.hpp"
#include "freeforms/linear_forms.hpp"
#include "freeforms/measures.hpp"

namespace freeforms {

using json = nlohmann::json;

inline json to_json(const AtomicMeasure& mu) {
    json atoms = json::array();
    for (const Atom& a : mu.atoms()) atoms.push_back({a.position, a.weight});
    return json{{"type", "atomic"}, {"atoms", std::move(atoms)}};
}

inline json to_json(const GridDensity& mu) {
    return json{{"type", "grid"}, {"x0", mu.x0()}, {"dx", mu.dx()}, {"values", mu.values()}};
}

inline json to_json(const Measure& mu) {
    return std::visit([](const auto& v) { return to_json(v); }, mu);
}

inline Measure measure_from_json(const json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "atomic") {
            std::vector<Atom> atoms;
            for (const auto& entry : j.at("atoms")) {
                require(entry.is_array() && entry.size() == 2, "measure json: each atom is [position, weight]");
                atoms.push_back(Atom{entry[0].get<double>(), entry[1].get<double>()});
            }
            return AtomicMeasure(std::move(atoms));
        }
        if (type == "grid") {
            return GridDensity(j.at("x0").get<double>(), j.at("dx").get<double>(),
                               j.at("values").get<std::vector<double>>());
        }
        throw validation_error("measure json: type must be 'atomic' or 'grid'");
    } catch (const json::exception& e) {
        throw validation_error(std::string("measure json: ") + e.what());
    }
}

inline json to_json(const CumulantSeq& k) { return json{{"kappa", k.entries()}}; }

inline CumulantSeq cumulants_from_json(const json& j) {
    try {
        if (j.is_array()) return CumulantSeq(j.get<std::vector<double>>());
        return CumulantSeq(j.at("kappa").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw validation_error(std::string("cumulant json: ") + e.what());
    }
}

inline json to_json(const CoeffPair& cp) { return json{{"a", cp.a()}, {"b", cp.b()}}; }

inline CoeffPair coeffs_from_json(const json& j) {
    try {
        return CoeffPair(j.at("a").get<std::vector<double>>(), j.at("b").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw validation_error(std::string("coefficient json: ") + e.what());
    }
}

inline json to_json(const AdmissibilityVerdict& v) {
    return json{{"status", to_string(v.status)},
                {"margin", v.margin},
                {"resolution",
                 json{{"n_r", v.resolution.n_r},
                      {"n_theta", v.resolution.n_theta},
                      {"eps", v.resolution.eps},
                      {"R", v.resolution.R}}}};
}

inline json to_json(const FreenessReport& r) {
    json residuals = json::array();
    for (const auto& [key, value] : r.residuals) {
        const auto& [s, l, t] = key;
        residuals.push_back(json{{"s", s}, {"l", l}, {"t", t}, {"residual", value}});
    }
    json tails = json::array();
    for (const auto& [j, s] : r.tail_violations) tails.push_back(json{{"variable", j}, {"order", s}});
    return json{{"verdict", r.verdict},
                {"tol", r.tol},
                {"max_residual", r.max_residual()},
                {"residuals", std::move(residuals)},
                {"tail_violations", std::move(tails)}};
}

// Fixed shortest-round-trip formatting keeps CSV output byte-stable.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot open file for writing: " + path);
    out << content;
}

inline json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    require(!j.is_discarded(), "invalid JSON in " + what);
    return j;
}

// Inline JSON if the argument starts with '[' or '{', otherwise a file path.
inline json json_from_arg(const std::string& arg, const std::string& what) {
    if (!arg.empty() && (arg.front() == '[' || arg.front() == '{'))
        return parse_json(arg, what);
    return parse_json(read_text_file(arg), what);
}

struct CsvWriter {
    std::ostringstream out;

    explicit CsvWriter(const std::vector<std::string>& header_comments = {}) {
        for (const std::string& line : header_comments) out << "# " << line << "\n";
    }
    void columns(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
        out << "\n";
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << format_double(values[i]);
        out << "\n";
    }
    std::string str() const { return out.str(); }
};

} // namespace freeforms
