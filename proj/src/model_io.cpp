#include "ladder/model_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>

#include "ladder/error.hpp"

namespace ladder {
namespace {

using nlohmann::json;

double number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    return parse_probability(j.at(key));
}

double required(const json& j, const char* key) {
    if (!j.contains(key)) throw DomainError(std::string("model spec: missing field '") + key + "'");
    return parse_probability(j.at(key));
}

std::int64_t integer(const json& j, const char* key) {
    double v = required(j, key);
    if (v != std::floor(v)) throw DomainError(std::string("model spec: '") + key + "' must be an integer");
    return static_cast<std::int64_t>(v);
}

IncrementModel lattice_from_json(const json& j) {
    double span = number(j, "span", 1.0);
    double drift = number(j, "drift", 0.0);
    if (!j.contains("mass")) throw DomainError("model spec: lattice needs 'mass'");
    const json& mj = j.at("mass");
    std::string name = j.value("name", std::string("lattice"));
    if (mj.is_array()) {
        std::vector<double> mass;
        for (const auto& v : mj) mass.push_back(parse_probability(v));
        return make_lattice(span, j.contains("lo") ? integer(j, "lo") : 0, std::move(mass), drift, name);
    }
    if (!mj.is_object() || mj.empty()) throw DomainError("model spec: 'mass' must be an array or index map");
    std::map<std::int64_t, double> table;
    for (const auto& [k, v] : mj.items()) {
        std::int64_t idx = 0;
        auto res = std::from_chars(k.data(), k.data() + k.size(), idx);
        if (res.ec != std::errc() || res.ptr != k.data() + k.size())
            throw DomainError("model spec: mass key '" + k + "' is not an integer index");
        table[idx] = parse_probability(v);
    }
    std::int64_t lo = table.begin()->first, hi = table.rbegin()->first;
    std::vector<double> mass(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (const auto& [k, v] : table) mass[static_cast<std::size_t>(k - lo)] = v;
    return make_lattice(span, lo, std::move(mass), drift, name);
}

}  // namespace

double parse_probability(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw DomainError("expected a number or decimal string");
    const std::string s = v.get<std::string>();
    // strtod rounds decimal literals correctly, so the string form is exact up to the nearest double.
    char* end = nullptr;
    double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x))
        throw DomainError("not a decimal literal: '" + s + "'");
    return x;
}

IncrementModel model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw DomainError("model spec: object with 'kind' required");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "lattice") return lattice_from_json(j);
    if (kind == "pbiased") return make_pbiased(required(j, "a"));
    if (kind == "pm1") return make_symmetric_pm1(number(j, "drift", 0.0));
    if (kind == "gaussian") {
        double drift = number(j, "drift", 0.0);
        if (j.contains("span")) return discretize_gaussian(required(j, "span"), number(j, "cutoff", 8.5), drift);
        return make_gaussian_unit(drift);
    }
    if (kind == "pareto")
        return make_pareto(required(j, "t"), required(j, "scale"), integer(j, "x_max"), number(j, "span", 1.0),
                           number(j, "drift", 0.0));
    throw DomainError("model spec: unknown kind '" + kind + "'");
}

IncrementModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open model file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DomainError("model file " + path + ": " + e.what());
    }
    return model_from_json(j);
}

json model_to_json(const IncrementModel& m) {
    json j;
    j["name"] = m.name;
    j["drift"] = m.drift;
    switch (m.kind) {
        case ModelKind::GaussianUnit:
            j["kind"] = "gaussian";
            return j;
        case ModelKind::ParetoTail:
            j["kind"] = "pareto";
            j["t"] = m.tail_exponent;
            j["scale"] = m.tail_scale;
            j["x_max"] = m.hi();
            j["span"] = m.span;
            return j;
        case ModelKind::Lattice:
            break;
    }
    if (m.pre_drifted) {
        j["kind"] = "pbiased";
        j["a"] = m.drift;
        return j;
    }
    j["kind"] = "lattice";
    j["span"] = m.span;
    json mass = json::object();
    for (std::size_t i = 0; i < m.mass.size(); ++i)
        if (m.mass[i] != 0.0) mass[std::to_string(m.lo + static_cast<std::int64_t>(i))] = format_double(m.mass[i]);
    j["mass"] = mass;
    return j;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) {
    for (const auto& h : header) cell(h);
    end_row();
}

void CsvWriter::sep() {
    if (!first_) os_ << ',';
    first_ = false;
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    os_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    sep();
    if (v.find_first_of(",\"\n") == std::string::npos) {
        os_ << v;
    } else {
        os_ << '"';
        for (char c : v) os_ << (c == '"' ? "\"\"" : std::string(1, c));
        os_ << '"';
    }
    return *this;
}

void CsvWriter::end_row() {
    os_ << '\n';
    first_ = true;
}

}  // namespace ladder
