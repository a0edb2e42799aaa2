#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "ladder/increments.hpp"

namespace ladder {

inline constexpr const char* kCodeVersion = "0.3.0";

// Model spec: {"kind": "lattice"|"pbiased"|"gaussian"|"pareto", ...}.
//   lattice:  span, mass as {"k": "decimal", ...} keyed by lattice index, or
//             an array together with "lo"
//   pbiased:  a
//   gaussian: optional "span" for a lattice discretization, "cutoff"
//   pareto:   t, scale, x_max, span
// All kinds accept "drift". Probabilities may be numbers or decimal strings.
IncrementModel model_from_json(const nlohmann::json& j);
IncrementModel load_model(const std::string& path);
nlohmann::json model_to_json(const IncrementModel& m);

// Parses a decimal literal such as "0.125" or "1e-3"; throws DomainError.
double parse_probability(const nlohmann::json& v);

// Minimal CSV writer with round-trip precision for doubles.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(const std::string& v);
    void end_row();

private:
    void sep();
    std::ostream& os_;
    bool first_ = true;
};

std::string format_double(double v);

}  // namespace ladder
