#pragma once

// Field file format (JSON):
//
//   {"dim": n,
//    "points": [{"weight": w, "reference_metric": [...], "matrix": [...]}, ...]}
//
// Matrices are upper-triangle row-major lists of n(n+1)/2 numbers; full
// row-major n*n lists are accepted on input and must be symmetric.
// "reference_metric" may be omitted (identity). Readers reject malformed
// entries with an InputError naming the point index.

#include "metricspace/fields.hpp"

#include <string>

namespace metricspace {

MetricField parse_field(const std::string& text, double spd_eps = kDefaultSpdEps);
MetricField read_field_file(const std::string& path, double spd_eps = kDefaultSpdEps);

/// Deterministic serialization (fixed key order, shortest round-trip numbers).
std::string format_field(const MetricField& g);
void write_field_file(const std::string& path, const MetricField& g);

}  // namespace metricspace
