#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>

#include "citefit/dist_core.hpp"
#include "citefit/fit.hpp"
#include "citefit/gof.hpp"
#include "citefit/histogram.hpp"

namespace citefit {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CountsFormat { raw, hist };

// raw: one citation count per line. hist: "count,frequency" lines. '#' starts
// a comment, blank lines are skipped. Observed count c maps to k = c + k_shift.
// Malformed input raises ParseError naming the file and line.
Histogram ingest_file(const std::string& path, CountsFormat format, int k_shift);
Histogram ingest_stream(std::istream& in, CountsFormat format, int k_shift,
                        const std::string& name);

// Raw-format writer, inverse of ingest: emits k - k_shift per line.
void write_samples(const std::string& path, std::span<const std::int64_t> ks, int k_shift);

// JSON round trip for fits. The document carries schema_version, family, M,
// params in canonical order, kmax, loglik, aic, chi2, dof, p_value, seed,
// converged, and the remaining FitResult diagnostics.
std::string fit_result_to_json(const FitResult& r);
FitResult fit_result_from_json(const std::string& text);
// Accepts either a full fit document or a bare model object.
ModelSpec model_from_json(const std::string& text);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Two-column CSV with full round-trip precision.
void write_curve_csv(const std::string& path, const CurveSeries& s, const std::string& x_name,
                     const std::string& y_name);
// Shared x column, one named column per series.
void write_table_csv(const std::string& path, const std::string& x_name,
                     std::span<const double> x, std::span<const std::string> names,
                     std::span<const CurveSeries> series);

std::string comparison_to_csv(std::span<const ComparisonRow> rows);
std::string comparison_to_json(std::span<const ComparisonRow> rows);

const char* family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& name);

}  // namespace citefit
