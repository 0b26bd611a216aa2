#pragma once
#include <string>
#include <utility>
#include <vector>

#include "qwalk/errors.hpp"

namespace qwalk {

// Shortest decimal string that round-trips to the same double (to_chars).
// Infinities and NaN render as "inf"/"-inf"/"nan" and parse back the same.
std::string format_double(double value);

// Parse a number back; accepts everything format_double emits plus ordinary
// decimal/scientific literals.  Throws io_error on trailing garbage.
double parse_double(const std::string& text);

// Angle expressions: symbolic multiples of pi parsed exactly, so configs can
// say "pi/4" instead of a truncated decimal.  Grammar (case-insensitive):
//   [sign] [coefficient] ["pi"] ["/" divisor]
// Examples: "pi/4", "2pi", "-3pi/2", "0.1pi", "pi", "0", "1.25", "1e-3".
// A bare number without "pi" is taken in radians.  Throws io_error on
// anything else.
double parse_pi_expression(const std::string& text);

// CSV with '#'-prefixed metadata lines, then one header row of column names,
// then numeric rows.  Example:
//   # command=evolve
//   # seed=1
//   t,P0
//   0,1
//   1,0.5
struct CsvTable {
    std::vector<std::pair<std::string, std::string>> metadata;  // in file order
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // each row has columns.size() cells

    void add_meta(const std::string& key, double value);
    void add_meta(const std::string& key, const std::string& value);
    // First metadata value for `key`, or throws io_error when absent.
    const std::string& meta(const std::string& key) const;
    bool has_meta(const std::string& key) const;

    // Column position by name; throws io_error when absent.
    std::size_t column_index(const std::string& name) const;
    std::vector<double> column_values(const std::string& name) const;
};

// Parse; throws io_error for unreadable files, metadata lines without '=',
// rows whose cell count disagrees with the header, or non-numeric cells.
CsvTable read_csv(const std::string& path);

// Write with format_double cells.  Deterministic: equal tables give
// byte-identical files.  Throws io_error when the file cannot be written.
void write_csv(const std::string& path, const CsvTable& table);

// Whole-file helpers used by the CLI for JSON sidecars (content is produced
// and consumed as strings; JSON structure lives with the caller).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qwalk
