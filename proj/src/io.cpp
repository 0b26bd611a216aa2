#include "qwalk/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qwalk {

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double_view(std::string_view sv, const std::string& context) {
    // Trim ASCII whitespace.
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front())))
        sv.remove_prefix(1);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back())))
        sv.remove_suffix(1);
    if (sv.empty()) throw io_error("empty number in " + context);
    double out = 0.0;
    auto res = std::from_chars(sv.data(), sv.data() + sv.size(), out);
    if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size())
        throw io_error("bad number '" + std::string(sv) + "' in " + context);
    return out;
}

}  // namespace

double parse_double(const std::string& text) {
    return parse_double_view(text, "input");
}

double parse_pi_expression(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (s.empty()) throw io_error("empty angle expression");

    double sign = 1.0;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        if (s[pos] == '-') sign = -1.0;
        ++pos;
    }

    auto pi_at = s.find("pi", pos);
    if (pi_at == std::string::npos) {
        // Plain radians, possibly "a/b".
        auto slash = s.find('/', pos);
        if (slash == std::string::npos)
            return sign * parse_double_view(std::string_view(s).substr(pos),
                                            "angle '" + text + "'");
        double num = parse_double_view(
            std::string_view(s).substr(pos, slash - pos), "angle '" + text + "'");
        double den = parse_double_view(std::string_view(s).substr(slash + 1),
                                       "angle '" + text + "'");
        if (den == 0.0) throw io_error("division by zero in angle '" + text + "'");
        return sign * num / den;
    }

    double coeff = 1.0;
    if (pi_at > pos) {
        auto head = std::string_view(s).substr(pos, pi_at - pos);
        if (!head.empty() && head.back() == '*') head.remove_suffix(1);
        if (!head.empty())
            coeff = parse_double_view(head, "angle '" + text + "'");
    }
    double value = coeff * 3.14159265358979323846;

    std::size_t rest = pi_at + 2;
    if (rest < s.size()) {
        if (s[rest] != '/')
            throw io_error("unexpected text after pi in angle '" + text + "'");
        double den = parse_double_view(std::string_view(s).substr(rest + 1),
                                       "angle '" + text + "'");
        if (den == 0.0) throw io_error("division by zero in angle '" + text + "'");
        value /= den;
    }
    if (!std::isfinite(value))
        throw io_error("angle '" + text + "' is not finite");
    return sign * value;
}

void CsvTable::add_meta(const std::string& key, double value) {
    metadata.emplace_back(key, format_double(value));
}

void CsvTable::add_meta(const std::string& key, const std::string& value) {
    metadata.emplace_back(key, value);
}

const std::string& CsvTable::meta(const std::string& key) const {
    for (const auto& kv : metadata)
        if (kv.first == key) return kv.second;
    throw io_error("metadata key '" + key + "' not found");
}

bool CsvTable::has_meta(const std::string& key) const {
    for (const auto& kv : metadata)
        if (kv.first == key) return true;
    return false;
}

std::size_t CsvTable::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw io_error("column '" + name + "' not found");
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
    auto idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[idx]);
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    bool header_done = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string where = path + ":" + std::to_string(lineno);
        if (line[0] == '#') {
            std::size_t start = 1;
            while (start < line.size() && line[start] == ' ') ++start;
            auto eq = line.find('=', start);
            if (eq == std::string::npos)
                throw io_error("metadata line without '=' at " + where);
            table.metadata.emplace_back(line.substr(start, eq - start),
                                        line.substr(eq + 1));
            continue;
        }
        std::vector<std::string> cells;
        std::size_t from = 0;
        while (true) {
            auto comma = line.find(',', from);
            cells.push_back(line.substr(from, comma - from));
            if (comma == std::string::npos) break;
            from = comma + 1;
        }
        if (!header_done) {
            table.columns = std::move(cells);
            if (table.columns.empty() || table.columns[0].empty())
                throw io_error("empty header at " + where);
            header_done = true;
            continue;
        }
        if (cells.size() != table.columns.size())
            throw io_error("row with " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(table.columns.size()) +
                           " at " + where);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_double_view(c, where));
        table.rows.push_back(std::move(row));
    }
    if (!header_done) throw io_error("no header row in '" + path + "'");
    return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ostringstream out;
    for (const auto& kv : table.metadata)
        out << "# " << kv.first << '=' << kv.second << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    write_text_file(path, out.str());
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw io_error("write to '" + path + "' failed");
}

}  // namespace qwalk
