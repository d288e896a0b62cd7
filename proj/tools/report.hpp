#pragma once

// Tabular run reports rendered as human-readable text, CSV (17 significant
// digits, seed and index columns first) or structured key = value text.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace triple_lab::cli {

using Cell = std::variant<std::string, double, long long, bool>;

struct Table {
    std::string name;
    std::vector<std::string> columns; // columns[0] is the row index column
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

enum class Format { human, csv, structured };

struct Report {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<Table> tables;
    std::vector<std::string> notes;
};

inline std::string format_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::string render_cell(const Cell& c, int digits) {
    if (const auto* s = std::get_if<std::string>(&c)) {
        return *s;
    }
    if (const auto* d = std::get_if<double>(&c)) {
        return format_double(*d, digits);
    }
    if (const auto* i = std::get_if<long long>(&c)) {
        return std::to_string(*i);
    }
    return std::get<bool>(c) ? "true" : "false";
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return out + "\"";
}

inline void write_csv(std::ostream& os, const Report& r, const std::string& version) {
    os << "# triple-lab " << version << "\n";
    os << "# command=" << r.command << "\n";
    os << "# seed=" << r.seed << "\n";
    for (const auto& [k, v] : r.config) {
        os << "# config " << k << "=" << v << "\n";
    }
    for (const Table& t : r.tables) {
        os << "# table " << t.name << "\n";
        os << "seed";
        for (const std::string& c : t.columns) {
            os << "," << c;
        }
        os << "\n";
        for (const auto& row : t.rows) {
            os << r.seed;
            for (const Cell& c : row) {
                os << "," << csv_escape(render_cell(c, 17));
            }
            os << "\n";
        }
    }
    for (const std::string& n : r.notes) {
        os << "# note " << n << "\n";
    }
}

inline void write_structured(std::ostream& os, const Report& r, const std::string& version) {
    os << "[run]\n";
    os << "tool = triple-lab\nversion = " << version << "\ncommand = " << r.command << "\nseed = " << r.seed << "\n";
    for (const auto& [k, v] : r.config) {
        os << "config." << k << " = " << v << "\n";
    }
    for (const Table& t : r.tables) {
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            os << "\n[" << t.name << "." << i << "]\n";
            for (std::size_t j = 0; j < t.columns.size(); ++j) {
                os << t.columns[j] << " = " << render_cell(t.rows[i][j], 17) << "\n";
            }
        }
    }
    if (!r.notes.empty()) {
        os << "\n[notes]\n";
        for (std::size_t i = 0; i < r.notes.size(); ++i) {
            os << "note." << i << " = " << r.notes[i] << "\n";
        }
    }
}

inline void write_human(std::ostream& os, const Report& r, const std::string& version) {
    os << "triple-lab " << version << "  command: " << r.command << "  seed: " << r.seed << "\n";
    os << "config:";
    for (const auto& [k, v] : r.config) {
        os << " " << k << "=" << v;
    }
    os << "\n";
    for (const Table& t : r.tables) {
        os << "\n== " << t.name << " ==\n";
        std::vector<std::size_t> width(t.columns.size());
        std::vector<std::vector<std::string>> cells;
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            width[j] = t.columns[j].size();
        }
        for (const auto& row : t.rows) {
            std::vector<std::string> line;
            for (std::size_t j = 0; j < row.size(); ++j) {
                line.push_back(render_cell(row[j], 10));
                width[j] = std::max(width[j], line.back().size());
            }
            cells.push_back(std::move(line));
        }
        auto emit = [&](const std::vector<std::string>& line) {
            for (std::size_t j = 0; j < line.size(); ++j) {
                os << (j ? "  " : "") << line[j];
                if (j + 1 < line.size()) {
                    os << std::string(width[j] - line[j].size(), ' ');
                }
            }
            os << "\n";
        };
        emit(t.columns);
        for (const auto& line : cells) {
            emit(line);
        }
    }
    if (!r.notes.empty()) {
        os << "\n";
        for (const std::string& n : r.notes) {
            os << "note: " << n << "\n";
        }
    }
}

inline void write_report(std::ostream& os, const Report& r, Format f, const std::string& version) {
    switch (f) {
    case Format::human: write_human(os, r, version); break;
    case Format::csv: write_csv(os, r, version); break;
    case Format::structured: write_structured(os, r, version); break;
    }
}

} // namespace triple_lab::cli
