#include "flurlab/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "flurlab/special.hpp"

namespace flurlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& filename, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream f(filename);
    if (!f) throw NumericalError("write_csv: cannot open " + filename);
    for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
    f << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_double(row[i]);
        f << "\n";
    }
}

std::vector<double> CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) {
            std::vector<double> out;
            out.reserve(rows.size());
            for (const auto& r : rows) out.push_back(r.at(j));
            return out;
        }
    }
    throw DomainError("read_csv: no column named " + name);
}

CsvTable read_csv(const std::string& filename) {
    std::ifstream f(filename);
    if (!f) throw NumericalError("read_csv: cannot open " + filename);
    CsvTable t;
    std::string line;
    if (!std::getline(f, line)) throw NumericalError("read_csv: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.header.size()) throw NumericalError("read_csv: ragged row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace flurlab
