#pragma once

#include <string>
#include <utility>
#include <vector>

namespace flurlab {

// RFC-4180 style CSV with a mandatory header row; floats at 17 significant
// digits so files round-trip exactly.
void write_csv(const std::string& filename, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& filename);

}  // namespace flurlab
