#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isoshell {

/// Shortest representation with 17 significant digits (round-trips a double).
std::string g17(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

/// Read a numeric CSV with a header row.
CsvTable read_csv(std::istream& in);

}  // namespace isoshell
