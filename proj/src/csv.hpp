#pragma once

// Minimal numeric CSV reader for the shipped data tables.

#include <filesystem>
#include <string>
#include <vector>

namespace vlcsim::detail {

struct NumericTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a header row plus numeric rows; every row must have the header's
/// column count. Throws DataError naming the file and line.
NumericTable read_numeric_csv(const std::filesystem::path& path);

}  // namespace vlcsim::detail
