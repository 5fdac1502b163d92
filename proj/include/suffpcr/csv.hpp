#pragma once

#include "suffpcr/linalg.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace suffpcr {

struct CsvOptions
{
    bool header = true;
    char delimiter = ',';
    /// Replace the response with log(y + 1).
    bool log1p_response = false;
};

struct CsvTable
{
    std::vector<std::string> columns;
    Matrix values;
};

struct LoadedData
{
    Matrix x;
    Vector y;
    std::vector<std::string> feature_names;
};

/// Reads a numeric table. Rows are samples. Throws ParseError carrying the
/// 1-based file row and column of the first bad cell.
CsvTable read_csv(const std::filesystem::path& path, const CsvOptions& options = {});
CsvTable parse_csv(const std::string& text, const CsvOptions& options = {});

/// Features and response from one file, the response named by `y_column`.
LoadedData load_csv(const std::filesystem::path& x_path, const std::string& y_column, const CsvOptions& options = {});
/// Features from one file and the response from a separate single-column file.
LoadedData load_csv(const std::filesystem::path& x_path, const std::filesystem::path& y_path,
                    const CsvOptions& options = {});

/// Writes with 17 significant digits.
void write_csv(const std::filesystem::path& path, const Matrix& values, const std::vector<std::string>& columns);
void write_vector_csv(const std::filesystem::path& path, const Vector& values, const std::string& column);

std::string format_number(double value);

} // namespace suffpcr
