#include "suffpcr/csv.hpp"

#include "suffpcr/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace suffpcr {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter)
{
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == delimiter && !quoted) {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col)
{
    const std::string cell = trim(raw);
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (!cell.empty() && *begin == '+')
        ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc() || ptr != end)
        throw ParseError("non-numeric cell '" + cell + "' at row " + std::to_string(row) + ", column " +
                             std::to_string(col),
                         row, col);
    if (!std::isfinite(value))
        throw ParseError("non-finite value at row " + std::to_string(row) + ", column " + std::to_string(col), row,
                         col);
    return value;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open '" + path.string() + "'", 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

CsvTable parse_csv(const std::string& text, const CsvOptions& options)
{
    std::istringstream in(text);
    std::string line;
    std::size_t file_row = 0;
    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    bool have_width = false;

    while (std::getline(in, line)) {
        ++file_row;
        if (file_row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
            line.erase(0, 3);
        if (trim(line).empty())
            continue;
        std::vector<std::string> cells = split_line(line, options.delimiter);
        if (options.header && table.columns.empty() && !have_width) {
            for (auto& c : cells)
                table.columns.push_back(trim(c));
            width = cells.size();
            have_width = true;
            continue;
        }
        if (!have_width) {
            width = cells.size();
            have_width = true;
        }
        if (cells.size() != width)
            throw ParseError("row " + std::to_string(file_row) + " has " + std::to_string(cells.size()) +
                                 " cells, expected " + std::to_string(width),
                             file_row, 0);
        std::vector<double> values(width);
        for (std::size_t c = 0; c < width; ++c)
            values[c] = parse_cell(cells[c], file_row, c + 1);
        rows.push_back(std::move(values));
    }

    if (!have_width)
        throw ParseError("empty CSV input", 0, 0);
    if (table.columns.empty())
        for (std::size_t c = 0; c < width; ++c)
            table.columns.push_back("V" + std::to_string(c + 1));

    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < width; ++c)
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return table;
}

CsvTable read_csv(const std::filesystem::path& path, const CsvOptions& options)
{
    return parse_csv(slurp(path), options);
}

namespace {

Vector transform_response(Vector y, const CsvOptions& options)
{
    if (!options.log1p_response)
        return y;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (!(y[i] > -1.0))
            throw ParseError("log1p transform needs y > -1 (row " + std::to_string(i + 1) + ")",
                             static_cast<std::size_t>(i + 1), 0);
        y[i] = std::log1p(y[i]);
    }
    return y;
}

} // namespace

LoadedData load_csv(const std::filesystem::path& x_path, const std::string& y_column, const CsvOptions& options)
{
    if (!options.header)
        throw ParseError("a named response column requires a header row", 0, 0);
    CsvTable table = read_csv(x_path, options);
    std::ptrdiff_t y_index = -1;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        if (table.columns[c] == y_column)
            y_index = static_cast<std::ptrdiff_t>(c);
    if (y_index < 0)
        throw ParseError("response column '" + y_column + "' not found in '" + x_path.string() + "'", 1, 0);

    LoadedData out;
    const Eigen::Index width = table.values.cols();
    out.x.resize(table.values.rows(), width - 1);
    Eigen::Index dst = 0;
    for (Eigen::Index c = 0; c < width; ++c) {
        if (c == y_index)
            continue;
        out.x.col(dst++) = table.values.col(c);
        out.feature_names.push_back(table.columns[static_cast<std::size_t>(c)]);
    }
    out.y = transform_response(table.values.col(y_index), options);
    return out;
}

LoadedData load_csv(const std::filesystem::path& x_path, const std::filesystem::path& y_path,
                    const CsvOptions& options)
{
    CsvTable xt = read_csv(x_path, options);
    CsvTable yt = read_csv(y_path, options);
    if (yt.values.cols() != 1)
        throw ParseError("response file '" + y_path.string() + "' must have exactly one column", 1, 0);
    if (yt.values.rows() != xt.values.rows())
        throw ParseError("response has " + std::to_string(yt.values.rows()) + " rows but features have " +
                             std::to_string(xt.values.rows()),
                         0, 0);
    LoadedData out;
    out.x = std::move(xt.values);
    out.feature_names = std::move(xt.columns);
    out.y = transform_response(yt.values.col(0), options);
    return out;
}

std::string format_number(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_csv(const std::filesystem::path& path, const Matrix& values, const std::vector<std::string>& columns)
{
    if (static_cast<Eigen::Index>(columns.size()) != values.cols())
        throw InvalidInput("write_csv: column names do not match the matrix width");
    std::ofstream out(path);
    if (!out)
        throw InvalidInput("cannot write '" + path.string() + "'");
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            out << (c ? "," : "") << format_number(values(r, c));
        out << '\n';
    }
}

void write_vector_csv(const std::filesystem::path& path, const Vector& values, const std::string& column)
{
    write_csv(path, Matrix(values), {column});
}

} // namespace suffpcr
