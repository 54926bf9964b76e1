#include "procreate/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace procreate::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_number(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

}  // namespace

void write_points(const std::string& path, const std::vector<Vec>& points,
                  const std::string& label_name, const std::vector<std::string>& labels) {
    if (!label_name.empty() && labels.size() != points.size())
        throw IoError("csv write: label count does not match point count");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");

    const std::size_t dim = points.empty() ? 0 : points[0].size();
    for (std::size_t d = 0; d < dim; ++d) {
        if (d) f << ',';
        f << 'x' << d;
    }
    if (!label_name.empty()) {
        if (dim) f << ',';
        f << label_name;
    }
    f << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim) throw IoError("csv write: ragged point rows");
        for (std::size_t d = 0; d < dim; ++d) {
            if (d) f << ',';
            f << format_double(points[i][d]);
        }
        if (!label_name.empty()) {
            if (dim) f << ',';
            f << labels[i];
        }
        f << '\n';
    }
    if (!f) throw IoError("write to '" + path + "' failed");
}

Table read_points(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(f, line)) throw IoError("'" + path + "': empty file, header row required");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    Table table;
    table.header = split(line);
    if (table.header.empty()) throw IoError("'" + path + "': malformed header");
    double dummy;
    if (parse_number(table.header[0], dummy))
        throw IoError("'" + path + "': header row required, got numeric first row");
    table.has_label = !table.header.empty() && table.header.back().size() > 0 &&
                      !(table.header.back().size() > 1 && table.header.back()[0] == 'x' &&
                        std::isdigit(static_cast<unsigned char>(table.header.back()[1])));
    const std::size_t ncols = table.header.size();
    const std::size_t ndims = table.has_label ? ncols - 1 : ncols;
    if (ndims == 0) throw IoError("'" + path + "': no coordinate columns");

    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != ncols)
            throw IoError("'" + path + "' line " + std::to_string(lineno) + ": expected " +
                          std::to_string(ncols) + " columns, got " + std::to_string(cells.size()));
        Vec p(ndims);
        for (std::size_t d = 0; d < ndims; ++d)
            if (!parse_number(cells[d], p[d]))
                throw IoError("'" + path + "' line " + std::to_string(lineno) +
                              ": bad number '" + cells[d] + "'");
        table.points.push_back(std::move(p));
        if (table.has_label) table.labels.push_back(cells.back());
    }
    return table;
}

}  // namespace procreate::csv
