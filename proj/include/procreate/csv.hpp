#ifndef PROCREATE_CSV_HPP
#define PROCREATE_CSV_HPP

#include <string>
#include <vector>

#include "procreate/common.hpp"

namespace procreate::csv {

// Point table with an optional trailing label column (origin / variant).
struct Table {
    std::vector<std::string> header;
    std::vector<Vec> points;
    std::vector<std::string> labels;  // empty when the table has no label column
    bool has_label = false;
};

// Writes header x0..x{D-1}[,label_name] and one row per point, numbers in
// shortest round-trip form.
void write_points(const std::string& path, const std::vector<Vec>& points,
                  const std::string& label_name = "",
                  const std::vector<std::string>& labels = {});

// Reads a table written by write_points. A trailing non-numeric column is
// exposed through `labels`. Header row is required.
Table read_points(const std::string& path);

}  // namespace procreate::csv

#endif
