#include "dpcube/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace dpcube {

Dataset read_csv_dataset(const std::string& path, int expected_dim, bool normalize) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    int dim = expected_dim;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(field, &used);
                while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
                if (used != field.size()) throw std::invalid_argument(field);
                row.push_back(v);
            } catch (const std::exception&) {
                throw DataError(path + ":" + std::to_string(line_no) + ": malformed value '" +
                                field + "'");
            }
        }
        if (row.empty()) {
            throw DataError(path + ":" + std::to_string(line_no) + ": empty row");
        }
        if (dim == 0) dim = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != dim) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " columns, found " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path + ": no data rows");

    if (normalize) {
        for (int c = 0; c < dim; ++c) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (const auto& row : rows) {
                lo = std::min(lo, row[c]);
                hi = std::max(hi, row[c]);
            }
            for (auto& row : rows) {
                row[c] = (hi > lo) ? (row[c] - lo) / (hi - lo) : 0.5;
            }
        }
    } else {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (int c = 0; c < dim; ++c) {
                if (!(rows[r][c] >= 0.0 && rows[r][c] <= 1.0)) {
                    throw DataError(path + ": value " + std::to_string(rows[r][c]) + " at row " +
                                    std::to_string(r + 1) + ", column " + std::to_string(c + 1) +
                                    " is outside [0,1]; pass --normalize to rescale");
                }
            }
        }
    }

    Dataset data(dim);
    data.coords.reserve(rows.size() * dim);
    for (const auto& row : rows) data.coords.insert(data.coords.end(), row.begin(), row.end());
    return data;
}

void write_csv_dataset(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    char buf[40];
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto p = data.point(i);
        for (int c = 0; c < data.dim; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[c]);
            out << (c ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace dpcube
