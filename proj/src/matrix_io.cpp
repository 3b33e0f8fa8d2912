#include "srmusic/matrix_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "srmusic/errors.hpp"

namespace srmusic
{

void write_matrix_text(std::ostream& os, const CMatrixXd& A)
{
    os << A.rows() << ' ' << A.cols() << '\n';
    char buf[64];
    for (Index i = 0; i < A.rows(); ++i) {
        for (Index j = 0; j < A.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", A(i, j).real(), A(i, j).imag());
            os << buf;
        }
    }
}

CMatrixXd read_matrix_text(std::istream& is)
{
    Index rows = -1;
    Index cols = -1;
    if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
        throw InvalidInput("matrix text: bad header");
    }
    CMatrixXd A(rows, cols);
    std::string line;
    std::getline(is, line);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            if (!std::getline(is, line)) {
                throw InvalidInput("matrix text: truncated at entry (" + std::to_string(i) + "," +
                                   std::to_string(j) + ")");
            }
            const auto comma = line.find(',');
            if (comma == std::string::npos) {
                throw InvalidInput("matrix text: expected 're,im' but got '" + line + "'");
            }
            try {
                A(i, j) = {std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))};
            } catch (const std::logic_error&) {
                throw InvalidInput("matrix text: unparsable entry '" + line + "'");
            }
        }
    }
    return A;
}

} // namespace srmusic
