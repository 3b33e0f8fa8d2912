#ifndef SRMUSIC_MATRIX_IO_HPP
#define SRMUSIC_MATRIX_IO_HPP

#include <iosfwd>

#include "srmusic/types.hpp"

namespace srmusic
{

// Text exchange format for cross-checking with external tools:
//
//   <rows> <cols>
//   re,im          (one entry per line, row-major)
//
// Values are written with 17 significant digits and round-trip exactly.

void write_matrix_text(std::ostream& os, const CMatrixXd& A);
CMatrixXd read_matrix_text(std::istream& is);

} // namespace srmusic

#endif // SRMUSIC_MATRIX_IO_HPP
