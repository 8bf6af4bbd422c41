// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_MATRIX_MARKET_HPP
#define TMG_MATRIX_MARKET_HPP

#include <iosfwd>
#include <string>

#include "tmg/dist_matrix.hpp"
#include "tmg/dist_vector.hpp"

namespace tmg {

/// Writes the gathered global matrix in Matrix Market coordinate format
/// (real, general). Collective; rank 0 performs the I/O.
void write_matrix_market(const DistMatrix& A, const std::string& path);
void write_matrix_market(const DistMatrix& A, std::ostream& out);

/// Reads a coordinate-format file (real; general or symmetric, the lower
/// triangle of a symmetric file is mirrored) and distributes it block
/// row-wise. Collective; rank 0 reads, everyone receives.
DistMatrix read_matrix_market(const Comm& comm, const std::string& path);

/// Plain text vectors, one value per line.
void write_vector_txt(const DistVector& x, const std::string& path);
DistVector read_vector_txt(const Comm& comm, const std::string& path);

} // namespace tmg

#endif
