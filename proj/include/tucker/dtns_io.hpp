#pragma once

// DTNS1 container: the 5 ASCII bytes "DTNS1", a little-endian u32 mode
// count d, d little-endian u64 dims, then the f64 payload (little-endian)
// in the library's linearization (mode 0 fastest). Matrices are stored as
// 2-way tensors (rows, cols) in column-major order.

#include "tucker/tensor.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

namespace tucker {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_dtns(std::ostream& out, const DenseTensor& t);
DenseTensor read_dtns(std::istream& in);

void save_dtns(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor load_dtns(const std::filesystem::path& path);

void save_matrix_dtns(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix_dtns(const std::filesystem::path& path);

}  // namespace tucker
