#pragma once

#include <string>
#include <vector>

#include "sompca/eval.hpp"
#include "sompca/tensor.hpp"
#include "sompca/tvp.hpp"

namespace sompca {

// Binary dataset container ("TEN1"):
//   magic   4 bytes "TEN1"
//   order   1 byte
//   dims    order x u32 little-endian
//   M       u32 little-endian
//   labels  M x i32 little-endian (-1 = unlabeled)
//   payload M * prod(dims) IEEE-754 f64 little-endian, samples consecutive,
//           each in generalized row-major order.
// The file length must match the header arithmetic exactly.
LabeledDataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const LabeledDataset& data);

// JSON model document (format version 1): variant, shape, nu, iterations,
// per-EMP mode vectors and scatter. Numbers round-trip bit-exactly.
void save_model(const std::string& path, const TvpModel& model);
TvpModel load_model(const std::string& path);

// Converts a directory of CSV matrices (one 2-D sample per file, rows =
// lines) into a dataset. Files are taken in lexicographic order; a label is
// parsed from leading digits of the file name, -1 when there are none.
LabeledDataset import_csv_dir(const std::string& dir);

} // namespace sompca
