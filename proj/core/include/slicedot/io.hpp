#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slicedot/measure.hpp"
#include "slicedot/tensor.hpp"

namespace slicedot {

enum class MeasureFormat { csv, swt };

/// Picks the format from the file extension (".csv" or ".swt").
MeasureFormat format_from_path(const std::filesystem::path& path);

/// Parses a point-cloud CSV. The header row is optional; a final column
/// named `weight` in the header carries per-point mass.
EmpiricalMeasure parse_measure_csv(std::string_view text);

EmpiricalMeasure load_measure(const std::filesystem::path& path, MeasureFormat format);
EmpiricalMeasure load_measure(const std::filesystem::path& path);

/// SWT: the points tensor, followed by a rank-1 weights record only when the
/// weights are not uniform. CSV: header `x0,...,x{d-1}[,weight]`, values in
/// shortest round-trip form.
void save_measure(const std::filesystem::path& path, const EmpiricalMeasure& m,
                  MeasureFormat format);

// SWT record: "SWT1", u32 LE rank, rank u32 LE extents, row-major f64 LE payload.
// A file holds one or more records back to back.
std::string encode_swt(const Tensor& t);
std::vector<Tensor> decode_swt(std::string_view bytes);

void write_swt(const std::filesystem::path& path, const std::vector<Tensor>& records);
std::vector<Tensor> read_swt(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace slicedot
