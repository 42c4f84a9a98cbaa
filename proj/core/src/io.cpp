#include "slicedot/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "slicedot/errors.hpp"

namespace slicedot {
namespace {

constexpr std::string_view kSwtMagic = "SWT1";

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool try_parse_double(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw ParseError("SWT: truncated input");
    const auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint32_t u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }

  double f64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return std::bit_cast<double>(v);
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

MeasureFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv" || ext == ".CSV") return MeasureFormat::csv;
  if (ext == ".swt" || ext == ".SWT") return MeasureFormat::swt;
  throw ParseError("cannot infer format of '" + path.string() + "' (expected .csv or .swt)");
}

EmpiricalMeasure parse_measure_csv(std::string_view text) {
  std::vector<double> values;
  std::vector<double> weights;
  std::size_t width = 0;
  std::size_t rows = 0;
  bool first = true;
  bool has_weight = false;
  std::size_t line_no = 0;

  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const auto line = trim(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    std::vector<double> parsed(fields.size());
    std::size_t numeric = 0;
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (try_parse_double(fields[i], parsed[i])) ++numeric;

    if (first) {
      first = false;
      width = fields.size();
      if (numeric == 0) {
        has_weight = fields.back() == "weight";
        if (has_weight && width < 2) throw ParseError("CSV: weight column without coordinates");
        continue;
      }
    }
    if (fields.size() != width) {
      throw ParseError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " fields, got " + std::to_string(fields.size()));
    }
    if (numeric != fields.size()) throw ParseError("CSV line " + std::to_string(line_no) + ": malformed number");
    for (double v : parsed)
      if (!std::isfinite(v)) throw ParseError("CSV line " + std::to_string(line_no) + ": non-finite value");

    const std::size_t d = has_weight ? width - 1 : width;
    values.insert(values.end(), parsed.begin(), parsed.begin() + static_cast<std::ptrdiff_t>(d));
    if (has_weight) {
      if (parsed.back() < 0.0) throw DomainError("CSV line " + std::to_string(line_no) + ": negative weight");
      weights.push_back(parsed.back());
    }
    ++rows;
  }

  if (rows == 0) throw DomainError("CSV contains no data rows");
  const std::size_t d = has_weight ? width - 1 : width;
  Tensor points({rows, d}, std::move(values));
  if (!has_weight) return EmpiricalMeasure(std::move(points));
  return EmpiricalMeasure::normalized(std::move(points), Tensor::vector(std::move(weights)));
}

std::string encode_swt(const Tensor& t) {
  std::string out;
  out.reserve(8 + 4 * t.rank() + 8 * t.size());
  out.append(kSwtMagic);
  put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t e : t.shape()) put_u32(out, static_cast<std::uint32_t>(e));
  for (double v : t.data()) put_f64(out, v);
  return out;
}

std::vector<Tensor> decode_swt(std::string_view bytes) {
  ByteReader in(bytes);
  std::vector<Tensor> records;
  do {
    if (in.take(4) != kSwtMagic) throw ParseError("SWT: bad magic");
    const std::uint32_t rank = in.u32();
    if (rank > 8) throw ParseError("SWT: implausible rank " + std::to_string(rank));
    Shape shape(rank);
    for (auto& e : shape) e = in.u32();
    const std::size_t n = shape_size(shape);
    if (n > (bytes.size() / 8)) throw ParseError("SWT: payload larger than file");
    std::vector<double> data(n);
    for (auto& v : data) v = in.f64();
    records.emplace_back(std::move(shape), std::move(data));
  } while (!in.done());
  return records;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_swt(const std::filesystem::path& path, const std::vector<Tensor>& records) {
  std::string out;
  for (const auto& t : records) out += encode_swt(t);
  write_file(path, out);
}

std::vector<Tensor> read_swt(const std::filesystem::path& path) { return decode_swt(read_file(path)); }

EmpiricalMeasure load_measure(const std::filesystem::path& path, MeasureFormat format) {
  if (format == MeasureFormat::csv) return parse_measure_csv(read_file(path));

  auto records = read_swt(path);
  Tensor points = std::move(records.front());
  if (points.rank() != 2) throw ParseError("SWT measure: points record must have rank 2");
  if (!points.all_finite()) throw DomainError("SWT measure: non-finite coordinate");
  if (records.size() == 1) return EmpiricalMeasure(std::move(points));
  if (records.size() != 2 || records[1].rank() != 1 || records[1].size() != points.rows()) {
    throw ParseError("SWT measure: expected an optional rank-1 weights record of length k");
  }
  return EmpiricalMeasure(std::move(points), std::move(records[1]));
}

EmpiricalMeasure load_measure(const std::filesystem::path& path) { return load_measure(path, format_from_path(path)); }

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void save_measure(const std::filesystem::path& path, const EmpiricalMeasure& m, MeasureFormat format) {
  if (format == MeasureFormat::swt) {
    std::vector<Tensor> records{m.points()};
    if (!m.is_uniform()) records.push_back(m.weights());
    write_swt(path, records);
    return;
  }
  const bool weighted = !m.is_uniform();
  std::string out;
  for (std::size_t j = 0; j < m.dim(); ++j) {
    if (j) out += ',';
    out += 'x' + std::to_string(j);
  }
  if (weighted) out += ",weight";
  out += '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto r = m.points().row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out += ',';
      out += format_double(r[j]);
    }
    if (weighted) out += ',' + format_double(m.weights()[i]);
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace slicedot
