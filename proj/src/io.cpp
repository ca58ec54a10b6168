#include "annokn/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "annokn/error.hpp"

namespace annokn {

namespace {

constexpr std::array<char, 4> kLdMagic = {'L', 'D', 'M', 'X'};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ParseError(0, "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

Table read_table(const std::filesystem::path& path, bool has_header) {
  auto in = open_input(path);
  Table t;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = split_tabs(line);
    if (has_header && t.header.empty()) {
      t.header = std::move(fields);
      width = t.header.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError(line_no, "expected " + std::to_string(width) + " fields, found " +
                                    std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line_no);
  }
  if (t.rows.empty()) throw ParseError(line_no, "no data rows");
  return t;
}

double parse_double(const std::string& cell, std::size_t line, const std::string& column) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw ParseError(line, "non-numeric value '" + cell + "' in column '" + column + "'");
  }
  return value;
}

template <typename T>
T to_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

DesignData load_design(const std::filesystem::path& path, DesignFormat format) {
  if (format != DesignFormat::tsv) throw ConfigError("format", "unsupported design format");
  const Table t = read_table(path, true);
  if (t.header.size() < 3 || t.header.back() != "y") {
    throw ParseError(1, "design header must be 'id <cov1> ... <covp> y'");
  }
  const std::size_t p = t.header.size() - 2;
  const std::size_t n = t.rows.size();
  Matrix x(n, p);
  Vector y(n);
  DesignData out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = t.rows[i];
    out.sample_ids.push_back(row[0]);
    for (std::size_t j = 0; j < p; ++j) x(i, j) = parse_double(row[j + 1], t.line_numbers[i], t.header[j + 1]);
    y(i) = parse_double(row.back(), t.line_numbers[i], "y");
  }
  std::vector<std::string> names(t.header.begin() + 1, t.header.end() - 1);
  out.x = StandardizedMatrix::from_raw(x, std::move(names));
  out.y = standardize_vector(y);
  return out;
}

void write_design_tsv(const std::filesystem::path& path, const std::vector<std::string>& sample_ids,
                      const std::vector<std::string>& names, const Matrix& x, const Vector& y) {
  if (static_cast<Eigen::Index>(sample_ids.size()) != x.rows() || y.size() != x.rows()) {
    throw DimensionMismatch("design rows", static_cast<std::size_t>(x.rows()), sample_ids.size());
  }
  if (static_cast<Eigen::Index>(names.size()) != x.cols()) {
    throw DimensionMismatch("design columns", static_cast<std::size_t>(x.cols()), names.size());
  }
  auto out = open_output(path);
  out << "id";
  for (const auto& name : names) out << '\t' << name;
  out << "\ty\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out << sample_ids[i];
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << '\t' << format_double(x(i, j));
    out << '\t' << format_double(y(i)) << '\n';
  }
}

SummaryStats load_summary_stats(const std::filesystem::path& path, double n) {
  const Table t = read_table(path, true);
  if (t.header.size() != 2 || t.header[0] != "snp" || t.header[1] != "z") {
    throw ParseError(1, "summary statistics header must be 'snp z'");
  }
  SummaryStats s;
  s.n = n;
  s.z.resize(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    s.snp_ids.push_back(t.rows[i][0]);
    s.z(static_cast<Eigen::Index>(i)) = parse_double(t.rows[i][1], t.line_numbers[i], "z");
  }
  s.validate();
  return s;
}

void write_summary_stats(const std::filesystem::path& path, const std::vector<std::string>& snp_ids,
                         const Vector& z) {
  if (static_cast<Eigen::Index>(snp_ids.size()) != z.size()) {
    throw DimensionMismatch("snp ids vs z", snp_ids.size(), static_cast<std::size_t>(z.size()));
  }
  auto out = open_output(path);
  out << "snp\tz\n";
  for (Eigen::Index i = 0; i < z.size(); ++i) out << snp_ids[i] << '\t' << format_double(z(i)) << '\n';
}

Matrix read_ld_matrix(const std::filesystem::path& path) {
  {
    auto in = open_input(path, std::ios::binary);
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() == 4 && magic == kLdMagic) {
      std::uint32_t p = 0;
      in.read(reinterpret_cast<char*>(&p), sizeof(p));
      if (!in) throw ParseError(0, "truncated LD header");
      p = to_little_endian(p);
      Matrix sigma(p, p);
      for (std::uint32_t i = 0; i < p; ++i) {
        for (std::uint32_t j = 0; j < p; ++j) {
          double v = 0.0;
          in.read(reinterpret_cast<char*>(&v), sizeof(v));
          if (!in) throw ParseError(0, "truncated LD payload");
          sigma(i, j) = to_little_endian(v);
        }
      }
      char extra = 0;
      if (in.read(&extra, 1)) throw ParseError(0, "trailing bytes after LD payload");
      return sigma;
    }
  }
  const Table t = read_table(path, false);
  const std::size_t p = t.rows.size();
  if (t.rows.front().size() != p) {
    throw DimensionMismatch("LD text matrix must be square", p, t.rows.front().size());
  }
  Matrix sigma(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      sigma(i, j) = parse_double(t.rows[i][j], t.line_numbers[i], std::to_string(j + 1));
  return sigma;
}

LdMatrix load_ld(const std::filesystem::path& path, double shrinkage) {
  return LdMatrix::from_correlation(read_ld_matrix(path), shrinkage);
}

void write_ld_binary(const std::filesystem::path& path, const Matrix& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw DimensionMismatch("LD matrix must be square", static_cast<std::size_t>(sigma.rows()),
                            static_cast<std::size_t>(sigma.cols()));
  }
  auto out = open_output(path, std::ios::binary);
  out.write(kLdMagic.data(), kLdMagic.size());
  const auto p = to_little_endian(static_cast<std::uint32_t>(sigma.rows()));
  out.write(reinterpret_cast<const char*>(&p), sizeof(p));
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) {
      const double v = to_little_endian(sigma(i, j));
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
}

void write_ld_text(const std::filesystem::path& path, const Matrix& sigma) {
  auto out = open_output(path);
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) {
      if (j > 0) out << '\t';
      out << format_double(sigma(i, j));
    }
    out << '\n';
  }
}

AnnotationTable load_annotations(const std::filesystem::path& path) {
  const Table t = read_table(path, true);
  if (t.header.size() < 2 || t.header[0] != "snp") {
    throw ParseError(1, "annotation header must be 'snp <anno1> ... <annoL>'");
  }
  const std::size_t l = t.header.size() - 1;
  Matrix values(t.rows.size(), l);
  AnnotationTable out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.snp_ids.push_back(t.rows[i][0]);
    for (std::size_t k = 0; k < l; ++k) {
      values(i, k) = parse_double(t.rows[i][k + 1], t.line_numbers[i], t.header[k + 1]);
    }
  }
  std::vector<std::string> names(t.header.begin() + 1, t.header.end());
  out.annotations = AnnotationMatrix::from_raw(values, std::move(names));
  return out;
}

void write_annotations_tsv(const std::filesystem::path& path, const std::vector<std::string>& snp_ids,
                           const std::vector<std::string>& names, const Matrix& values) {
  auto out = open_output(path);
  out << "snp";
  for (const auto& name : names) out << '\t' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out << snp_ids[i];
    for (Eigen::Index k = 0; k < values.cols(); ++k) out << '\t' << format_double(values(i, k));
    out << '\n';
  }
}

void require_same_ids(const std::vector<std::string>& expected, const std::vector<std::string>& actual,
                      const std::string& what) {
  if (expected.size() != actual.size()) throw DimensionMismatch(what, expected.size(), actual.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] != actual[i]) {
      throw ParseError(i + 2, what + ": id '" + actual[i] + "' does not match '" + expected[i] + "'");
    }
  }
}

}  // namespace annokn
