#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "annokn/data_model.hpp"

namespace annokn {

enum class DesignFormat { tsv };

/// Standardized design plus standardized response, as read from a design TSV
/// (`id <cov1> ... <covp> y`).
struct DesignData {
  std::vector<std::string> sample_ids;
  StandardizedMatrix x;
  Vector y;
};

DesignData load_design(const std::filesystem::path& path, DesignFormat format = DesignFormat::tsv);

/// Writes `id <names...> y`; values printed with shortest round-trip precision.
void write_design_tsv(const std::filesystem::path& path, const std::vector<std::string>& sample_ids,
                      const std::vector<std::string>& names, const Matrix& x, const Vector& y);

/// `snp z` TSV. Sample size comes from the caller.
SummaryStats load_summary_stats(const std::filesystem::path& path, double n);
void write_summary_stats(const std::filesystem::path& path, const std::vector<std::string>& snp_ids,
                         const Vector& z);

/// Reads either the binary (`LDMX` magic) or the text (p x p TSV, no header)
/// form, then applies shrinkage.
LdMatrix load_ld(const std::filesystem::path& path, double shrinkage);
/// Raw matrix without shrinkage or validation; used by round-trip tests and
/// by tools that inspect files.
Matrix read_ld_matrix(const std::filesystem::path& path);
void write_ld_binary(const std::filesystem::path& path, const Matrix& sigma);
void write_ld_text(const std::filesystem::path& path, const Matrix& sigma);

struct AnnotationTable {
  std::vector<std::string> snp_ids;
  AnnotationMatrix annotations;
};

/// `snp <anno1> ... <annoL>` TSV; columns are standardized on load.
AnnotationTable load_annotations(const std::filesystem::path& path);
void write_annotations_tsv(const std::filesystem::path& path, const std::vector<std::string>& snp_ids,
                           const std::vector<std::string>& names, const Matrix& values);

/// Throws DimensionMismatch or ParseError unless both id lists are equal.
void require_same_ids(const std::vector<std::string>& expected, const std::vector<std::string>& actual,
                      const std::string& what);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace annokn
