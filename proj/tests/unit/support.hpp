#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "annokn/data_model.hpp"
#include "annokn/rng.hpp"

namespace test {

using annokn::Matrix;
using annokn::Vector;

inline Matrix random_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  annokn::Rng rng(seed);
  return annokn::standard_normal(rng, rows, cols);
}

inline Vector random_vector(std::uint64_t seed, Eigen::Index size) {
  annokn::Rng rng(seed);
  return annokn::standard_normal(rng, size);
}

inline Matrix ar1(Eigen::Index p, double rho) {
  Matrix s(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) s(i, j) = std::pow(rho, std::abs(static_cast<double>(i - j)));
  return s;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("annokn_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name, std::ios::binary) << text;
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace test
