#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "fixtures.hpp"

namespace mash::testing {

/// A fresh directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mash") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
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

 private:
  std::filesystem::path path_;
};

/// A data directory with every bundled scenario copied under bundles/.
inline void seed_data_dir(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "bundles");
  for (const char* name : {"bogustan", "wokistan", "shamland"})
    std::filesystem::copy(bundle_dir(name), dir / "bundles" / name, std::filesystem::copy_options::recursive);
}

}  // namespace mash::testing
