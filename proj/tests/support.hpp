#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

// Scratch directory, removed on destruction. Each test binary gets its own
// subtree so parallel ctest runs cannot collide.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    auto token = std::to_string(rd()) + "-" + std::to_string(rd());
    path_ = std::filesystem::temp_directory_path() / ("archnet-test-" + token);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path path() const { return path_; }

  std::string write(const std::string& name, const std::string& content) const {
    auto file = path_ / name;
    std::ofstream out(file, std::ios::binary);
    out << content;
    return file.string();
  }

 private:
  std::filesystem::path path_;
};
