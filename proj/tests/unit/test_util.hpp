#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "koedds/error.hpp"

namespace testutil {

inline std::string fixture(const std::string& name) {
  return std::string(KOEDDS_FIXTURES_DIR) + "/" + name;
}

inline std::string repo_path(const std::string& rel) {
  return std::string(KOEDDS_REPO_ROOT) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

// Unique scratch directory, removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    std::uniform_int_distribution<unsigned long long> dist;
    dir_ = std::filesystem::temp_directory_path() /
           ("koedds_test_" + std::to_string(dist(rd)));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct CaughtError {
  bool caught = false;
  koedds::ExitCode code = koedds::ExitCode::ok;
  std::string message;
};

// Runs f, expecting a koedds::Error; records its code and message.
inline CaughtError catch_error(const std::function<void()>& f) {
  CaughtError result;
  try {
    f();
  } catch (const koedds::Error& e) {
    result.caught = true;
    result.code = e.code();
    result.message = e.what();
  }
  return result;
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace testutil
