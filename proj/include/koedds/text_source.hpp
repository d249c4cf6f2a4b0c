#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace koedds {

// Sequential byte stream. Implementations read forward only; memory use is
// bounded by the caller's buffer, never by stream length.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Reads up to n bytes into buf, returns bytes read; 0 means end of stream.
  virtual std::size_t read(char* buf, std::size_t n) = 0;
};

// Reads a byte range [offset, offset+length) of a file. length == npos reads
// to end of file.
class FileByteSource final : public ByteSource {
 public:
  static constexpr std::uint64_t npos = ~std::uint64_t{0};

  explicit FileByteSource(const std::string& path, std::uint64_t offset = 0,
                          std::uint64_t length = npos);
  ~FileByteSource() override;
  FileByteSource(const FileByteSource&) = delete;
  FileByteSource& operator=(const FileByteSource&) = delete;

  std::size_t read(char* buf, std::size_t n) override;

 private:
  std::FILE* file_ = nullptr;
  std::uint64_t remaining_ = 0;
  std::string path_;
};

class MemoryByteSource final : public ByteSource {
 public:
  explicit MemoryByteSource(std::string data) : data_(std::move(data)) {}
  std::size_t read(char* buf, std::size_t n) override;

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

// Streaming gzip decompressor over another source. Handles multi-member
// files (concatenated gzip streams).
class GzipByteSource final : public ByteSource {
 public:
  explicit GzipByteSource(std::unique_ptr<ByteSource> inner,
                          std::string name = "<gzip>");
  ~GzipByteSource() override;
  GzipByteSource(const GzipByteSource&) = delete;
  GzipByteSource& operator=(const GzipByteSource&) = delete;

  std::size_t read(char* buf, std::size_t n) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Opens path for reading, transparently unwrapping gzip input detected by
// magic bytes (0x1f 0x8b).
std::unique_ptr<ByteSource> open_input(const std::string& path);

// Splits a byte stream into lines. Lines are returned as views into an
// internal buffer, valid until the next call. Handles \n and \r\n endings and
// strips a UTF-8 BOM from the start of the stream. Peak memory is the longest
// single line plus one read chunk.
class LineReader {
 public:
  explicit LineReader(ByteSource& source, std::size_t chunk_size = 64 * 1024);

  // Returns false at end of stream.
  bool next(std::string_view& line);

  // 1-based number of the line most recently returned.
  std::size_t line_number() const { return line_number_; }

 private:
  bool fill();

  ByteSource& source_;
  std::string buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  std::size_t chunk_size_;
  std::size_t line_number_ = 0;
  bool eof_ = false;
  bool at_start_ = true;
};

// Splits on tabs; fields are views into `line`.
void split_tabs(std::string_view line, std::vector<std::string_view>& out);

// Splits one CSV line with RFC 4180 quoting ("" escapes a quote inside a
// quoted field). Embedded newlines are not supported. Returns false on
// malformed quoting.
bool split_csv_line(std::string_view line, std::vector<std::string>& out);

std::string_view trim(std::string_view s);

}  // namespace koedds
