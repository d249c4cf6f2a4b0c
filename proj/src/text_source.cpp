#include "koedds/text_source.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "koedds/error.hpp"

namespace koedds {

FileByteSource::FileByteSource(const std::string& path, std::uint64_t offset,
                               std::uint64_t length)
    : path_(path) {
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) throw io_error("cannot open '" + path + "' for reading");
  if (offset != 0 && ::fseeko(file_, static_cast<off_t>(offset), SEEK_SET) != 0) {
    std::fclose(file_);
    throw io_error("cannot seek in '" + path + "'");
  }
  remaining_ = length;
}

FileByteSource::~FileByteSource() {
  if (file_) std::fclose(file_);
}

std::size_t FileByteSource::read(char* buf, std::size_t n) {
  if (remaining_ == 0) return 0;
  if (remaining_ != npos) n = static_cast<std::size_t>(std::min<std::uint64_t>(n, remaining_));
  std::size_t got = std::fread(buf, 1, n, file_);
  if (got == 0 && std::ferror(file_)) throw io_error("read error on '" + path_ + "'");
  if (remaining_ != npos) remaining_ -= got;
  return got;
}

std::size_t MemoryByteSource::read(char* buf, std::size_t n) {
  std::size_t got = std::min(n, data_.size() - pos_);
  std::memcpy(buf, data_.data() + pos_, got);
  pos_ += got;
  return got;
}

struct GzipByteSource::Impl {
  std::unique_ptr<ByteSource> inner;
  std::string name;
  z_stream zs{};
  std::vector<char> in;
  bool inner_eof = false;
  bool done = false;

  explicit Impl(std::unique_ptr<ByteSource> src, std::string n)
      : inner(std::move(src)), name(std::move(n)), in(64 * 1024) {
    // 16 + MAX_WBITS selects gzip framing
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
      throw io_error("zlib init failed for '" + name + "'");
  }
  ~Impl() { inflateEnd(&zs); }
};

GzipByteSource::GzipByteSource(std::unique_ptr<ByteSource> inner, std::string name)
    : impl_(std::make_unique<Impl>(std::move(inner), std::move(name))) {}

GzipByteSource::~GzipByteSource() = default;

std::size_t GzipByteSource::read(char* buf, std::size_t n) {
  Impl& im = *impl_;
  if (im.done) return 0;
  im.zs.next_out = reinterpret_cast<Bytef*>(buf);
  im.zs.avail_out = static_cast<uInt>(n);
  while (im.zs.avail_out > 0) {
    if (im.zs.avail_in == 0 && !im.inner_eof) {
      std::size_t got = im.inner->read(im.in.data(), im.in.size());
      im.zs.next_in = reinterpret_cast<Bytef*>(im.in.data());
      im.zs.avail_in = static_cast<uInt>(got);
      if (got == 0) im.inner_eof = true;
    }
    int rc = inflate(&im.zs, Z_NO_FLUSH);
    if (rc == Z_STREAM_END) {
      // A member can end exactly at the buffer boundary, so an empty input
      // buffer alone does not mean the file is finished — probe for more.
      if (im.zs.avail_in == 0 && !im.inner_eof) {
        std::size_t got = im.inner->read(im.in.data(), im.in.size());
        im.zs.next_in = reinterpret_cast<Bytef*>(im.in.data());
        im.zs.avail_in = static_cast<uInt>(got);
        if (got == 0) im.inner_eof = true;
      }
      if (im.zs.avail_in == 0) {
        im.done = true;
        break;
      }
      // concatenated gzip members
      if (inflateReset(&im.zs) != Z_OK)
        throw format_error("corrupt gzip stream in '" + im.name + "'");
      continue;
    }
    if (rc == Z_BUF_ERROR && im.inner_eof)
      throw format_error("truncated gzip stream in '" + im.name + "'");
    if (rc != Z_OK)
      throw format_error("corrupt gzip stream in '" + im.name + "': " +
                         (im.zs.msg ? im.zs.msg : "inflate error"));
  }
  return n - im.zs.avail_out;
}

std::unique_ptr<ByteSource> open_input(const std::string& path) {
  unsigned char magic[2] = {0, 0};
  {
    FileByteSource probe(path);
    probe.read(reinterpret_cast<char*>(magic), 2);
  }
  auto file = std::make_unique<FileByteSource>(path);
  if (magic[0] == 0x1f && magic[1] == 0x8b)
    return std::make_unique<GzipByteSource>(std::move(file), path);
  return file;
}

LineReader::LineReader(ByteSource& source, std::size_t chunk_size)
    : source_(source), chunk_size_(chunk_size == 0 ? 1 : chunk_size) {}

bool LineReader::fill() {
  if (eof_) return false;
  // compact consumed bytes before growing the buffer
  if (pos_ > 0) {
    buffer_.erase(0, pos_);
    end_ -= pos_;
    pos_ = 0;
  }
  buffer_.resize(end_ + chunk_size_);
  std::size_t got = source_.read(buffer_.data() + end_, chunk_size_);
  end_ += got;
  if (got == 0) eof_ = true;
  return got > 0;
}

bool LineReader::next(std::string_view& line) {
  if (at_start_) {
    at_start_ = false;
    while (end_ - pos_ < 3 && fill()) {
    }
    if (end_ - pos_ >= 3 && buffer_[pos_] == '\xef' && buffer_[pos_ + 1] == '\xbb' &&
        buffer_[pos_ + 2] == '\xbf')
      pos_ += 3;
  }
  // scanned = bytes past pos_ already known to be newline-free; stays valid
  // across fill() because compaction only shifts the window, never reorders it
  std::size_t scanned = 0;
  for (;;) {
    const char* base = buffer_.data();
    const void* nl = std::memchr(base + pos_ + scanned, '\n', end_ - pos_ - scanned);
    if (nl) {
      std::size_t nl_pos = static_cast<std::size_t>(static_cast<const char*>(nl) - base);
      std::size_t len = nl_pos - pos_;
      if (len > 0 && base[pos_ + len - 1] == '\r') --len;
      line = std::string_view(base + pos_, len);
      pos_ = nl_pos + 1;
      ++line_number_;
      return true;
    }
    scanned = end_ - pos_;
    if (!fill()) {
      if (end_ > pos_) {
        std::size_t len = end_ - pos_;
        if (buffer_[pos_ + len - 1] == '\r') --len;
        line = std::string_view(buffer_.data() + pos_, len);
        pos_ = end_;
        ++line_number_;
        return true;
      }
      return false;
    }
  }
}

void split_tabs(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool split_csv_line(std::string_view line, std::vector<std::string>& out) {
  out.clear();
  std::string field;
  bool in_quotes = false;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
      ++i;
      continue;
    }
    if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
      ++i;
      continue;
    }
    field.push_back(c);
    ++i;
  }
  if (in_quotes) return false;
  out.push_back(std::move(field));
  return true;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n'))
    --e;
  return s.substr(b, e - b);
}

}  // namespace koedds
