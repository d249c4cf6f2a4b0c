#pragma once

#include <stdexcept>
#include <string>

namespace koedds {

// Process exit codes. Every fatal Error carries one of these so the CLI can
// map failures to distinct statuses.
enum class ExitCode : int {
  ok = 0,
  usage = 1,   // bad flags or config values
  io = 2,      // unreadable or unwritable files
  format = 3,  // structural input problems: headers, JSON shape, integrity
  join = 4,    // empty or ambiguous county joins
  stats = 5,   // degenerate statistics
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

inline Error usage_error(std::string m) { return Error(ExitCode::usage, std::move(m)); }
inline Error io_error(std::string m) { return Error(ExitCode::io, std::move(m)); }
inline Error format_error(std::string m) { return Error(ExitCode::format, std::move(m)); }
inline Error join_error(std::string m) { return Error(ExitCode::join, std::move(m)); }
inline Error stats_error(std::string m) { return Error(ExitCode::stats, std::move(m)); }

}  // namespace koedds
