#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace hemascreen::csv {

/// Streaming RFC-4180 reader: quoted fields, doubled quotes, embedded line
/// breaks, CRLF or LF records. A leading UTF-8 byte-order mark is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  /// 1-based physical line on which the last record returned started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

std::string quote(const std::string& field);

void write_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace hemascreen::csv
