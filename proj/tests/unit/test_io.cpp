#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hemascreen/csv.hpp"
#include "hemascreen/error.hpp"
#include "hemascreen/io.hpp"

using namespace hemascreen;

namespace {

std::vector<std::vector<std::string>> read_all(const std::string& text) {
  std::istringstream in(text);
  csv::Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  for (std::vector<std::string> row; reader.next(row);) rows.push_back(row);
  return rows;
}

}  // namespace

TEST(Csv, QuotedFieldsAndLineEndings) {
  const auto rows = read_all("\xEF\xBB\xBF" "a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,,\"two\nlines\"\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "", "two\nlines"}));
}

TEST(Csv, WriteThenReadIsIdentity) {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "", "line\nbreak"};
  std::ostringstream out;
  csv::write_row(out, fields);
  const auto rows = read_all(out.str());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], fields);
}

TEST(Csv, ReportsStartingLine) {
  std::istringstream in("h\n\"a\nb\"\nc\n");
  csv::Reader reader(in);
  std::vector<std::string> row;
  ASSERT_TRUE(reader.next(row));
  ASSERT_TRUE(reader.next(row));
  EXPECT_EQ(reader.line(), 2u);
  ASSERT_TRUE(reader.next(row));
  EXPECT_EQ(reader.line(), 4u);
  EXPECT_FALSE(reader.next(row));
}

TEST(Io, RealFormattingRoundTrips) {
  for (double v : {0.0, -1.5, 0.1, 1.0 / 3.0, -0.5223462, 1e-300, 123456789.125}) {
    const auto parsed = parse_real(format_real(v));
    ASSERT_TRUE(parsed);
    EXPECT_EQ(*parsed, v);
  }
  EXPECT_EQ(format_fixed(0.9512, 2), "0.95");
}

TEST(Io, StrictParsing) {
  EXPECT_EQ(parse_real(" 2.5 "), 2.5);
  EXPECT_EQ(parse_real("+1"), 1.0);
  EXPECT_FALSE(parse_real(""));
  EXPECT_FALSE(parse_real("1.0x"));
  EXPECT_FALSE(parse_real("nan"));
  EXPECT_FALSE(parse_real("inf"));
  EXPECT_EQ(parse_int("17"), 17);
  EXPECT_FALSE(parse_int("1.5"));
}

TEST(Io, AtomicWriteReplacesWholeFile) {
  const auto dir = std::filesystem::temp_directory_path() / "hemascreen_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.json";
  write_file_atomic(path, "first version, longer");
  write_file_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    EXPECT_EQ(entry.path().filename(), "out.json") << "temporary file left behind";
  std::filesystem::remove_all(dir);
}

TEST(Io, MissingFileIsIoError) {
  try {
    read_file("/nonexistent/hemascreen/file.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/hemascreen/file.csv"), std::string::npos);
  }
}
