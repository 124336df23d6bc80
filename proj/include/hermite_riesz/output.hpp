#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hermite_riesz::io {

/// Writes to a sibling temp file and renames over the target.
void atomic_write(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

/// Shortest round-trip decimal form (at most 17 significant digits).
std::string format_double(double v);

class BinaryWriter
{
 public:
  void magic(std::string_view m) { buf_.append(m); }
  void u32(std::uint32_t v);
  void f64(double v);
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class BinaryReader
{
 public:
  BinaryReader(std::string data, std::string what);
  void expect_magic(std::string_view m);
  std::uint32_t u32();
  double f64();
  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n);
  std::string data_;
  std::string what_;
  std::size_t pos_ = 0;
};

class CsvWriter
{
 public:
  CsvWriter(std::string_view subcommand, std::vector<std::string> columns);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::string_view s);
  void end_row();
  std::string str() const { return out_; }

 private:
  void sep();
  std::string out_;
  std::size_t ncols_;
  std::size_t in_row_ = 0;
};

struct PlotSeries
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Plain log-log line plot.
std::string svg_loglog(std::string_view title, std::string_view xlabel, std::string_view ylabel,
                       const std::vector<PlotSeries>& series);

}  // namespace hermite_riesz::io
