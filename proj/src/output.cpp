#include "hermite_riesz/output.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "hermite_riesz/error.hpp"

namespace hermite_riesz::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume little-endian host");

void atomic_write(const std::string& path, std::string_view bytes)
{
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open " + tmp.string() + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw ConfigError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw ConfigError("rename failed: " + target.string() + ": " + ec.message());
}

std::string read_file(const std::string& path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string format_double(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void BinaryWriter::u32(std::uint32_t v)
{
  char b[4];
  std::memcpy(b, &v, 4);
  buf_.append(b, 4);
}

void BinaryWriter::f64(double v)
{
  char b[8];
  std::memcpy(b, &v, 8);
  buf_.append(b, 8);
}

BinaryReader::BinaryReader(std::string data, std::string what)
    : data_(std::move(data)), what_(std::move(what))
{
}

void BinaryReader::need(std::size_t n)
{
  if (pos_ + n > data_.size()) throw ConfigError(what_ + ": truncated file");
}

void BinaryReader::expect_magic(std::string_view m)
{
  need(m.size());
  if (std::string_view(data_).substr(pos_, m.size()) != m)
    throw ConfigError(what_ + ": bad magic, expected " + std::string(m));
  pos_ += m.size();
}

std::uint32_t BinaryReader::u32()
{
  need(4);
  std::uint32_t v;
  std::memcpy(&v, data_.data() + pos_, 4);
  pos_ += 4;
  return v;
}

double BinaryReader::f64()
{
  need(8);
  double v;
  std::memcpy(&v, data_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

CsvWriter::CsvWriter(std::string_view subcommand, std::vector<std::string> columns)
    : ncols_(columns.size())
{
  out_ = "# hermite-riesz v1 ";
  out_.append(subcommand);
  out_ += '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ += ',';
    out_ += columns[i];
  }
  out_ += '\n';
}

void CsvWriter::sep()
{
  if (in_row_ >= ncols_) throw Error("CsvWriter: too many cells in row");
  if (in_row_) out_ += ',';
  ++in_row_;
}

CsvWriter& CsvWriter::cell(double v)
{
  sep();
  out_ += format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v)
{
  sep();
  out_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view s)
{
  sep();
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    out_.append(s);
    return *this;
  }
  out_ += '"';
  for (char c : s) {
    if (c == '"') out_ += '"';
    out_ += c;
  }
  out_ += '"';
  return *this;
}

void CsvWriter::end_row()
{
  if (in_row_ != ncols_) throw Error("CsvWriter: short row");
  out_ += '\n';
  in_row_ = 0;
}

namespace {

std::string esc(std::string_view s)
{
  std::string r;
  for (char c : s) {
    if (c == '<') r += "&lt;";
    else if (c == '>') r += "&gt;";
    else if (c == '&') r += "&amp;";
    else r += c;
  }
  return r;
}

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string svg_loglog(std::string_view title, std::string_view xlabel, std::string_view ylabel,
                       const std::vector<PlotSeries>& series)
{
  const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  if (!(xmax >= xmin)) { xmin = 0; xmax = 1; }
  if (!(ymax >= ymin)) { ymin = 0; ymax = 1; }
  if (xmax - xmin < 1e-9) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-9) { ymin -= 0.5; ymax += 0.5; }
  auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double ly) { return H - mb - (ly - ymin) / (ymax - ymin) * (H - mt - mb); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
     << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
     << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << esc(xlabel) << " (log10 " << num(xmin) << " .. " << num(xmax) << ")</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << H / 2
     << ")\" text-anchor=\"middle\">" << esc(ylabel) << " (log10 " << num(ymin) << " .. " << num(ymax)
     << ")</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* c = colors[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
      if (!(ser.x[i] > 0) || !(ser.y[i] > 0) || !std::isfinite(ser.y[i])) continue;
      os << num(px(std::log10(ser.x[i]))) << ',' << num(py(std::log10(ser.y[i]))) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 14 * s << "\" font-size=\"11\" fill=\"" << c
       << "\">" << esc(ser.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace hermite_riesz::io
