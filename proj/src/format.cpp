#include "gmdiv/format.hpp"

#include <cstdio>
#include <stdexcept>

namespace gmdiv {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::separator() {
  if (filled_ == columns_) throw std::logic_error("csv: too many cells in row");
  if (filled_++) out_ << ',';
}

CsvWriter& CsvWriter::cell(double x) {
  separator();
  out_ << fmt17(x);
  return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(unsigned long long x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(bool x) {
  separator();
  out_ << (x ? "true" : "false");
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& x) {
  separator();
  out_ << x;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv: row has missing cells");
  out_ << '\n';
  filled_ = 0;
}

}  // namespace gmdiv
