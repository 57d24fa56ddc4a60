#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gmdiv {

/// Shortest text that is still 17 significant digits ("%.17g").
std::string fmt17(double x);

/// Minimal CSV writer; numeric cells go through fmt17.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(unsigned long long x);
  CsvWriter& cell(std::size_t x) { return cell(static_cast<unsigned long long>(x)); }
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(bool x);
  CsvWriter& cell(const std::string& x);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace gmdiv
