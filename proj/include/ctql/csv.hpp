#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace ctql {

/// Full round-trip decimal formatting ("%.17g"); every numeric CSV field goes
/// through this so reruns of the same configuration are byte-identical.
std::string fmt_g17(double v);

std::string join_csv(const std::vector<std::string>& fields);

/// Minimal CSV emitter: header row first, then one row per call.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void row_numeric(const std::vector<double>& values);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_ = 0;
};

}  // namespace ctql
