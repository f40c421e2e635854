#include "ctql/csv.hpp"

#include <cstdio>

#include "ctql/common.hpp"

namespace ctql {

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), path_(path), columns_(header.size()) {
  if (!out_) throw io_error("cannot open for writing: " + path);
  out_ << join_csv(header) << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_)
    throw contract_error("csv row width mismatch in " + path_);
  out_ << join_csv(fields) << '\n';
}

void CsvWriter::row_numeric(const std::vector<double>& values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) fields.push_back(fmt_g17(v));
  row(fields);
}

void CsvWriter::close() {
  if (out_.is_open()) {
    out_.flush();
    if (!out_) throw io_error("write failure on " + path_);
    out_.close();
  }
}

}  // namespace ctql
