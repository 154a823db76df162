#include "mstep/harness/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mstep::harness {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  for (const auto& h : header) *this << h;
  end_row();
}

CsvWriter& CsvWriter::operator<<(const std::string& field) {
  if (fields_in_row_ > 0) buffer_ += ',';
  buffer_ += field;
  ++fields_in_row_;
  return *this;
}

void CsvWriter::end_row() {
  if (fields_in_row_ != columns_) {
    throw std::logic_error(path_.string() + ": row has " + std::to_string(fields_in_row_) +
                           " fields, header has " + std::to_string(columns_));
  }
  buffer_ += '\n';
  fields_in_row_ = 0;
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  if (!path_.parent_path().empty()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  out << buffer_;
  if (!out) throw std::runtime_error("cannot write " + path_.string());
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw std::out_of_range("no column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size()) {
        throw std::runtime_error(path.string() + ": ragged row");
      }
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

}  // namespace mstep::harness
