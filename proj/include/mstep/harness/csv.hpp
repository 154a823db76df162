#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mstep::harness {

/// Round-trip exact text for a double ("%.17g").
std::string format_double(double value);

/// Comma-separated writer. Fields are written verbatim; callers only pass
/// identifiers and numbers, which never contain commas or quotes.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(const std::string& field);
  CsvWriter& operator<<(const char* field) { return *this << std::string(field); }
  CsvWriter& operator<<(double value) { return *this << format_double(value); }
  CsvWriter& operator<<(int value) { return *this << std::to_string(value); }
  CsvWriter& operator<<(long long value) { return *this << std::to_string(value); }
  CsvWriter& operator<<(unsigned long long value) { return *this << std::to_string(value); }
  CsvWriter& operator<<(unsigned long value) { return *this << std::to_string(value); }
  void end_row();
  /// Writes the file. Nothing reaches disk before this call.
  void close();

private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t columns_;
  std::size_t fields_in_row_ = 0;
  bool closed_ = false;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace mstep::harness
