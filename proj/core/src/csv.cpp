#include "paxsat/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace paxsat {

std::size_t CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DataError("missing column '" + name + "' in CSV header");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted)
    throw DataError("unterminated quote on line " + std::to_string(lineno));
  out.push_back(std::move(field));
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      // Strip a UTF-8 BOM if present.
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      t.header = split_csv_line(line, lineno);
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_csv_line(line, lineno);
    if (fields.size() != t.header.size())
      throw DataError(path + ": line " + std::to_string(lineno) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(t.header.size()));
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw DataError(path + ": missing header row");
  return t;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path, std::ios::binary);
  if (!impl_->out) {
    delete impl_;
    throw DataError("cannot open '" + path + "' for writing");
  }
}

CsvWriter::~CsvWriter() {
  close();
  delete impl_;
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") != std::string::npos) {
      line += '"';
      for (char c : f) {
        if (c == '"') line += '"';
        line += c;
      }
      line += '"';
    } else {
      line += f;
    }
  }
  line += '\n';
  impl_->out << line;
}

void CsvWriter::close() {
  if (impl_->out.is_open()) impl_->out.close();
}

std::string format_double(double v) {
  char buf[40];
  // Shortest decimal that round-trips, capped at %.17g.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

double parse_double_field(const std::string& s, std::size_t row, const std::string& col) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw DataError("row " + std::to_string(row) + ", column '" + col + "': bad number '" + s +
                    "'");
  return v;
}

std::int64_t parse_int_field(const std::string& s, std::size_t row, const std::string& col) {
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw DataError("row " + std::to_string(row) + ", column '" + col + "': bad integer '" + s +
                    "'");
  return v;
}

}  // namespace paxsat
