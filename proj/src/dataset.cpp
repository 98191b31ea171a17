#include "mvpc/dataset.hpp"

#include <cassert>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mvpc {

Dataset::Dataset(std::vector<std::string> labels, int rows)
    : rows_(rows),
      labels_(std::move(labels)),
      columns_(labels_.size(), std::vector<double>(rows, 0.0)),
      masks_(labels_.size(), std::vector<unsigned char>(rows, 0)),
      missing_count_(labels_.size(), 0) {
  if (rows < 0) throw std::invalid_argument("negative row count");
}

void Dataset::check_cell(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols())
    throw std::invalid_argument("cell index out of range");
}

const std::string& Dataset::label(int col) const {
  if (col < 0 || col >= cols()) throw std::invalid_argument("column out of range");
  return labels_[col];
}

int Dataset::column_index(const std::string& label) const {
  for (int i = 0; i < cols(); ++i)
    if (labels_[i] == label) return i;
  return -1;
}

double Dataset::value(int row, int col) const {
  check_cell(row, col);
  assert(!masks_[col][row] && "reading a masked cell");
  return columns_[col][row];
}

bool Dataset::missing(int row, int col) const {
  check_cell(row, col);
  return masks_[col][row] != 0;
}

void Dataset::set_value(int row, int col, double v) {
  check_cell(row, col);
  if (masks_[col][row]) {
    masks_[col][row] = 0;
    --missing_count_[col];
  }
  columns_[col][row] = v;
}

void Dataset::set_missing(int row, int col) {
  check_cell(row, col);
  if (!masks_[col][row]) {
    masks_[col][row] = 1;
    ++missing_count_[col];
  }
  columns_[col][row] = std::numeric_limits<double>::quiet_NaN();
}

const double* Dataset::column_data(int col) const {
  if (col < 0 || col >= cols()) throw std::invalid_argument("column out of range");
  return columns_[col].data();
}

const unsigned char* Dataset::column_mask(int col) const {
  if (col < 0 || col >= cols()) throw std::invalid_argument("column out of range");
  return missing_count_[col] == 0 ? nullptr : masks_[col].data();
}

bool Dataset::column_has_missing(int col) const {
  if (col < 0 || col >= cols()) throw std::invalid_argument("column out of range");
  return missing_count_[col] != 0;
}

int Dataset::observed_count(int col) const {
  if (col < 0 || col >= cols()) throw std::invalid_argument("column out of range");
  return rows_ - missing_count_[col];
}

int Dataset::fully_observed_row_count() const {
  int count = 0;
  for (int r = 0; r < rows_; ++r) {
    bool ok = true;
    for (int c = 0; c < cols() && ok; ++c) ok = !masks_[c][r];
    count += ok;
  }
  return count;
}

DataView testwise_delete(const Dataset& d, const std::vector<int>& cols) {
  DataView v;
  v.data = &d;
  v.cols = cols;
  std::vector<const unsigned char*> masks;
  for (int c : cols) {
    const unsigned char* m = d.column_mask(c);  // also validates the index
    if (m) masks.push_back(m);
  }
  v.rows.reserve(d.rows());
  for (int r = 0; r < d.rows(); ++r) {
    bool keep = true;
    for (const unsigned char* m : masks)
      if (m[r]) {
        keep = false;
        break;
      }
    if (keep) v.rows.push_back(r);
  }
  return v;
}

Dataset listwise_delete(const Dataset& d) {
  std::vector<int> all(d.cols());
  for (int c = 0; c < d.cols(); ++c) all[c] = c;
  DataView v = testwise_delete(d, all);
  Dataset out(d.labels(), v.row_count());
  for (int c = 0; c < d.cols(); ++c) {
    const double* src = d.column_data(c);
    for (int r = 0; r < v.row_count(); ++r) out.set_value(r, c, src[v.rows[r]]);
  }
  return out;
}

std::vector<double> indicator_column(const Dataset& d, int col) {
  std::vector<double> out(d.rows(), 0.0);
  const unsigned char* m = d.column_mask(col);
  if (m)
    for (int r = 0; r < d.rows(); ++r) out[r] = m[r] ? 1.0 : 0.0;
  return out;
}

// --- CSV ----------------------------------------------------------------------

std::vector<std::string> default_na_tokens() { return {"", "NA", "NaN"}; }

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& origin,
                  const std::vector<std::string>& na_tokens) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(origin + ": empty file, expected a header row");
  std::vector<std::string> header = split_line(line);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].empty())
      throw std::runtime_error(origin + ": empty column name in header");
    for (std::size_t j = 0; j < i; ++j)
      if (header[j] == header[i])
        throw std::runtime_error(origin + ": duplicate column name '" +
                                 header[i] + "'");
  }

  auto is_na = [&](const std::string& cell) {
    for (const std::string& tok : na_tokens)
      if (cell == tok) return true;
    return false;
  };

  std::vector<std::vector<double>> cols(header.size());
  std::vector<std::vector<unsigned char>> masks(header.size());
  int row_no = 1;  // header was line 1
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error(origin + ": row " + std::to_string(row_no) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    for (size_t c = 0; c < cells.size(); ++c) {
      if (is_na(cells[c])) {
        cols[c].push_back(std::numeric_limits<double>::quiet_NaN());
        masks[c].push_back(1);
        continue;
      }
      errno = 0;
      char* end = nullptr;
      double v = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error(origin + ": row " + std::to_string(row_no) +
                                 ", column '" + header[c] + "': cannot parse '" +
                                 cells[c] + "' as a number");
      cols[c].push_back(v);
      masks[c].push_back(0);
    }
  }

  Dataset d(header, cols.empty() ? 0 : static_cast<int>(cols[0].size()));
  for (int c = 0; c < d.cols(); ++c)
    for (int r = 0; r < d.rows(); ++r) {
      if (masks[c][r])
        d.set_missing(r, c);
      else
        d.set_value(r, c, cols[c][r]);
    }
  return d;
}

Dataset load_csv(const std::string& path, const std::vector<std::string>& na_tokens) {
  return parse_csv(read_text_file(path), path, na_tokens);
}

std::string to_csv(const Dataset& d, const std::string& na_token) {
  std::ostringstream out;
  for (int c = 0; c < d.cols(); ++c) {
    if (c) out << ',';
    out << d.label(c);
  }
  out << '\n';
  char buf[40];
  for (int r = 0; r < d.rows(); ++r) {
    for (int c = 0; c < d.cols(); ++c) {
      if (c) out << ',';
      if (d.missing(r, c)) {
        out << na_token;
      } else {
        std::snprintf(buf, sizeof(buf), "%.17g", d.value(r, c));
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const Dataset& d, const std::string& path, const std::string& na_token) {
  write_text_file(path, to_csv(d, na_token));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error("error while reading: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("error while writing: " + path);
}

}  // namespace mvpc
