#pragma once

#include <string>
#include <vector>

namespace mvpc {

// Numeric table with per-cell missingness. Missing cells are tracked by a
// mask, never by sentinel values: the stored payload of a masked cell is NaN,
// and the deletion helpers below are the supported way to get analysable
// rows, so missing values cannot silently leak into arithmetic.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> labels, int rows);

  int rows() const { return rows_; }
  int cols() const { return static_cast<int>(columns_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int col) const;
  int column_index(const std::string& label) const;  // -1 if unknown

  double value(int row, int col) const;
  bool missing(int row, int col) const;
  void set_value(int row, int col, double v);
  void set_missing(int row, int col);

  // Raw access for hot loops. column_mask returns nullptr when the column has
  // no missing entries, so callers can skip per-row checks entirely.
  const double* column_data(int col) const;
  const unsigned char* column_mask(int col) const;
  bool column_has_missing(int col) const;
  int observed_count(int col) const;
  int fully_observed_row_count() const;

 private:
  void check_cell(int row, int col) const;

  int rows_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> columns_;         // column-major payload
  std::vector<std::vector<unsigned char>> masks_;    // 1 = missing
  std::vector<int> missing_count_;
};

// Rows of a parent dataset in which a chosen set of columns is fully
// observed. Shares storage with the parent; holds row indices only.
struct DataView {
  const Dataset* data = nullptr;
  std::vector<int> rows;  // indices into the parent's rows
  std::vector<int> cols;  // parent column ids, in the order requested

  int row_count() const { return static_cast<int>(rows.size()); }
  int col_count() const { return static_cast<int>(cols.size()); }
  double at(int r, int j) const { return data->value(rows[r], cols[j]); }
};

// View of the rows where every listed column is observed (test-wise deletion).
DataView testwise_delete(const Dataset& d, const std::vector<int>& cols);

// New dataset containing only the rows with no missing entry anywhere.
Dataset listwise_delete(const Dataset& d);

// 0/1 missingness indicator of a column: 1 where the value is missing.
std::vector<double> indicator_column(const Dataset& d, int col);

// --- CSV --------------------------------------------------------------------
// Comma-separated, one header row with column names, numeric cells. Cells
// matching one of na_tokens (after trimming surrounding whitespace) are
// treated as missing. Errors carry row/column positions.

std::vector<std::string> default_na_tokens();  // "", "NA", "NaN"

Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& na_tokens = default_na_tokens());
Dataset parse_csv(const std::string& text, const std::string& origin,
                  const std::vector<std::string>& na_tokens = default_na_tokens());

std::string to_csv(const Dataset& d, const std::string& na_token = "NA");
void write_csv(const Dataset& d, const std::string& path,
               const std::string& na_token = "NA");

// Small file helpers shared across the toolkit.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mvpc
