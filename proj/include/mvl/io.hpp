#pragma once

#include "mvl/types.hpp"

#include <cstdint>
#include <string>

namespace mvl {

// File parse or write failure; messages name the file and, where it makes
// sense, the 1-based line number.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix CSV: comma-separated, no header, one data row per matrix row,
// '.' decimal separator. "NA" reads as NaN; NaN writes back as "NA".
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

IntMatrix read_int_matrix_csv(const std::string& path);
void write_int_matrix_csv(const std::string& path, const IntMatrix& m);

// Labels: one entry per line, either an integer level or NA for unlabeled.
void read_labels_csv(const std::string& path, IntVector& y,
                     BoolArray& observed);
void write_labels_csv(const std::string& path, const IntVector& y,
                      const BoolArray& observed);

// Model constants plus the run-level options that travel with them in one
// flat `key = value` file.
struct FitConfig {
  Hyperparameters hyper;
  std::uint64_t seed = 0;
  double tol = 1e-5;
  int max_outer = 200;
  int f_sweeps = 2;
};

// `key = value` lines, '#' starts a comment, keys mirror the Hyperparameters
// field names (kernel fields flattened as kernel, kernel_lengthscale,
// kernel_offset, kernel_degree; cutpoints as comma lists with -inf/inf).
// Unknown keys are rejected with a message naming the key. Values parse on
// top of `base`, so a partial file overrides only what it mentions.
FitConfig read_config(const std::string& path, FitConfig base = {});
void write_config(const std::string& path, const FitConfig& c);

// Apply a single config assignment; shared by the file reader and the CLI.
void apply_config_entry(FitConfig& c, const std::string& key,
                        const std::string& value);

std::vector<double> parse_cutpoints(const std::string& text);
std::string format_cutpoints(const std::vector<double>& c);

std::string kernel_family_name(KernelFamily f);
KernelFamily parse_kernel_family(const std::string& name);

// Convenience loader: x and z are required, y_path may be empty for an
// unlabeled dataset.
Dataset read_dataset(const std::string& x_path, const std::string& z_path,
                     const std::string& y_path = "");

}  // namespace mvl
