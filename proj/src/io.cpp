#include "mvl/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mvl {

namespace {

[[noreturn]] void fail(const std::string& path, int line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": " << what;
  throw IoError(msg.str());
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& tok, const std::string& path,
                    int line) {
  std::string t = tok;
  // from_chars handles inf/nan spellings but not an explicit leading '+'
  if (!t.empty() && t[0] == '+') t = t.substr(1);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    fail(path, line, "cannot parse '" + tok + "' as a number");
  return v;
}

int parse_int(const std::string& tok, const std::string& path, int line) {
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    fail(path, line, "cannot parse '" + tok + "' as an integer");
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  return out;
}

// reads all non-empty lines split into tokens, enforcing a rectangle
std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  int lineno = 0;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto toks = split_csv(line);
    if (rows.empty()) {
      width = toks.size();
    } else if (toks.size() != width) {
      std::ostringstream msg;
      msg << "row has " << toks.size() << " fields, expected " << width;
      fail(path, lineno, msg.str());
    }
    rows.push_back(std::move(toks));
  }
  if (rows.empty()) fail(path, 1, "file holds no data rows");
  return rows;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  const auto rows = read_rows(path);
  Matrix m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) {
      const std::string& tok = rows[i][j];
      m(i, j) = (tok == "NA")
                    ? std::numeric_limits<double>::quiet_NaN()
                    : parse_double(tok, path, static_cast<int>(i) + 1);
    }
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError(path + ": write failed");
}

IntMatrix read_int_matrix_csv(const std::string& path) {
  const auto rows = read_rows(path);
  IntMatrix m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(i, j) = parse_int(rows[i][j], path, static_cast<int>(i) + 1);
  return m;
}

void write_int_matrix_csv(const std::string& path, const IntMatrix& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError(path + ": write failed");
}

void read_labels_csv(const std::string& path, IntVector& y,
                     BoolArray& observed) {
  const auto rows = read_rows(path);
  if (rows[0].size() != 1)
    fail(path, 1, "labels must have exactly one value per line");
  const int n = static_cast<int>(rows.size());
  y = IntVector::Zero(n);
  observed = BoolArray::Constant(n, false);
  for (int i = 0; i < n; ++i) {
    const std::string& tok = rows[i][0];
    if (tok == "NA") continue;
    y(i) = parse_int(tok, path, i + 1);
    observed(i) = true;
  }
}

void write_labels_csv(const std::string& path, const IntVector& y,
                      const BoolArray& observed) {
  if (y.size() != observed.size())
    throw IoError(path + ": labels and mask differ in length");
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (observed(i))
      out << y(i) << '\n';
    else
      out << "NA\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

std::vector<double> parse_cutpoints(const std::string& text) {
  const auto toks = split_csv(text);
  std::vector<double> c;
  for (const auto& t : toks) {
    if (t == "-inf")
      c.push_back(-kInf);
    else if (t == "inf" || t == "+inf")
      c.push_back(kInf);
    else
      c.push_back(parse_double(t, "cutpoints", 1));
  }
  return c;
}

std::string format_cutpoints(const std::vector<double>& c) {
  std::string out;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) out += ',';
    if (std::isinf(c[i]))
      out += c[i] < 0 ? "-inf" : "inf";
    else
      out += format_double(c[i]);
  }
  return out;
}

std::string kernel_family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::Linear:
      return "linear";
    case KernelFamily::Rbf:
      return "rbf";
    case KernelFamily::Polynomial:
      return "polynomial";
  }
  return "linear";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "linear") return KernelFamily::Linear;
  if (name == "rbf") return KernelFamily::Rbf;
  if (name == "polynomial") return KernelFamily::Polynomial;
  throw IoError("unknown kernel family '" + name +
                "' (expected linear, rbf, or polynomial)");
}

void apply_config_entry(FitConfig& c, const std::string& key,
                        const std::string& value) {
  Hyperparameters& h = c.hyper;
  const char* f = "config";
  if (key == "sigma1_sq")
    h.sigma1_sq = parse_double(value, f, 1);
  else if (key == "sigma2_sq")
    h.sigma2_sq = parse_double(value, f, 1);
  else if (key == "l1")
    h.l1 = parse_double(value, f, 1);
  else if (key == "l2")
    h.l2 = parse_double(value, f, 1);
  else if (key == "d1")
    h.d1 = parse_double(value, f, 1);
  else if (key == "d2")
    h.d2 = parse_double(value, f, 1);
  else if (key == "r1")
    h.r1 = parse_double(value, f, 1);
  else if (key == "r2")
    h.r2 = parse_double(value, f, 1);
  else if (key == "cutpoints_z")
    h.cutpoints_z = parse_cutpoints(value);
  else if (key == "cutpoints_y")
    h.cutpoints_y = parse_cutpoints(value);
  else if (key == "kernel")
    h.kernel.family = parse_kernel_family(value);
  else if (key == "kernel_lengthscale")
    h.kernel.lengthscale = parse_double(value, f, 1);
  else if (key == "kernel_offset")
    h.kernel.offset = parse_double(value, f, 1);
  else if (key == "kernel_degree")
    h.kernel.degree = parse_int(value, f, 1);
  else if (key == "k")
    h.k = parse_int(value, f, 1);
  else if (key == "jitter")
    h.jitter = parse_double(value, f, 1);
  else if (key == "seed")
    c.seed = static_cast<std::uint64_t>(
        std::strtoull(value.c_str(), nullptr, 10));
  else if (key == "tol")
    c.tol = parse_double(value, f, 1);
  else if (key == "max_outer")
    c.max_outer = parse_int(value, f, 1);
  else if (key == "f_sweeps")
    c.f_sweeps = parse_int(value, f, 1);
  else
    throw IoError("unknown config key '" + key + "'");
}

FitConfig read_config(const std::string& path, FitConfig base) {
  std::ifstream in = open_in(path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(path, lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(path, lineno, "empty key");
    try {
      apply_config_entry(base, key, value);
    } catch (const IoError& e) {
      fail(path, lineno, e.what());
    }
  }
  return base;
}

void write_config(const std::string& path, const FitConfig& c) {
  std::ofstream out = open_out(path);
  const Hyperparameters& h = c.hyper;
  out << "sigma1_sq = " << format_double(h.sigma1_sq) << '\n';
  out << "sigma2_sq = " << format_double(h.sigma2_sq) << '\n';
  out << "l1 = " << format_double(h.l1) << '\n';
  out << "l2 = " << format_double(h.l2) << '\n';
  out << "d1 = " << format_double(h.d1) << '\n';
  out << "d2 = " << format_double(h.d2) << '\n';
  out << "r1 = " << format_double(h.r1) << '\n';
  out << "r2 = " << format_double(h.r2) << '\n';
  out << "cutpoints_z = " << format_cutpoints(h.cutpoints_z) << '\n';
  out << "cutpoints_y = " << format_cutpoints(h.cutpoints_y) << '\n';
  out << "kernel = " << kernel_family_name(h.kernel.family) << '\n';
  out << "kernel_lengthscale = " << format_double(h.kernel.lengthscale)
      << '\n';
  out << "kernel_offset = " << format_double(h.kernel.offset) << '\n';
  out << "kernel_degree = " << h.kernel.degree << '\n';
  out << "k = " << h.k << '\n';
  out << "jitter = " << format_double(h.jitter) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "tol = " << format_double(c.tol) << '\n';
  out << "max_outer = " << c.max_outer << '\n';
  out << "f_sweeps = " << c.f_sweeps << '\n';
  if (!out) throw IoError(path + ": write failed");
}

Dataset read_dataset(const std::string& x_path, const std::string& z_path,
                     const std::string& y_path) {
  Dataset d;
  d.x = read_matrix_csv(x_path);
  d.z = read_int_matrix_csv(z_path);
  if (!y_path.empty()) read_labels_csv(y_path, d.y, d.y_observed);
  return d;
}

}  // namespace mvl
