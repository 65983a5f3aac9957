#include "mvl/labels_gp.hpp"

#include "mvl/special_math.hpp"

#include <cmath>
#include <sstream>

namespace mvl {

void update_f_sweep(VariationalState& s, const IntVector& y,
                    const BoolArray& y_observed,
                    const std::vector<double>& cutpoints_y,
                    const KernelMatrix& km) {
  const int n = s.n_gp();
  if (km.n() != n)
    throw std::invalid_argument(
        "update_f_sweep: kernel size does not match the label block");
  if (y.size() != 0 && (y.size() != n || y_observed.size() != n))
    throw std::invalid_argument(
        "update_f_sweep: labels must cover the label block");
  const Matrix& prec = km.inv;
  Vector v = prec * s.f_expect;  // running P <f>
  for (int i = 0; i < n; ++i) {
    const double pii = prec(i, i);
    if (!(pii > 0.0)) {
      std::ostringstream msg;
      msg << "conditional variance at site " << i
          << " is not positive (diagonal precision " << pii << ")";
      throw IllConditionedKernel(msg.str());
    }
    const double var = 1.0 / pii;
    const double mean = s.f_expect(i) - v(i) * var;
    double fe, fs;
    if (y.size() != 0 && y_observed(i)) {
      const int r = y(i);
      const TruncInterval iv{cutpoints_y[r], cutpoints_y[r + 1]};
      const TruncMoments m = trunc_norm_moments(mean, std::sqrt(var), iv);
      fe = m.mean;
      fs = m.second;
    } else {
      fe = mean;
      fs = mean * mean + var;
    }
    const double delta = fe - s.f_expect(i);
    if (delta != 0.0) v += prec.col(i) * delta;
    s.f_bar(i) = mean;
    s.f_var(i) = var;
    s.f_expect(i) = fe;
    s.f_sq_expect(i) = fs;
  }
}

std::pair<Vector, Matrix> f_moments(const VariationalState& s) {
  Matrix outer = s.f_expect * s.f_expect.transpose();
  outer.diagonal() = s.f_sq_expect;
  return {s.f_expect, outer};
}

}  // namespace mvl
