#include "mvl/predict.hpp"

#include "mvl/kernels.hpp"

#include <algorithm>

namespace mvl {

TransductiveResult fit_transductive(const Dataset& train, const Dataset& test,
                                    const Hyperparameters& h,
                                    const FitOptions& opts) {
  if (!train.has_labels())
    throw std::invalid_argument("fit_transductive: train set has no labels");
  if (test.has_labels()) {
    for (Eigen::Index j = 0; j < test.y_observed.size(); ++j)
      if (test.y_observed(j))
        throw std::invalid_argument(
            "fit_transductive: test set must not carry observed labels");
  }
  if (train.p() != test.p() || train.q() != test.q())
    throw std::invalid_argument(
        "fit_transductive: train and test feature dimensions differ");

  const int n_tr = train.n(), n_te = test.n();
  Dataset joint;
  joint.x.resize(train.p(), n_tr + n_te);
  joint.x << train.x, test.x;
  joint.z.resize(train.q(), n_tr + n_te);
  joint.z << train.z, test.z;
  joint.y = IntVector::Zero(n_tr + n_te);
  joint.y.head(n_tr) = train.y;
  joint.y_observed = BoolArray::Constant(n_tr + n_te, false);
  joint.y_observed.head(n_tr) = train.y_observed;

  FitOptions jopts = opts;
  jopts.gp_columns = n_tr;
  FitResult r = fit(joint, h, jopts);

  TransductiveResult out;
  out.u_train = r.u.leftCols(n_tr);
  out.u_test = r.u.rightCols(n_te);
  out.state = std::move(r.state);
  out.report = std::move(r.report);
  return out;
}

LabelPrediction predict_labels(const Matrix& u_test, const Matrix& u_train,
                               const Vector& f_train, const KernelSpec& spec,
                               double jitter,
                               const std::vector<double>& cutpoints_y) {
  if (u_test.rows() != u_train.rows())
    throw std::invalid_argument(
        "predict_labels: latent dimensions of test and train differ");
  if (f_train.size() != u_train.cols())
    throw std::invalid_argument(
        "predict_labels: f_train must cover the train columns");
  if (cutpoints_y.size() < 2)
    throw std::invalid_argument("predict_labels: missing cutpoints");

  const KernelMatrix ktt = kernel_matrix(u_train, spec, jitter);
  const Matrix kcross = kernel_cross(u_test, u_train, spec);
  LabelPrediction out;
  out.f = kcross * ktt.solve(f_train);
  out.y = IntVector(u_test.cols());
  for (Eigen::Index i = 0; i < out.f.size(); ++i) {
    const auto it = std::upper_bound(cutpoints_y.begin(), cutpoints_y.end(),
                                     out.f(i));
    out.y(i) = static_cast<int>(it - cutpoints_y.begin()) - 1;
  }
  return out;
}

}  // namespace mvl
