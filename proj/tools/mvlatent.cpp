#include "mvl/em_driver.hpp"
#include "mvl/io.hpp"
#include "mvl/predict.hpp"
#include "mvl/simbench.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace mvl;

namespace {

// Output directory that tracks every CSV it writes and records the shapes in
// a MANIFEST file.
class OutDir {
 public:
  explicit OutDir(const std::string& dir) : dir_(dir) {
    fs::create_directories(dir_);
  }

  void matrix(const std::string& name, const Matrix& m) {
    write_matrix_csv((dir_ / name).string(), m);
    note(name, m.rows(), m.cols());
  }

  void ints(const std::string& name, const IntMatrix& m) {
    write_int_matrix_csv((dir_ / name).string(), m);
    note(name, m.rows(), m.cols());
  }

  void labels(const std::string& name, const IntVector& y,
              const BoolArray& observed) {
    write_labels_csv((dir_ / name).string(), y, observed);
    note(name, y.size(), 1);
  }

  void config(const std::string& name, const FitConfig& c) {
    write_config((dir_ / name).string(), c);
  }

  void finish() {
    std::ofstream out(dir_ / "MANIFEST");
    if (!out) throw IoError((dir_ / "MANIFEST").string() + ": cannot write");
    for (const auto& line : entries_) out << line << '\n';
  }

  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }

 private:
  void note(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    entries_.push_back(name + " " + std::to_string(rows) + " " +
                       std::to_string(cols));
  }

  fs::path dir_;
  std::vector<std::string> entries_;
};

// Model and fit settings shared by fit, select-k, and predict. Every knob is
// exposed as a flag whose name equals its config key; flags beat the file.
struct ModelCli {
  std::string config_path;
  std::map<std::string, std::string> raw;
  CLI::App* sub = nullptr;

  void attach(CLI::App* s) {
    sub = s;
    s->add_option("--config", config_path,
                  "config file with key = value lines");
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"sigma1_sq", "slab variance"},
        {"sigma2_sq", "spike variance"},
        {"l1", "Beta prior a, continuous view"},
        {"l2", "Beta prior b, continuous view"},
        {"d1", "Beta prior a, ordinal view"},
        {"d2", "Beta prior b, ordinal view"},
        {"r1", "Gamma prior shape of the noise precision"},
        {"r2", "Gamma prior rate of the noise precision"},
        {"cutpoints_z", "ordinal view cutpoints, e.g. -inf,-1,1,inf"},
        {"cutpoints_y", "label cutpoints, e.g. -inf,0,inf"},
        {"kernel", "kernel family: linear, rbf, polynomial"},
        {"kernel_lengthscale", "rbf lengthscale"},
        {"kernel_offset", "polynomial offset"},
        {"kernel_degree", "polynomial degree"},
        {"k", "latent dimension"},
        {"jitter", "kernel diagonal jitter"},
        {"seed", "random seed"},
        {"tol", "relative objective tolerance"},
        {"max_outer", "outer iteration cap"},
        {"f_sweeps", "label sweeps per iteration"},
    };
    for (const auto& [key, help] : keys) {
      raw[key];  // create the slot first so the pointer below is stable
      s->add_option("--" + key, raw[key], help);
    }
  }

  FitConfig resolve() const {
    FitConfig cfg;
    if (!config_path.empty()) cfg = read_config(config_path);
    for (const auto& [key, value] : raw)
      if (sub->count("--" + key) > 0) apply_config_entry(cfg, key, value);
    return cfg;
  }
};

FitOptions fit_options_from(const FitConfig& cfg, bool verbose) {
  FitOptions o;
  o.tol = cfg.tol;
  o.max_outer = cfg.max_outer;
  o.f_sweeps = cfg.f_sweeps;
  o.seed = cfg.seed;
  o.verbose = verbose;
  return o;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t pos = text.find(',', start);
    const std::string tok =
        text.substr(start, pos == std::string::npos ? pos : pos - start);
    if (tok.empty()) throw IoError("empty entry in list '" + text + "'");
    out.push_back(std::stoi(tok));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

struct SimulateArgs {
  std::string out;
  int n = 200, p = 40, q = 40, k = 5;
  std::uint64_t seed = 0;
  double noise_sd = 1.0;
  std::string cutpoints = "-inf,-1,1,inf";
};

int run_simulate(const SimulateArgs& a) {
  GenerateParams gp;
  gp.n = a.n;
  gp.p = a.p;
  gp.q = a.q;
  gp.k = a.k;
  gp.seed = a.seed;
  gp.noise_sd = a.noise_sd;
  gp.cutpoints_z = parse_cutpoints(a.cutpoints);
  const auto [d, truth] = generate(gp);

  OutDir out(a.out);
  out.matrix("x.csv", d.x);
  out.ints("z.csv", d.z);
  out.labels("y.csv", d.y, d.y_observed);
  out.matrix("g_true.csv", truth.g_true);
  out.matrix("h_true.csv", truth.h_true);
  out.matrix("u_true.csv", truth.u_true);
  out.matrix("links_true.csv", truth.link_truth);
  out.finish();
  std::cout << "simulated n=" << a.n << " p=" << a.p << " q=" << a.q
            << " k=" << a.k << " into " << a.out << "\n";
  return 0;
}

struct FitArgs {
  std::string x, z, y, out;
  bool verbose = false;
  ModelCli model;
};

int run_fit(const FitArgs& a) {
  FitConfig cfg = a.model.resolve();
  const Dataset d = read_dataset(a.x, a.z, a.y);
  const FitResult r = fit(d, cfg.hyper, fit_options_from(cfg, a.verbose));

  OutDir out(a.out);
  out.matrix("u.csv", r.u);
  out.matrix("g_mean.csv", r.state.g_mean);
  out.matrix("h_mean.csv", r.state.h_mean);
  out.matrix("beta.csv", r.state.beta);
  out.matrix("alpha.csv", r.state.alpha);
  out.matrix("f_expect.csv", r.state.f_expect);
  out.matrix("elbo_trace.csv", r.report.elbo_trace);
  out.matrix("assoc_scores.csv",
             association_scores(r.state.g_mean, r.state.h_mean));
  // inputs and resolved settings travel with the model so predict can refit
  out.matrix("x.csv", d.x);
  out.ints("z.csv", d.z);
  if (d.has_labels()) out.labels("y.csv", d.y, d.y_observed);
  out.config("config.txt", cfg);
  out.finish();
  std::cout << "fit: iterations=" << r.report.iterations
            << " converged=" << (r.report.converged ? 1 : 0)
            << " elbo=" << r.report.elbo_trace(r.report.iterations - 1)
            << "\n";
  return 0;
}

struct SelectKArgs {
  std::string x, z, y, out, candidates = "3,5,8";
  bool verbose = false;
  ModelCli model;
};

int run_select_k(const SelectKArgs& a) {
  FitConfig cfg = a.model.resolve();
  const Dataset d = read_dataset(a.x, a.z, a.y);
  const std::vector<int> cand = parse_int_list(a.candidates);
  const SelectKResult r =
      select_k(d, cfg.hyper, cand, fit_options_from(cfg, a.verbose));

  OutDir out(a.out);
  Matrix table(r.objective_by_k.size(), 2);
  for (size_t i = 0; i < r.objective_by_k.size(); ++i) {
    table(i, 0) = r.objective_by_k[i].first;
    table(i, 1) = r.objective_by_k[i].second;
  }
  out.matrix("k_table.csv", table);
  out.finish();
  std::cout << "selected k = " << r.best_k << "\n";
  return 0;
}

struct PredictArgs {
  std::string model_dir, x_test, z_test, out;
  bool verbose = false;
};

int run_predict(const PredictArgs& a) {
  const fs::path mdir(a.model_dir);
  const FitConfig cfg = read_config((mdir / "config.txt").string());
  const Dataset train =
      read_dataset((mdir / "x.csv").string(), (mdir / "z.csv").string(),
                   fs::exists(mdir / "y.csv") ? (mdir / "y.csv").string()
                                              : "");
  if (!train.has_labels())
    throw IoError(a.model_dir + ": model directory carries no labels");
  const Dataset test = read_dataset(a.x_test, a.z_test);

  const TransductiveResult tr =
      fit_transductive(train, test, cfg.hyper,
                       fit_options_from(cfg, a.verbose));
  const LabelPrediction pred =
      predict_labels(tr.u_test, tr.u_train, tr.state.f_expect,
                     cfg.hyper.kernel, cfg.hyper.jitter,
                     cfg.hyper.cutpoints_y);

  OutDir out(a.out);
  out.labels("y_pred.csv", pred.y,
             BoolArray::Constant(pred.y.size(), true));
  out.matrix("f_test.csv", pred.f);
  out.matrix("u_test.csv", tr.u_test);
  out.finish();
  std::cout << "predicted " << pred.y.size() << " labels into " << a.out
            << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string pred, truth, scores, links, out;
};

int run_evaluate(const EvaluateArgs& a) {
  const bool have_labels = !a.pred.empty() || !a.truth.empty();
  const bool have_links = !a.scores.empty() || !a.links.empty();
  if (have_labels && (a.pred.empty() || a.truth.empty()))
    throw IoError("evaluate: --pred and --truth go together");
  if (have_links && (a.scores.empty() || a.links.empty()))
    throw IoError("evaluate: --scores and --links go together");
  if (!have_labels && !have_links)
    throw IoError("evaluate: nothing to do; give --pred/--truth or "
                  "--scores/--links");

  std::vector<std::string> metric_lines;
  PRCurve curve;
  if (have_labels) {
    IntVector yp, yt;
    BoolArray obs_p, obs_t;
    read_labels_csv(a.pred, yp, obs_p);
    read_labels_csv(a.truth, yt, obs_t);
    if (yp.size() != yt.size())
      throw IoError("evaluate: prediction and truth lengths differ");
    const BoolArray mask = obs_p && obs_t;
    const double acc = accuracy(yp, yt, mask);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "accuracy = %.17g", acc);
    metric_lines.push_back(buf);
  }
  if (have_links) {
    const Matrix scores = read_matrix_csv(a.scores);
    const Matrix links = read_matrix_csv(a.links);
    curve = precision_recall(scores, links);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "aupr = %.17g", curve.aupr);
    metric_lines.push_back(buf);
  }

  for (const auto& line : metric_lines) std::cout << line << "\n";
  if (!a.out.empty()) {
    OutDir out(a.out);
    {
      std::ofstream mf(out.path("metrics.txt"));
      if (!mf) throw IoError(out.path("metrics.txt") + ": cannot write");
      for (const auto& line : metric_lines) mf << line << '\n';
    }
    if (have_links) {
      Matrix pr(curve.points.size(), 3);
      for (size_t i = 0; i < curve.points.size(); ++i) {
        pr(i, 0) = curve.points[i].threshold;
        pr(i, 1) = curve.points[i].precision;
        pr(i, 2) = curve.points[i].recall;
      }
      out.matrix("pr_curve.csv", pr);
    }
    out.finish();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "joint latent-factor model over a continuous and an ordinal view with "
      "ordinal label prediction"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "generate a synthetic dataset");
  sim_cmd->add_option("--out", sim.out, "output directory")->required();
  sim_cmd->add_option("--n", sim.n, "subjects");
  sim_cmd->add_option("--p", sim.p, "continuous features");
  sim_cmd->add_option("--q", sim.q, "ordinal features");
  sim_cmd->add_option("--k", sim.k, "latent factors");
  sim_cmd->add_option("--seed", sim.seed, "random seed");
  sim_cmd->add_option("--noise-sd", sim.noise_sd,
                      "noise scale of the continuous view");
  sim_cmd->add_option("--cutpoints", sim.cutpoints,
                      "ordinal cutpoints, e.g. -inf,-1,1,inf");

  FitArgs fa;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit the model");
  fit_cmd->add_option("--x", fa.x, "continuous view CSV (p x n)")->required();
  fit_cmd->add_option("--z", fa.z, "ordinal view CSV (q x n)")->required();
  fit_cmd->add_option("--y", fa.y, "labels CSV, one entry or NA per line");
  fit_cmd->add_option("--out", fa.out, "output directory")->required();
  fit_cmd->add_flag("--verbose", fa.verbose, "progress lines on stderr");
  fa.model.attach(fit_cmd);

  SelectKArgs ska;
  CLI::App* sk_cmd = app.add_subcommand(
      "select-k", "fit several latent dimensions and keep the best");
  sk_cmd->add_option("--x", ska.x, "continuous view CSV")->required();
  sk_cmd->add_option("--z", ska.z, "ordinal view CSV")->required();
  sk_cmd->add_option("--y", ska.y, "labels CSV");
  sk_cmd->add_option("--out", ska.out, "output directory")->required();
  sk_cmd->add_option("--candidates", ska.candidates,
                     "comma-separated latent dimensions to try");
  sk_cmd->add_flag("--verbose", ska.verbose, "progress lines on stderr");
  ska.model.attach(sk_cmd);

  PredictArgs pa;
  CLI::App* pred_cmd = app.add_subcommand(
      "predict", "transductive label prediction from a fitted model");
  pred_cmd->add_option("--model", pa.model_dir, "directory written by fit")
      ->required();
  pred_cmd->add_option("--x-test", pa.x_test, "test continuous view CSV")
      ->required();
  pred_cmd->add_option("--z-test", pa.z_test, "test ordinal view CSV")
      ->required();
  pred_cmd->add_option("--out", pa.out, "output directory")->required();
  pred_cmd->add_flag("--verbose", pa.verbose, "progress lines on stderr");

  EvaluateArgs ea;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "accuracy and precision-recall metrics");
  eval_cmd->add_option("--pred", ea.pred, "predicted labels CSV");
  eval_cmd->add_option("--truth", ea.truth, "true labels CSV");
  eval_cmd->add_option("--scores", ea.scores, "association scores CSV");
  eval_cmd->add_option("--links", ea.links, "binary link truth CSV");
  eval_cmd->add_option("--out", ea.out, "optional metrics output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (fit_cmd->parsed()) return run_fit(fa);
    if (sk_cmd->parsed()) return run_select_k(ska);
    if (pred_cmd->parsed()) return run_predict(pa);
    if (eval_cmd->parsed()) return run_evaluate(ea);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
