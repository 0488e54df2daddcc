// waveseg command-line tool: synthetic phantoms, wavelet decomposition,
// feature-domain clustering and active-contour segmentation, evaluation.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "waveseg/waveseg.hpp"

using nlohmann::json;
using namespace waveseg;

namespace {

int exit_code_for(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Format: return 3;
    case ErrorCategory::Io: return 4;
    case ErrorCategory::Dimension: return 5;
    case ErrorCategory::DegenerateRegion: return 6;
    case ErrorCategory::Placement: return 7;
    case ErrorCategory::ConstantImage: return 8;
    case ErrorCategory::Name: return 9;
  }
  return 1;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("WAVESEG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Reflective padding to the next multiple of 2^levels; pad split evenly,
// half-sample symmetric extension (edge sample repeats).
struct Padding {
  int left = 0, top = 0, width = 0, height = 0;  // original dims
  int padded_width = 0, padded_height = 0;
};

int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

GrayImage pad_reflect(const GrayImage& img, int levels, Padding& pad) {
  const int div = 1 << levels;
  pad.width = img.width;
  pad.height = img.height;
  pad.padded_width = ((img.width + div - 1) / div) * div;
  pad.padded_height = ((img.height + div - 1) / div) * div;
  pad.left = (pad.padded_width - img.width) / 2;
  pad.top = (pad.padded_height - img.height) / 2;
  if (pad.padded_width == img.width && pad.padded_height == img.height) return img;
  GrayImage out(pad.padded_width, pad.padded_height);
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      out.at(r, c) = img.at(reflect(r - pad.top, img.height), reflect(c - pad.left, img.width));
    }
  }
  return out;
}

HardLabeling crop_labels(const HardLabeling& lab, const Padding& pad) {
  if (lab.width == pad.width && lab.height == pad.height) return lab;
  HardLabeling out;
  out.width = pad.width;
  out.height = pad.height;
  out.classes = lab.classes;
  out.labels.resize(static_cast<size_t>(pad.width) * pad.height);
  for (int r = 0; r < pad.height; ++r) {
    for (int c = 0; c < pad.width; ++c) {
      out.labels[static_cast<size_t>(r) * pad.width + c] =
          lab.labels[static_cast<size_t>(r + pad.top) * lab.width + (c + pad.left)];
    }
  }
  return out;
}

LevelSet crop_levelset(const LevelSet& ls, const Padding& pad) {
  if (ls.width == pad.width && ls.height == pad.height) return ls;
  LevelSet out;
  out.width = pad.width;
  out.height = pad.height;
  out.eps = ls.eps;
  out.phi.resize(static_cast<size_t>(pad.width) * pad.height);
  for (int r = 0; r < pad.height; ++r) {
    for (int c = 0; c < pad.width; ++c) {
      out.phi[static_cast<size_t>(r) * pad.width + c] =
          ls.phi[static_cast<size_t>(r + pad.top) * ls.width + (c + pad.left)];
    }
  }
  return out;
}

void write_trace_csv(const std::vector<double>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "iter,objective\n";
  char buf[64];
  for (size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, trace[i]);
    out << buf;
  }
  if (!out) throw IoError("write failure on " + path);
}

void write_report(const json& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << report.dump(2) << "\n";
  if (!out) throw IoError("write failure on " + path);
}

json centroids_to_json(const Centroids& cen) {
  json arr = json::array();
  for (int k = 0; k < cen.classes; ++k) {
    arr.push_back(std::vector<double>(cen.at(k).begin(), cen.at(k).end()));
  }
  return arr;
}

FeatureField make_features(const GrayImage& img, const std::string& filter_spec, int levels,
                           double w, const std::string& mode, int threads) {
  FeatureField ff;
  if (levels == 0) {
    ff = intensity_features(img);
  } else {
    const FilterPair pair = resolve_filter(filter_spec);
    ff = feature_field(img, pair, levels, threads);
  }
  WeightingConfig cfg;
  cfg.w = w;
  cfg.mode = mode == "scale" ? WeightingMode::ScalarScale : WeightingMode::SignedPower;
  return apply_weighting(std::move(ff), cfg);
}

// ---- subcommands ------------------------------------------------------

struct PhantomArgs {
  std::string kind = "minefield";
  std::string size = "64x64";
  double noise = 0.0;
  std::uint64_t seed = 1;
  int mines = 10;
  double mine_radius = 4.0;
  double disk_radius = 0.0;
  std::string out;
  std::string truth_path;
  std::string report_path;
};

int run_phantom(const PhantomArgs& a) {
  Timer timer;
  PhantomSpec spec;
  if (a.kind == "minefield") {
    spec.kind = PhantomKind::Minefield;
  } else if (a.kind == "disk") {
    spec.kind = PhantomKind::Disk;
  } else if (a.kind == "composite") {
    spec.kind = PhantomKind::Composite;
  } else {
    throw ConfigError("unknown phantom kind: " + a.kind);
  }
  const size_t x = a.size.find('x');
  if (x == std::string::npos) throw ConfigError("--size must look like 64x64");
  spec.width = std::atoi(a.size.substr(0, x).c_str());
  spec.height = std::atoi(a.size.substr(x + 1).c_str());
  spec.noise_sigma = a.noise;
  spec.seed = a.seed;
  spec.mine_count = a.mines;
  spec.mine_radius = a.mine_radius;
  spec.disk_radius = a.disk_radius;

  const LabeledImage lab = make_phantom(spec);
  write_pgm(lab.image, a.out);
  if (!a.truth_path.empty()) {
    write_label_pgm(lab.truth, static_cast<int>(lab.regions.size()), a.truth_path);
  }
  if (!a.report_path.empty()) {
    json cfg = {{"kind", a.kind},        {"width", spec.width},
                {"height", spec.height}, {"noise", spec.noise_sigma},
                {"seed", spec.seed},     {"mines", spec.mine_count},
                {"mine_radius", spec.mine_radius}, {"disk_radius", spec.disk_radius},
                {"out", a.out},          {"truth", a.truth_path}};
    size_t fg = 0;
    for (int l : lab.truth.labels) fg += l != 0;
    json rep = {{"command", "phantom"},
                {"status", "ok"},
                {"config", cfg},
                {"result",
                 {{"regions", lab.regions},
                  {"nonbackground_fraction", static_cast<double>(fg) / lab.truth.pixel_count()}}},
                {"wall_time_ms", timer.ms()}};
    write_report(rep, a.report_path);
  }
  return 0;
}

struct DecomposeArgs {
  std::string input;
  std::string filter = "bio2";
  int levels = 3;
  std::string out_prefix;
  std::string pyramid_path;
  std::string features_path;
  std::string report_path;
  int threads = 0;
};

GrayImage normalize_band(const Matrix& band) {
  GrayImage img(band.cols, band.rows);
  double mn = band.data.empty() ? 0.0 : band.data[0];
  double mx = mn;
  for (double v : band.data) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  const double span = mx > mn ? mx - mn : 1.0;
  for (size_t i = 0; i < band.data.size(); ++i) img.pixels[i] = (band.data[i] - mn) / span;
  return img;
}

int run_decompose(const DecomposeArgs& a) {
  Timer timer;
  if (a.levels < 1) throw ConfigError("decompose needs --levels >= 1");
  const int threads = resolve_threads(a.threads);
  const GrayImage raw = read_image(a.input);
  Padding pad;
  const GrayImage img = pad_reflect(raw, a.levels, pad);
  const FilterPair pair = resolve_filter(a.filter);
  const WaveletPyramid pyr = wavedec2(img, pair, a.levels);

  std::vector<std::string> written;
  auto emit = [&](const Matrix& band, const std::string& tag) {
    const std::string path = a.out_prefix + "_" + tag + ".pgm";
    write_pgm(normalize_band(band), path);
    written.push_back(path);
  };
  emit(pyr.approx, "LL" + std::to_string(a.levels));
  for (int k = a.levels; k >= 1; --k) {
    emit(pyr.details[k - 1].hl, "HL" + std::to_string(k));
    emit(pyr.details[k - 1].lh, "LH" + std::to_string(k));
    emit(pyr.details[k - 1].hh, "HH" + std::to_string(k));
  }
  if (!a.pyramid_path.empty()) write_pyramid(pyr, a.pyramid_path);
  if (!a.features_path.empty()) {
    const FeatureField ff = feature_field(img, pair, a.levels, threads);
    write_feature_field(ff, a.levels, a.features_path);
  }
  if (!a.report_path.empty()) {
    json cfg = {{"input", a.input},   {"filter", a.filter},
                {"levels", a.levels}, {"out_prefix", a.out_prefix},
                {"pyramid", a.pyramid_path}, {"features", a.features_path},
                {"threads", threads}, {"width", pad.width},
                {"height", pad.height}, {"padded_width", pad.padded_width},
                {"padded_height", pad.padded_height}};
    json rep = {{"command", "decompose"},
                {"status", "ok"},
                {"config", cfg},
                {"result", {{"bands", written}, {"filter_pr_passed", pair.pr_report.passed}}},
                {"wall_time_ms", timer.ms()}};
    write_report(rep, a.report_path);
  }
  return 0;
}

struct ClusterArgs {
  std::string algo = "kmeans";
  int classes = 2;
  double w = 1.0;
  std::string mode = "power";
  std::string filter = "bio2";
  int levels = 3;
  double q = 2.0;
  double tol = 1e-6;
  int max_iter = 300;
  std::uint64_t seed = 0;
  std::string input;
  std::string output;
  std::string report_path;
  std::string trace_path;
  int threads = 0;
};

int run_cluster(const ClusterArgs& a) {
  Timer timer;
  if (a.algo != "kmeans" && a.algo != "fcm") throw ConfigError("--algo must be kmeans or fcm");
  if (a.mode != "power" && a.mode != "scale") throw ConfigError("--mode must be power or scale");
  const int threads = resolve_threads(a.threads);
  const GrayImage raw = read_image(a.input);
  Padding pad;
  const GrayImage img = a.levels > 0 ? pad_reflect(raw, a.levels, pad) : [&] {
    pad.width = pad.padded_width = raw.width;
    pad.height = pad.padded_height = raw.height;
    return raw;
  }();
  const FeatureField ff = make_features(img, a.filter, a.levels, a.w, a.mode, threads);

  ClusterParams params;
  params.classes = a.classes;
  params.fuzzifier = a.q;
  params.tol = a.tol;
  params.max_iter = a.max_iter;
  params.seed = a.seed;
  const ClusterResult res = a.algo == "kmeans" ? kmeans_w(ff, params) : fcm_w(ff, params);
  const HardLabeling labels = crop_labels(res.labels, pad);

  write_label_pgm(labels, a.classes, a.output);
  if (!a.trace_path.empty()) write_trace_csv(res.objective_trace, a.trace_path);
  if (!a.report_path.empty()) {
    json cfg = {{"algo", a.algo},     {"classes", a.classes}, {"w", a.w},
                {"mode", a.mode},     {"filter", a.filter},   {"levels", a.levels},
                {"q", a.q},           {"tol", a.tol},         {"max_iter", a.max_iter},
                {"seed", a.seed},     {"input", a.input},     {"output", a.output},
                {"report", a.report_path}, {"trace", a.trace_path}, {"threads", threads},
                {"width", pad.width}, {"height", pad.height},
                {"padded_width", pad.padded_width}, {"padded_height", pad.padded_height}};
    json rep = {{"command", "cluster"},
                {"status", "ok"},
                {"config", cfg},
                {"result",
                 {{"iterations", res.iterations},
                  {"converged", res.converged},
                  {"final_objective",
                   res.objective_trace.empty() ? 0.0 : res.objective_trace.back()},
                  {"centroids", centroids_to_json(res.centroids)}}},
                {"wall_time_ms", timer.ms()}};
    write_report(rep, a.report_path);
  }
  return 0;
}

struct AcweArgs {
  double w = 1.0;
  std::string mode = "power";
  std::string filter = "bio2";
  int levels = 3;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double mu = -1.0;  // <0 means auto
  double eps = 1.0;
  double dt = -1.0;  // <0 means auto
  std::string init = "circle";
  double init_radius = 0.0;
  int max_iter = 1000;
  double stop_tol = 1e-4;
  std::string input;
  std::string output;
  std::string phi_path;
  std::string report_path;
  std::string trace_path;
  int threads = 0;
};

int run_acwe(const AcweArgs& a) {
  Timer timer;
  if (a.mode != "power" && a.mode != "scale") throw ConfigError("--mode must be power or scale");
  if (a.init != "circle" && a.init != "checkerboard") {
    throw ConfigError("--init must be circle or checkerboard");
  }
  const int threads = resolve_threads(a.threads);
  const GrayImage raw = read_image(a.input);
  Padding pad;
  const GrayImage img = a.levels > 0 ? pad_reflect(raw, a.levels, pad) : [&] {
    pad.width = pad.padded_width = raw.width;
    pad.height = pad.padded_height = raw.height;
    return raw;
  }();
  const FeatureField ff = make_features(img, a.filter, a.levels, a.w, a.mode, threads);

  LevelSet init = init_levelset(img.width, img.height,
                                a.init == "circle" ? LevelSetInit::Circle
                                                   : LevelSetInit::Checkerboard,
                                a.init_radius);
  AcweParams params;
  params.lambda1 = a.lambda1;
  params.lambda2 = a.lambda2;
  if (a.mu >= 0.0) params.mu = a.mu;
  params.eps = a.eps;
  if (a.dt > 0.0) params.dt = a.dt;
  params.max_iter = a.max_iter;
  params.stop_tol = a.stop_tol;
  const AcweResult res = acwe_w(ff, std::move(init), params);

  HardLabeling mask;
  mask.width = img.width;
  mask.height = img.height;
  mask.classes = 2;
  mask.labels.assign(res.mask.begin(), res.mask.end());
  const HardLabeling cropped = crop_labels(mask, pad);
  write_label_pgm(cropped, 2, a.output);
  if (!a.phi_path.empty()) write_levelset(crop_levelset(res.phi, pad), a.phi_path);
  if (!a.trace_path.empty()) write_trace_csv(res.energy_trace, a.trace_path);
  if (!a.report_path.empty()) {
    size_t fg = 0;
    for (int l : cropped.labels) fg += l != 0;
    json cfg = {{"w", a.w},           {"mode", a.mode},       {"filter", a.filter},
                {"levels", a.levels}, {"lambda1", a.lambda1}, {"lambda2", a.lambda2},
                {"mu", a.mu},         {"eps", a.eps},         {"dt", a.dt},
                {"init", a.init},     {"init_radius", a.init_radius},
                {"max_iter", a.max_iter}, {"stop_tol", a.stop_tol},
                {"input", a.input},   {"output", a.output},   {"phi", a.phi_path},
                {"report", a.report_path}, {"trace", a.trace_path}, {"threads", threads},
                {"width", pad.width}, {"height", pad.height},
                {"padded_width", pad.padded_width}, {"padded_height", pad.padded_height}};
    json rep = {{"command", "acwe"},
                {"status", "ok"},
                {"config", cfg},
                {"result",
                 {{"iterations", res.iterations},
                  {"converged", res.converged},
                  {"final_energy", res.energy_trace.empty() ? 0.0 : res.energy_trace.back()},
                  {"resolved_mu", res.resolved_mu},
                  {"resolved_dt", res.resolved_dt},
                  {"mean_inside", res.mean_inside},
                  {"mean_outside", res.mean_outside},
                  {"foreground_fraction",
                   static_cast<double>(fg) / cropped.pixel_count()}}},
                {"wall_time_ms", timer.ms()}};
    write_report(rep, a.report_path);
  }
  return 0;
}

struct EvaluateArgs {
  std::string pred;
  std::string truth;
  int classes = 2;
  std::string report_path;
};

int run_evaluate(const EvaluateArgs& a) {
  Timer timer;
  const HardLabeling pred = read_label_pgm(a.pred, a.classes);
  const HardLabeling truth = read_label_pgm(a.truth, a.classes);
  const EvalReport ev = misclassification(pred, truth, a.classes);

  json result = {{"dice", ev.dice},
                 {"iou", ev.iou},
                 {"misclassification_rate", ev.misclassification_rate},
                 {"permutation", ev.permutation},
                 {"per_class_dice", ev.per_class_dice},
                 {"per_class_iou", ev.per_class_iou}};
  json cfg = {{"pred", a.pred}, {"truth", a.truth}, {"classes", a.classes},
              {"report", a.report_path}};
  json rep = {{"command", "evaluate"},
              {"status", "ok"},
              {"config", cfg},
              {"result", result},
              {"wall_time_ms", timer.ms()}};
  if (!a.report_path.empty()) {
    write_report(rep, a.report_path);
  }
  std::cout << result.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavelet-feature image clustering and segmentation"};
  app.require_subcommand(1);

  PhantomArgs pa;
  auto* phantom_cmd = app.add_subcommand("phantom", "generate a synthetic test image");
  phantom_cmd->add_option("--kind", pa.kind, "minefield|disk|composite");
  phantom_cmd->add_option("--size", pa.size, "WxH, e.g. 64x64");
  phantom_cmd->add_option("--noise", pa.noise, "additive Gaussian noise std");
  phantom_cmd->add_option("--seed", pa.seed, "random seed");
  phantom_cmd->add_option("--mines", pa.mines, "minefield disk count");
  phantom_cmd->add_option("--mine-radius", pa.mine_radius, "minefield disk radius");
  phantom_cmd->add_option("--disk-radius", pa.disk_radius, "disk phantom radius");
  phantom_cmd->add_option("out", pa.out, "output PGM")->required();
  phantom_cmd->add_option("--truth", pa.truth_path, "ground-truth label PGM");
  phantom_cmd->add_option("--report", pa.report_path, "JSON report");
  int phantom_threads = 0;  // accepted for uniformity; generation is serial
  phantom_cmd->add_option("--threads", phantom_threads, "worker threads");

  DecomposeArgs da;
  auto* dec_cmd = app.add_subcommand("decompose", "write per-band visualizations and dumps");
  dec_cmd->add_option("input", da.input, "input image (PGM or grayscale PNG)")->required();
  dec_cmd->add_option("--filter", da.filter, "o1|bio1|bio2|canonical|<bank.json>");
  dec_cmd->add_option("--levels", da.levels, "decomposition levels");
  dec_cmd->add_option("--out-prefix", da.out_prefix, "prefix for band PGMs")->required();
  dec_cmd->add_option("--pyramid", da.pyramid_path, "binary pyramid dump");
  dec_cmd->add_option("--features", da.features_path, "binary feature-field dump");
  dec_cmd->add_option("--report", da.report_path, "JSON report");
  dec_cmd->add_option("--threads", da.threads, "worker threads (default WAVESEG_THREADS or 1)");

  ClusterArgs ca;
  auto* cl_cmd = app.add_subcommand("cluster", "k-means / fuzzy c-means over wavelet features");
  cl_cmd->add_option("--algo", ca.algo, "kmeans|fcm");
  cl_cmd->add_option("--classes", ca.classes, "cluster count");
  cl_cmd->add_option("--w", ca.w, "low-frequency weighting parameter");
  cl_cmd->add_option("--mode", ca.mode, "power|scale");
  cl_cmd->add_option("--filter", ca.filter, "o1|bio1|bio2|canonical|<bank.json>");
  cl_cmd->add_option("--levels", ca.levels, "decomposition levels, 0 = intensity only");
  cl_cmd->add_option("--q", ca.q, "FCM fuzzifier (>1)");
  cl_cmd->add_option("--tol", ca.tol, "convergence tolerance");
  cl_cmd->add_option("--max-iter", ca.max_iter, "iteration cap");
  cl_cmd->add_option("--seed", ca.seed, "seed for centroid initialization");
  cl_cmd->add_option("input", ca.input, "input image")->required();
  cl_cmd->add_option("output", ca.output, "label PGM")->required();
  cl_cmd->add_option("--report", ca.report_path, "JSON report");
  cl_cmd->add_option("--trace", ca.trace_path, "objective CSV (iter,objective)");
  cl_cmd->add_option("--threads", ca.threads, "worker threads");

  AcweArgs aa;
  auto* ac_cmd = app.add_subcommand("acwe", "active contour without edges over wavelet features");
  ac_cmd->add_option("--w", aa.w, "low-frequency weighting parameter");
  ac_cmd->add_option("--mode", aa.mode, "power|scale");
  ac_cmd->add_option("--filter", aa.filter, "o1|bio1|bio2|canonical|<bank.json>");
  ac_cmd->add_option("--levels", aa.levels, "decomposition levels, 0 = intensity only");
  ac_cmd->add_option("--lambda1", aa.lambda1, "foreground fit weight");
  ac_cmd->add_option("--lambda2", aa.lambda2, "background fit weight");
  ac_cmd->add_option("--mu", aa.mu, "length weight (negative = auto)");
  ac_cmd->add_option("--eps", aa.eps, "Heaviside width");
  ac_cmd->add_option("--dt", aa.dt, "time step (non-positive = auto)");
  ac_cmd->add_option("--init", aa.init, "circle|checkerboard");
  ac_cmd->add_option("--init-radius", aa.init_radius, "circle radius (0 = min(w,h)/3)");
  ac_cmd->add_option("--max-iter", aa.max_iter, "iteration cap");
  ac_cmd->add_option("--stop-tol", aa.stop_tol, "sign-change fraction stop rule");
  ac_cmd->add_option("input", aa.input, "input image")->required();
  ac_cmd->add_option("output", aa.output, "foreground mask PGM")->required();
  ac_cmd->add_option("--phi", aa.phi_path, "binary level-set dump");
  ac_cmd->add_option("--report", aa.report_path, "JSON report");
  ac_cmd->add_option("--trace", aa.trace_path, "energy CSV (iter,objective)");
  ac_cmd->add_option("--threads", aa.threads, "worker threads");

  EvaluateArgs ea;
  auto* ev_cmd = app.add_subcommand("evaluate", "compare a labeling against ground truth");
  ev_cmd->add_option("pred", ea.pred, "predicted label PGM")->required();
  ev_cmd->add_option("truth", ea.truth, "ground-truth label PGM")->required();
  ev_cmd->add_option("--classes", ea.classes, "class count");
  ev_cmd->add_option("--report", ea.report_path, "JSON report");
  int eval_threads = 0;  // accepted for uniformity
  ev_cmd->add_option("--threads", eval_threads, "worker threads");

  try {
    app.parse(argc, argv);
    if (phantom_cmd->parsed()) return run_phantom(pa);
    if (dec_cmd->parsed()) return run_decompose(da);
    if (cl_cmd->parsed()) return run_cluster(ca);
    if (ac_cmd->parsed()) return run_acwe(aa);
    if (ev_cmd->parsed()) return run_evaluate(ea);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.category()) << ": " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
