// slicenormals command-line tool: gen, normals, slice, eval, bench.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slicenormals/slicenormals.hpp"

namespace sn = slicenormals;

namespace {

sn::OrganizedScan load_scan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scan file '" + path + "'");
  try {
    return sn::read_scan(in);
  } catch (const sn::ParseError& e) {
    throw std::runtime_error("'" + path + "': " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  return out;
}

sn::Scene scene_by_name(const std::string& name, double wall_distance) {
  if (name == "corner") return sn::make_corner_scene(wall_distance);
  if (name == "floor") return sn::make_floor_scene();
  return sn::make_box_scene();
}

struct GenOptions {
  std::string preset = "vlp16";
  std::string scene = "corner";
  double wall_distance = 5.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string gt_out;
};

int run_gen(const GenOptions& o) {
  sn::SensorRig rig = sn::rig_preset(o.preset);
  rig.range_noise_sigma = o.noise_sigma;
  rig.noise_seed = o.seed;
  auto [scan, gt] = sn::simulate(rig, scene_by_name(o.scene, o.wall_distance));
  auto out = open_output(o.out);
  sn::write_scan(scan, out);
  if (!o.gt_out.empty()) {
    auto gt_out = open_output(o.gt_out);
    sn::write_ground_truth_csv(gt, gt_out);
  }
  return 0;
}

struct NormalsOptions {
  std::string input;
  std::string method = "labeled";
  double alpha_deg = sn::ClusteringParams::kDefaultThresholdDeg;
  std::string ply;
  std::string csv;
};

int run_normals(const NormalsOptions& o) {
  const auto method = sn::NormalMethod::parse(o.method, sn::ClusteringParams::from_degrees(o.alpha_deg));
  const auto scan = load_scan(o.input);
  const auto normals = method.estimate(scan);
  if (!o.ply.empty()) {
    auto out = open_output(o.ply);
    sn::export_ply(scan, normals, out);
  }
  if (!o.csv.empty()) {
    auto out = open_output(o.csv);
    sn::write_normals_csv(normals, out);
  }
  if (o.ply.empty() && o.csv.empty()) sn::write_normals_csv(normals, std::cout);
  return 0;
}

struct SliceOptions {
  std::string input;
  std::size_t column = 0;
  double alpha_deg = sn::ClusteringParams::kDefaultThresholdDeg;
  std::string csv;
};

void write_slice_csv(const sn::Slice& slice, const sn::PointLabels& labels,
                     const std::vector<sn::SliceNormal>& normals, std::ostream& out) {
  using sn::detail::format_double;
  out << "row,x,y,z,label,nx,ny,nz,has_normal\n";
  for (std::size_t i = 0; i < slice.size(); ++i) {
    const sn::Vec3& p = slice.point(i);
    const sn::Vec3 n = normals[i].normal.value_or(sn::Vec3::Zero());
    out << slice.entries[i].row << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
        << format_double(p.z()) << ',' << labels[i] << ',' << format_double(n.x()) << ','
        << format_double(n.y()) << ',' << format_double(n.z()) << ','
        << (normals[i].normal ? 1 : 0) << '\n';
  }
}

int run_slice(const SliceOptions& o) {
  const auto params = sn::ClusteringParams::from_degrees(o.alpha_deg);
  const auto scan = load_scan(o.input);
  if (o.column >= scan.cols()) {
    throw CLI::ValidationError("--column", "column " + std::to_string(o.column) +
                                               " out of range for scan with " +
                                               std::to_string(scan.cols()) + " columns");
  }
  const auto slice = sn::extract_slice(scan, o.column);
  const auto labels = sn::label_points(slice, params);
  const auto normals = sn::slice_normals_2d(slice, params);
  if (o.csv.empty()) {
    write_slice_csv(slice, labels, normals, std::cout);
  } else {
    auto out = open_output(o.csv);
    write_slice_csv(slice, labels, normals, out);
  }
  return 0;
}

struct EvalOptions {
  std::string input;
  std::string gt;
  double alpha_deg = sn::ClusteringParams::kDefaultThresholdDeg;
  std::string csv;
};

int run_eval(const EvalOptions& o) {
  const auto params = sn::ClusteringParams::from_degrees(o.alpha_deg);
  const auto scan = load_scan(o.input);
  std::ifstream gt_in(o.gt);
  if (!gt_in) throw std::runtime_error("cannot open ground truth file '" + o.gt + "'");
  const auto gt = sn::read_ground_truth_csv(gt_in, scan.rows(), scan.cols());

  const auto baseline = sn::evaluate(sn::normals_baseline(scan), gt);
  const auto labeled = sn::evaluate(sn::normals_labeled(scan, params), gt);
  sn::write_report_text("baseline", baseline, std::cout);
  sn::write_report_text("labeled", labeled, std::cout);
  if (!o.csv.empty()) {
    auto out = open_output(o.csv);
    sn::write_report_csv_header(out);
    sn::write_report_csv_row("baseline", baseline, out);
    sn::write_report_csv_row("labeled", labeled, out);
  }
  return 0;
}

struct BenchOptions {
  std::vector<std::string> presets{"vlp16", "os0-32"};
  std::string scene = "corner";
  double wall_distance = 5.0;
  double alpha_deg = sn::ClusteringParams::kDefaultThresholdDeg;
  std::size_t repetitions = 100;
  std::size_t warmup = 10;
};

int run_bench(const BenchOptions& o) {
  const auto params = sn::ClusteringParams::from_degrees(o.alpha_deg);
  std::cout << std::fixed << std::setprecision(4);
  for (const auto& preset : o.presets) {
    const sn::SensorRig rig = sn::rig_preset(preset);
    const auto scan = sn::simulate(rig, scene_by_name(o.scene, o.wall_distance)).first;
    const auto result = sn::benchmark_normals(scan, params, o.repetitions, o.warmup);
    std::cout << "preset=" << preset << " scene=" << o.scene << " beams=" << scan.rows()
              << " azimuth_steps=" << scan.cols() << " valid_points=" << result.valid_points
              << " repetitions=" << o.repetitions << " warmup=" << o.warmup << '\n'
              << "  baseline_ms=" << result.baseline.mean_ms << " +- " << result.baseline.stddev_ms
              << '\n'
              << "  labeled_ms=" << result.labeled.mean_ms << " +- " << result.labeled.stddev_ms
              << '\n'
              << "  ratio=" << result.ratio() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust surface normals for organized LiDAR scans"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Simulate a spinning LiDAR over an analytic scene");
  gen_cmd->add_option("--preset", gen.preset, "Sensor preset")
      ->check(CLI::IsMember({"vlp16", "os0-32"}))
      ->capture_default_str();
  gen_cmd->add_option("--scene", gen.scene, "Scene")
      ->check(CLI::IsMember({"corner", "floor", "box"}))
      ->capture_default_str();
  gen_cmd->add_option("--wall-distance", gen.wall_distance, "Wall distance for the corner scene [m]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_cmd->add_option("--noise-sigma", gen.noise_sigma, "Range noise standard deviation [m]")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Noise seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output scan file (OSF)")->required();
  gen_cmd->add_option("--gt-out", gen.gt_out, "Output ground truth CSV");

  NormalsOptions normals;
  auto* normals_cmd = app.add_subcommand("normals", "Estimate per-point normals for a scan");
  normals_cmd->add_option("input", normals.input, "Input scan file (OSF)")->required();
  normals_cmd->add_option("--method", normals.method, "baseline or labeled")
      ->check(CLI::IsMember({"baseline", "labeled"}))
      ->capture_default_str();
  normals_cmd->add_option("--alpha-threshold-deg", normals.alpha_deg, "Clustering angle threshold [deg]")
      ->check(CLI::Range(0.0, 180.0))
      ->capture_default_str();
  normals_cmd->add_option("--ply", normals.ply, "Write colored ASCII PLY");
  normals_cmd->add_option("--csv", normals.csv, "Write per-cell CSV");

  SliceOptions slice;
  auto* slice_cmd = app.add_subcommand("slice", "Export labels and in-slice normals of one column");
  slice_cmd->add_option("input", slice.input, "Input scan file (OSF)")->required();
  slice_cmd->add_option("--column", slice.column, "Column index")->required();
  slice_cmd->add_option("--alpha-threshold-deg", slice.alpha_deg, "Clustering angle threshold [deg]")
      ->check(CLI::Range(0.0, 180.0))
      ->capture_default_str();
  slice_cmd->add_option("--csv", slice.csv, "Output CSV (default: stdout)");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score both estimators against ground truth");
  eval_cmd->add_option("input", eval.input, "Input scan file (OSF)")->required();
  eval_cmd->add_option("--gt", eval.gt, "Ground truth CSV from gen --gt-out")->required();
  eval_cmd->add_option("--alpha-threshold-deg", eval.alpha_deg, "Clustering angle threshold [deg]")
      ->check(CLI::Range(0.0, 180.0))
      ->capture_default_str();
  eval_cmd->add_option("--csv", eval.csv, "Also write the report as CSV");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time baseline vs labeled normals");
  bench_cmd->add_option("--preset", bench.presets, "Sensor presets")
      ->check(CLI::IsMember({"vlp16", "os0-32"}))
      ->capture_default_str();
  bench_cmd->add_option("--scene", bench.scene, "Scene")
      ->check(CLI::IsMember({"corner", "floor", "box"}))
      ->capture_default_str();
  bench_cmd->add_option("--wall-distance", bench.wall_distance, "Wall distance for the corner scene [m]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--alpha-threshold-deg", bench.alpha_deg, "Clustering angle threshold [deg]")
      ->check(CLI::Range(0.0, 180.0))
      ->capture_default_str();
  bench_cmd->add_option("--repetitions", bench.repetitions, "Timed runs per method")
      ->check(CLI::Range(std::size_t{10}, std::size_t{1000000}))
      ->capture_default_str();
  bench_cmd->add_option("--warmup", bench.warmup, "Discarded runs per method")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*gen_cmd) return run_gen(gen);
    if (*normals_cmd) return run_normals(normals);
    if (*slice_cmd) return run_slice(slice);
    if (*eval_cmd) return run_eval(eval);
    if (*bench_cmd) return run_bench(bench);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
