#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int status;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("slicenormals_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  CommandResult run(const std::string& args) const {
    const std::string out = path("stdout.txt");
    const std::string err = path("stderr.txt");
    const std::string cmd =
        std::string(SLICENORMALS_CLI) + " " + args + " > " + out + " 2> " + err;
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read(out), read(err)};
  }

  static std::string read(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::set<std::string> labels_in_slice_csv(const std::string& csv) {
    std::set<std::string> labels;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> fields;
      std::stringstream ls(line);
      std::string f;
      while (std::getline(ls, f, ',')) fields.push_back(f);
      labels.insert(fields.at(4));
    }
    return labels;
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpForEverySubcommand) {
  for (const char* sub : {"gen", "normals", "slice", "eval", "bench"}) {
    auto r = run(std::string(sub) + " --help");
    EXPECT_EQ(r.status, 0) << sub;
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << sub;
  }
  EXPECT_NE(run("").status, 0);
}

TEST_F(CliTest, GenIsDeterministic) {
  ASSERT_EQ(run("gen --scene corner --noise-sigma 0.01 --seed 5 --out " + path("a.osf")).status, 0);
  ASSERT_EQ(run("gen --scene corner --noise-sigma 0.01 --seed 5 --out " + path("b.osf") +
                " --gt-out " + path("gt.csv")).status, 0);
  EXPECT_EQ(read(path("a.osf")), read(path("b.osf")));
  EXPECT_EQ(read(path("gt.csv")).rfind("row,col,hit_id,nx,ny,nz,crease\n", 0), 0u);
}

TEST_F(CliTest, NormalsWritesPlyAndCsv) {
  ASSERT_EQ(run("gen --scene corner --out " + path("c.osf")).status, 0);
  auto r = run("normals --method labeled --alpha-threshold-deg 30 " + path("c.osf") + " --ply " +
               path("c.ply") + " --csv " + path("c.csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(read(path("c.ply")).rfind("ply\nformat ascii 1.0\nelement vertex ", 0), 0u);
  EXPECT_EQ(read(path("c.csv")).rfind("row,col,status,nx,ny,nz\n", 0), 0u);
}

TEST_F(CliTest, MethodsAgreeOnSingleComponentScan) {
  ASSERT_EQ(run("gen --scene floor --out " + path("f.osf")).status, 0);
  ASSERT_EQ(run("normals --method baseline " + path("f.osf") + " --csv " + path("b.csv")).status, 0);
  ASSERT_EQ(run("normals --method labeled " + path("f.osf") + " --csv " + path("l.csv")).status, 0);
  EXPECT_EQ(read(path("b.csv")), read(path("l.csv")));
}

TEST_F(CliTest, Errors) {
  auto missing = run("normals " + path("nope.osf"));
  EXPECT_NE(missing.status, 0);
  EXPECT_NE(missing.err.find(path("nope.osf")), std::string::npos) << missing.err;

  ASSERT_EQ(run("gen --scene floor --out " + path("f.osf")).status, 0);
  EXPECT_NE(run("normals --method pca " + path("f.osf")).status, 0);
  EXPECT_NE(run("slice " + path("f.osf") + " --column 900").status, 0);
  EXPECT_NE(run("bench --repetitions 5").status, 0);

  std::ofstream(path("bad.osf")) << "OSF1\n2 1\n1 1 0 0\n";
  auto bad = run("normals " + path("bad.osf"));
  EXPECT_NE(bad.status, 0);
  EXPECT_NE(bad.err.find("byte 17"), std::string::npos) << bad.err;
}

TEST_F(CliTest, SliceLabels) {
  ASSERT_EQ(run("gen --scene corner --out " + path("c.osf")).status, 0);
  auto corner = run("slice " + path("c.osf") + " --column 0 --alpha-threshold-deg 30");
  ASSERT_EQ(corner.status, 0) << corner.err;
  EXPECT_EQ(corner.out.rfind("row,x,y,z,label,nx,ny,nz,has_normal\n", 0), 0u);
  EXPECT_GE(labels_in_slice_csv(corner.out).size(), 2u);

  ASSERT_EQ(run("gen --scene floor --out " + path("f.osf")).status, 0);
  ASSERT_EQ(run("slice " + path("f.osf") + " --column 17 --csv " + path("s.csv")).status, 0);
  EXPECT_EQ(labels_in_slice_csv(read(path("s.csv"))).size(), 1u);

  std::ofstream(path("e.osf")) << "OSF1\n2 2\n1 1 0 0\n0 0 0 0\n1 1 1 0\n0 0 0 0\n";
  auto empty = run("slice " + path("e.osf") + " --column 1");
  ASSERT_EQ(empty.status, 0) << empty.err;
  EXPECT_EQ(empty.out, "row,x,y,z,label,nx,ny,nz,has_normal\n");
}

TEST_F(CliTest, EvalReport) {
  ASSERT_EQ(run("gen --scene corner --out " + path("c.osf") + " --gt-out " + path("gt.csv")).status, 0);
  auto r = run("eval " + path("c.osf") + " --gt " + path("gt.csv") + " --csv " + path("r.csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  for (const char* key : {"baseline.mean_deg=", "baseline.edge_mean_deg=", "labeled.coverage=",
                          "labeled.high_curvature=", "labeled.invalid="}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
  const std::string csv = read(path("r.csv"));
  EXPECT_EQ(csv.rfind("method,mean_deg,median_deg,p95_deg,edge_mean_deg,coverage,high_curvature,invalid\n"
                      "baseline,", 0),
            0u);
  EXPECT_NE(csv.find("\nlabeled,"), std::string::npos);
}

TEST_F(CliTest, BenchPrintsTimingRows) {
  auto r = run("bench --preset vlp16 --repetitions 10 --warmup 1");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("preset=vlp16"), std::string::npos);
  EXPECT_NE(r.out.find("baseline_ms="), std::string::npos);
  EXPECT_NE(r.out.find("labeled_ms="), std::string::npos);
  EXPECT_NE(r.out.find("ratio="), std::string::npos);
}

}  // namespace
