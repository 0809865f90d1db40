#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaic/annotations.hpp"
#include "gaic/geometry.hpp"

using namespace gaic;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("GAIC_CLI");
  REQUIRE_MESSAGE(p != nullptr, "GAIC_CLI must point at the gaic binary");
  return p;
}

struct RunOutput {
  int status = 0;
  std::string stdout_text;
};

RunOutput run(const std::string& args) {
  const std::string out_file = "/tmp/gaic_cli_test_stdout.txt";
  const std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>&1";
  const int rc = std::system(cmd.c_str());
  std::ifstream f(out_file);
  std::stringstream ss;
  ss << f.rdbuf();
  return RunOutput{rc == 0 ? 0 : 1, ss.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE_MESSAGE(f.good(), "missing file: " << path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kWork = "/tmp/gaic_cli_test";

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

std::string path(const std::string& name) {
  return std::string(kWork) + "/" + name;
}

}  // namespace

TEST_CASE("cli end-to-end") {
  Workspace ws;

  // Small config keeps the model cheap for the pipeline walk-through.
  {
    std::ofstream cfg(path("run.cfg"));
    cfg << "[model]\nchannels = 6 8 12 16 24\nreduced_channels = 4\n"
           "head_width = 64\n"
           "[train]\nepochs = 1\nlearning_rate = 0.0003\ncrops_per_batch = 8\n"
           "val_fraction = 0.25\n";
  }

  SUBCASE("generate: count line, single-anchor case, file round-trip") {
    auto r = run("generate --dims 240x240 --out " + path("crops.txt"));
    CHECK(r.status == 0);
    CHECK(r.stdout_text.find("candidates 90") != std::string::npos);
    const auto listed = parse_crop_list(slurp(path("crops.txt")));
    const auto direct = enumerate_candidates(ImageDims{240, 240}, GridSpec{});
    REQUIRE(listed.size() == direct.size());
    for (size_t i = 0; i < listed.size(); ++i) CHECK(listed[i] == direct[i]);

    std::ofstream cfg(path("m1.cfg"));
    // 121/144: the exact area-fraction lower bound when m = n = 1.
    cfg << "[grid]\ncorner_rows = 1\ncorner_cols = 1\n"
           "min_area_frac = 0.84027777777777779\n";
    cfg.close();
    r = run("generate --dims 240x240 --config " + path("m1.cfg") + " --out " +
            path("one.txt"));
    CHECK(r.status == 0);
    CHECK(r.stdout_text.find("candidates 1") != std::string::npos);
    std::istringstream lines(slurp(path("one.txt")));
    std::string line;
    int count = 0;
    while (std::getline(lines, line))
      if (!line.empty()) ++count;
    CHECK(count == 1);

    CHECK(run("generate --dims 10x2000").status != 0);  // smaller than grid
  }

  SUBCASE("synth is reproducible and valid") {
    CHECK(run("synth --count 2 --seed 9 --out " + path("ds_a")).status == 0);
    CHECK(run("synth --count 2 --seed 9 --out " + path("ds_b")).status == 0);
    for (const char* name : {"img_00000.ppm", "img_00001.ppm",
                             "annotations.txt", "manifest.txt"})
      CHECK(slurp(path("ds_a/") + name) == slurp(path("ds_b/") + name));
    const auto anns = read_annotations(path("ds_a/annotations.txt"));
    REQUIRE(anns.size() == 2);
    CHECK(anns[0].crops.size() <= 90);
    CHECK(slurp(path("ds_a/manifest.txt")).find("seed 9") != std::string::npos);
  }

  SUBCASE("train, evaluate, crop pipeline") {
    REQUIRE(run("synth --count 6 --seed 11 --out " + path("ds")).status == 0);

    // Deterministic checkpoints per seed.
    auto r = run("train --config " + path("run.cfg") + " --seed 4 "
                 "--annotations " + path("ds/annotations.txt") +
                 " --out " + path("a.ckpt") + " --log " + path("a.log"));
    CHECK(r.status == 0);
    REQUIRE(run("train --config " + path("run.cfg") + " --seed 4 "
                "--annotations " + path("ds/annotations.txt") +
                " --out " + path("b.ckpt") + " --log " + path("b.log"))
                .status == 0);
    CHECK(slurp(path("a.ckpt")) == slurp(path("b.ckpt")));
    CHECK(slurp(path("a.log")) == slurp(path("b.log")));
    CHECK(slurp(path("a.log")).find("seed 4") != std::string::npos);
    CHECK(slurp(path("a.log")).find("epoch 1 train_loss") != std::string::npos);

    // Zero-epoch run: checkpoint exists, log has only the seed header.
    std::ofstream cfg0(path("zero.cfg"));
    cfg0 << "[model]\nchannels = 6 8 12 16 24\nreduced_channels = 4\n"
            "head_width = 64\n[train]\nepochs = 0\n";
    cfg0.close();
    r = run("train --config " + path("zero.cfg") + " --seed 4 --annotations " +
            path("ds/annotations.txt") + " --out " + path("zero.ckpt") +
            " --log " + path("zero.log"));
    CHECK(r.status == 0);
    CHECK(fs::exists(path("zero.ckpt")));
    CHECK(slurp(path("zero.log")) == "seed 4\n");

    // Evaluation writes the table, the kv report and predictions.
    r = run("evaluate --annotations " + path("ds/annotations.txt") +
            " --checkpoint " + path("a.ckpt") + " --report " + path("rep.txt") +
            " --kv " + path("rep.kv") + " --dump-predictions " +
            path("preds.txt"));
    CHECK(r.status == 0);
    CHECK(slurp(path("rep.txt")).find("baseline_C") != std::string::npos);
    CHECK(slurp(path("rep.kv")).find("acc_1_5 ") != std::string::npos);

    // Groundtruth fed back as predictions is the perfect model.
    {
      auto anns = read_annotations(path("ds/annotations.txt"));
      for (auto& a : anns) a.prediction = true;
      write_annotations(path("perfect.txt"), anns);
    }
    r = run("evaluate --annotations " + path("ds/annotations.txt") +
            " --predictions " + path("perfect.txt") + " --kv " +
            path("perfect.kv"));
    CHECK(r.status == 0);
    CHECK(slurp(path("perfect.kv")).find("srcc 1.000000000000") !=
          std::string::npos);
    CHECK(slurp(path("perfect.kv")).find("acc_4_10 1.000000000000") !=
          std::string::npos);

    // Model predictions dumped and re-fed reproduce the model's report.
    r = run("evaluate --annotations " + path("ds/annotations.txt") +
            " --predictions " + path("preds.txt") + " --kv " + path("re.kv"));
    CHECK(r.status == 0);
    const auto kv_direct = slurp(path("rep.kv"));
    const auto kv_re = slurp(path("re.kv"));
    const auto srcc_of = [](const std::string& kv) {
      const auto pos = kv.find("srcc ");
      return kv.substr(pos, kv.find('\n', pos) - pos);
    };
    // 4-decimal score serialization perturbs correlations only slightly.
    CHECK(kv_re.find("acc_1_5 ") != std::string::npos);
    CHECK(srcc_of(kv_direct).substr(0, 9) == srcc_of(kv_re).substr(0, 9));

    // Cropping: top-k clamp warning path and sidecar shape.
    r = run("crop --checkpoint " + path("a.ckpt") + " --image " +
            path("ds/img_00000.ppm") + " -k 3 --out-dir " + path("crops"));
    CHECK(r.status == 0);
    CHECK(fs::exists(path("crops/crop_01.ppm")));
    CHECK(fs::exists(path("crops/crop_03.ppm")));
    const auto sidecar = slurp(path("crops/crops.txt"));
    CHECK(sidecar.find("seed 4") != std::string::npos);

    r = run("crop --checkpoint " + path("a.ckpt") + " --image " +
            path("ds/img_00000.ppm") + " -k 2 --aspect 1.0 --out-dir " +
            path("crops_sq"));
    CHECK(r.status == 0);
    const auto side2 = slurp(path("crops_sq/crops.txt"));
    std::istringstream ss(side2);
    std::string line;
    std::getline(ss, line);  // seed header
    while (std::getline(ss, line)) {
      CropRect c;
      double score;
      std::istringstream ls(line);
      REQUIRE((ls >> c.x1 >> c.y1 >> c.x2 >> c.y2 >> score));
      CHECK(std::abs(aspect_ratio(c) - 1.0) <= 0.05 + 1e-12);
    }
  }

  SUBCASE("baseline command") {
    auto r = run("baseline --mode C --dims 100x100");
    CHECK(r.status == 0);
    CHECK(r.stdout_text.find("5 5 95 95") != std::string::npos);
    r = run("baseline --mode N --dims 480x640");
    CHECK(r.stdout_text.find("0 0 480 640") != std::string::npos);
    CHECK(run("baseline --mode Q --dims 100x100").status != 0);
    CHECK(run("baseline --mode C").status != 0);  // needs dims or image
  }

  SUBCASE("errors exit nonzero and name the input") {
    CHECK(run("evaluate --annotations /nonexistent.txt --predictions x").status != 0);
    CHECK(run("train --annotations /nonexistent.txt --out " + path("x.ckpt"))
              .status != 0);
    CHECK(run("crop --checkpoint /nonexistent.ckpt --image " +
              path("nope.ppm"))
              .status != 0);
  }
}
