#include <doctest.h>

#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "convtrace/features_csv.hpp"
#include "convtrace/image_io.hpp"
#include "convtrace/manifest.hpp"
#include "temp_dir.hpp"

using namespace convtrace;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(CONVTRACE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const char* kSpec = R"([
  {"seed": 1, "width": 32, "height": 32, "kind": "smoothed_noise", "count": 8, "source": "real"},
  {"seed": 2, "width": 32, "height": 32, "kind": "transpose_conv", "count": 6, "source": "tconv"},
  {"seed": 3, "width": 32, "height": 32, "kind": "linear_upsample", "count": 6, "source": "linear"}
])";

// One synthesized corpus shared by the read-only checks below.
struct Corpus {
    testing::TempDir dir;
    fs::path manifest;
    Corpus()
    {
        write(dir / "spec.json", kSpec);
        REQUIRE(run("synth --spec " + q(dir / "spec.json") + " --out " + q(dir / "data")) == 0);
        manifest = dir / "data" / "manifest.csv";
    }
};

Corpus& corpus()
{
    static Corpus c;
    return c;
}

}  // namespace

TEST_CASE("synth writes a reproducible corpus")
{
    const Corpus& c = corpus();
    const auto m = read_manifest(c.manifest);
    CHECK(m.entries.size() == 20);
    for (const auto& e : m.entries) CHECK(fs::exists(m.resolve(e)));

    testing::TempDir again;
    REQUIRE(run("synth --spec " + q(c.dir / "spec.json") + " --out " + q(again.path())) == 0);
    CHECK(slurp(again / "manifest.csv") == slurp(c.manifest));
    for (const auto& e : m.entries) CHECK(slurp(again.path() / e.path) == slurp(m.resolve(e)));

    write(again / "bad.json", "{\"seed\": 1,");
    CHECK(run("synth --spec " + q(again / "bad.json") + " --out " + q(again / "x")) == 1);
    CHECK(run("synth --spec " + q(again / "missing.json") + " --out " + q(again / "x")) == 1);
}

TEST_CASE("extract is independent of the job count")
{
    const Corpus& c = corpus();
    testing::TempDir out;
    REQUIRE(run("extract --manifest " + q(c.manifest) + " --alpha 1 --jobs 1 --out " + q(out / "j1.csv")) == 0);
    REQUIRE(run("extract --manifest " + q(c.manifest) + " --alpha 1 --jobs 8 --out " + q(out / "j8.csv")) == 0);
    CHECK(slurp(out / "j1.csv") == slurp(out / "j8.csv"));
    const auto rows = read_feature_csv(out / "j1.csv");
    REQUIRE(rows.size() == 20);
    CHECK(rows[0].features.size() == 24);
    CHECK(rows[0].path == "real_1_0.png");
    CHECK(rows[19].source == "linear");

    REQUIRE(run("extract --manifest " + q(c.manifest) + " --alpha 2 --jobs 2 --out " + q(out / "a2.csv")) == 0);
    CHECK(read_feature_csv(out / "a2.csv")[0].features.size() == 72);
}

TEST_CASE("extract on an empty manifest and on broken images")
{
    testing::TempDir d;
    write(d / "empty.csv", "path,label,source\n");
    CHECK(run("extract --manifest " + q(d / "empty.csv") + " --out " + q(d / "e.csv")) == 0);
    CHECK(slurp(d / "e.csv") == feature_csv_header(1) + "\n");

    const auto& src = corpus().manifest;
    fs::copy_file(src.parent_path() / "real_1_0.png", d / "good.png");
    write(d / "broken.png", "\x89PNG\r\n\x1a\n");
    write(d / "m.csv", "path,label,source\ngood.png,0,real\nbroken.png,1,fake\nabsent.png,1,fake\n");
    CHECK(run("extract --manifest " + q(d / "m.csv") + " --jobs 3 --out " + q(d / "f.csv")) == 2);
    const auto rows = read_feature_csv(d / "f.csv");
    REQUIRE(rows.size() == 3);
    CHECK_FALSE(rows[0].failed);
    CHECK(rows[1].failed);
    CHECK(rows[2].failed);

    CHECK(run("extract --manifest " + q(d / "nope.csv") + " --out " + q(d / "g.csv")) == 1);
    CHECK(run("extract --manifest " + q(d / "m.csv") + " --alpha 4 --out " + q(d / "g.csv")) == 1);
    CHECK(run("extract --manifest " + q(d / "m.csv") + " --out " + q(d / "no" / "dir" / "g.csv")) == 1);
    CHECK(run("extract --bogus") == 1);
    CHECK(run("") == 1);
}

TEST_CASE("attack command")
{
    const Corpus& c = corpus();
    testing::TempDir d;
    REQUIRE(run("attack --manifest " + q(c.manifest) + " --attack rotate:90 --seed 4 --out " + q(d / "rot")) == 0);
    const auto m = read_manifest(d / "rot" / "manifest.csv");
    REQUIRE(m.entries.size() == 20);
    CHECK(m.has_attack_column());
    CHECK(*m.entries[0].attack == "rotate:90");
    const RgbImage img = load_image(m.resolve(m.entries[0]));
    CHECK(img.width() == 32);
    CHECK(img.height() == 32);

    REQUIRE(run("attack --manifest " + q(c.manifest) + " --attack random-square --seed 9 --jobs 4 --out " + q(d / "a")) == 0);
    REQUIRE(run("attack --manifest " + q(c.manifest) + " --attack random-square --seed 9 --jobs 1 --out " + q(d / "b")) == 0);
    CHECK(slurp(d / "a" / "manifest.csv") == slurp(d / "b" / "manifest.csv"));
    for (const auto& e : read_manifest(d / "a" / "manifest.csv").entries) {
        CHECK(slurp(d / "a" / e.path) == slurp(d / "b" / e.path));
    }

    CHECK(run("attack --manifest " + q(c.manifest) + " --attack blur:4 --out " + q(d / "x")) == 1);
    CHECK(run("attack --manifest " + q(c.manifest) + " --attack sharpen --out " + q(d / "x")) == 1);
}

TEST_CASE("attack on non-square images transposes the dimensions")
{
    testing::TempDir d;
    save_png(RgbImage(24, 16, 0.5), d / "wide.png");
    write(d / "m.csv", "path,label,source\nwide.png,0,real\n");
    REQUIRE(run("attack --manifest " + q(d / "m.csv") + " --attack rotate:90 --out " + q(d / "r")) == 0);
    const RgbImage img = load_image(d / "r" / "wide.png");
    CHECK(img.width() == 16);
    CHECK(img.height() == 24);
}

TEST_CASE("eval, report, train and predict")
{
    const Corpus& c = corpus();
    testing::TempDir d;
    REQUIRE(run("extract --manifest " + q(c.manifest) + " --out " + q(d / "f1.csv")) == 0);
    REQUIRE(run("extract --manifest " + q(c.manifest) + " --alpha 2 --out " + q(d / "f2.csv")) == 0);

    REQUIRE(run("eval --features " + q(d / "f1.csv") + " " + q(d / "f2.csv") +
                " --classifiers rf,lda --mode cv5 --seed 42 --out " + q(d / "pooled")) == 0);
    const std::string csv = slurp(d / "pooled" / "report_real_vs_all.csv");
    CHECK(csv.find("real_vs_all,rf,3x3,cv5,") != std::string::npos);
    CHECK(csv.find("real_vs_all,lda,5x5,cv5,") != std::string::npos);
    const std::string table = slurp(d / "pooled" / "report_real_vs_all.txt");
    CHECK(table.find("3x3") != std::string::npos);
    CHECK(table.find("5x5") != std::string::npos);

    // Fold list has five entries.
    const auto line = csv.substr(csv.find("real_vs_all,rf,3x3"));
    std::vector<std::string> fields;
    std::stringstream ss(line.substr(0, line.find('\n')));
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    REQUIRE(fields.size() == 9);
    CHECK(std::count(fields[6].begin(), fields[6].end(), ';') == 4);

    REQUIRE(run("eval --features " + q(d / "f1.csv") + " --classifiers knn3 --mode split70 --pairing pairwise --out " +
                q(d / "pair")) == 0);
    CHECK(fs::exists(d / "pair" / "report_real_vs_tconv.csv"));
    CHECK(fs::exists(d / "pair" / "report_real_vs_linear.csv"));
    CHECK_FALSE(fs::exists(d / "pair" / "report_real_vs_all.csv"));

    REQUIRE(run("eval --features " + q(d / "f1.csv") + " --seed 42 --out " + q(d / "again1")) == 0);
    REQUIRE(run("eval --features " + q(d / "f1.csv") + " --seed 42 --out " + q(d / "again2")) == 0);
    CHECK(slurp(d / "again1" / "report_real_vs_all.csv") == slurp(d / "again2" / "report_real_vs_all.csv"));

    CHECK(run("report " + q(d / "pooled" / "report_real_vs_all.csv") + " --out " + q(d / "r.txt")) == 0);
    CHECK(slurp(d / "r.txt") == table);

    CHECK(run("eval --features " + q(d / "f1.csv") + " --mode cv3 --out " + q(d / "x")) == 1);
    CHECK(run("eval --features " + q(d / "f1.csv") + " --classifiers rbf --out " + q(d / "x")) == 1);

    REQUIRE(run("train --features " + q(d / "f1.csv") + " --classifier rf --seed 3 --out " + q(d / "m.json")) == 0);
    REQUIRE(run("predict --model " + q(d / "m.json") + " --features " + q(d / "f1.csv") + " --out " + q(d / "p.csv")) == 0);
    const std::string pred = slurp(d / "p.csv");
    CHECK(pred.rfind("path,label,predicted\n", 0) == 0);
    CHECK(std::count(pred.begin(), pred.end(), '\n') == 21);
    CHECK(run("predict --model " + q(d / "m.json") + " --features " + q(d / "f2.csv") + " --out " + q(d / "p2.csv")) == 1);
}

TEST_CASE("inconsistent feature files are rejected")
{
    testing::TempDir d;
    std::string text = feature_csv_header(1) + "\n";
    text += "a.png,0,real,1,none";
    for (int i = 0; i < 24; ++i) text += ",0.1";
    text += "\nb.png,1,fake,1,none";
    for (int i = 0; i < 23; ++i) text += ",0.2";
    write(d / "bad.csv", text + "\n");
    CHECK(run("eval --features " + q(d / "bad.csv") + " --out " + q(d / "o")) == 1);
}
