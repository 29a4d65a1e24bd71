#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "quadcert/instance.hpp"
#include "quadcert/parallel.hpp"
#include "test_util.hpp"

#ifndef QUADCERT_CLI_PATH
#error "QUADCERT_CLI_PATH must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;
using namespace quadcert;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QUADCERT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string capture_cli(const std::string& args, const std::string& out_file) {
    const std::string cmd =
        std::string(QUADCERT_CLI_PATH) + " " + args + " >" + out_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    std::ifstream in(out_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "quadcert_cli_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

fs::path conflicting_instance_path() {
    Instance inst;
    inst.n = 2;
    inst.m = 3;
    inst.matrices = testutil::conflicting_pair_system();
    inst.alpha = testutil::conflicting_pair_alpha();
    return write_file("conflicting.json", write_instance(inst));
}

}  // namespace

TEST_CASE("certify exit codes") {
    // a well-spread blocked system certifies under a large eta
    Instance blocked;
    blocked.n = 6;
    blocked.m = 3;
    {
        Matrix b1 = Matrix::Zero(6, 6), b2 = Matrix::Zero(6, 6), b3 = Matrix::Zero(6, 6);
        const double r = 1.0 / std::sqrt(2.0);
        b1(0, 0) = r; b1(1, 1) = -r;
        b2(2, 2) = r; b2(3, 3) = -r;
        b3(4, 4) = r; b3(5, 5) = -r;
        blocked.matrices = {SymMatrix(b1), SymMatrix(b2), SymMatrix(b3)};
    }
    const fs::path good = write_file("blocked.json", write_instance(blocked));
    CHECK(run_cli("certify " + good.string() + " --eta 10") == 0);

    CHECK(run_cli("certify " + conflicting_instance_path().string()) == 2);

    const fs::path bad = write_file("asym.json",
                                    "{\"version\": 1, \"n\": 2, \"m\": 1,"
                                    " \"matrices\": [[1, 0.5, 0, 1]]}");
    CHECK(run_cli("certify " + bad.string()) == 1);

    CHECK(run_cli("certify /no/such/file.json") == 1);
}

TEST_CASE("pipeline exit codes") {
    Rng rng(101);
    // planted solvable instance
    Instance planted;
    planted.n = 8;
    planted.m = 3;
    planted.matrices = testutil::random_sym_list(rng, 8, 3);
    const Vector x0 = rng.gaussian_vector(8);
    Vector alpha(3);
    for (int i = 0; i < 3; ++i) alpha[i] = quad_form(planted.matrices[static_cast<std::size_t>(i)], x0);
    planted.alpha = alpha;
    const fs::path solvable = write_file("planted.json", write_instance(planted));
    CHECK(run_cli("pipeline " + solvable.string() + " --oracle --seed 5") == 0);

    // single negative-trace equation is infeasible
    Instance infeasible;
    infeasible.n = 2;
    infeasible.m = 1;
    infeasible.matrices = {SymMatrix::Identity(2)};
    infeasible.alpha = Vector::Constant(1, -1.0);
    const fs::path nosol = write_file("infeasible.json", write_instance(infeasible));
    CHECK(run_cli("pipeline " + nosol.string()) == 3);

    CHECK(run_cli("pipeline " + conflicting_instance_path().string() + " --oracle --seed 5") ==
          2);
}

TEST_CASE("pipeline json report embeds the seed and stages") {
    const fs::path out = scratch_dir() / "pipeline.json";
    const std::string text = capture_cli(
        "pipeline " + conflicting_instance_path().string() + " --json --seed 42 --oracle",
        out.string());
    CHECK(text.find("\"report_version\": 1") != std::string::npos);
    CHECK(text.find("\"seed\": 42") != std::string::npos);
    CHECK(text.find("\"stage\": \"relaxation\"") != std::string::npos);
    CHECK(text.find("\"stage\": \"oracle\"") != std::string::npos);
    CHECK(text.find("\"verdict\": \"inconclusive\"") != std::string::npos);
}

TEST_CASE("experiment csv row contract and unknown kinds") {
    const fs::path csv = scratch_dir() / "scaling.csv";
    CHECK(run_cli("experiment scaling --n 12 --m 2 --trials 4 --seed 1 --out " + csv.string()) ==
          0);
    std::ifstream in(csv);
    std::string line;
    int rows = 0;
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("n,m,trial,norm_B_op,ratio_to_4m_over_n", 0) == 0);
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 4);

    CHECK(run_cli("experiment nonsense --n 4") == 1);
}

TEST_CASE("homogeneous pipeline runs the traceless path") {
    Rng rng(103);
    Instance hom;
    hom.n = 10;
    hom.m = 3;
    hom.homogeneous = true;
    auto mats = testutil::random_sym_list(rng, 10, 3);
    for (auto& q : mats) {
        q = q - SymMatrix::Identity(10) * (q.trace() / 10.0);
        q = q - SymMatrix::Identity(10) * (q.trace() / 10.0);
    }
    hom.matrices = mats;
    const fs::path p = write_file("homogeneous.json", write_instance(hom));
    CHECK(run_cli("pipeline " + p.string() + " --oracle --seed 7") == 0);
}

TEST_CASE("homogeneous pipeline recurses when the face is proper") {
    Rng rng(104);
    // the first form pins X(0,0) = 0, so every feasible psd X is singular
    Instance hom;
    hom.n = 6;
    hom.m = 3;
    hom.homogeneous = true;
    Matrix pin = Matrix::Zero(6, 6);
    pin(0, 0) = 1.0;
    std::vector<SymMatrix> mats{SymMatrix(pin)};
    for (int i = 0; i < 2; ++i) {
        Matrix g = Matrix::Zero(6, 6);
        for (Index a = 1; a < 6; ++a)
            for (Index b = 1; b < 6; ++b) g(a, b) = rng.gaussian();
        SymMatrix q{g};
        q = q - SymMatrix::Identity(6) * (q.trace() / 6.0);
        mats.push_back(q);
    }
    hom.matrices = mats;
    const fs::path p = write_file("homogeneous_face.json", write_instance(hom));

    const fs::path out = scratch_dir() / "face.json";
    const std::string text = capture_cli(
        "pipeline " + p.string() + " --json --oracle --seed 11", out.string());
    CHECK(text.find("\"stage\": \"recurse\"") != std::string::npos);
    CHECK(text.find("\"verdict\": \"solvable\"") != std::string::npos);
}

TEST_CASE("homogeneous small systems keep the nontrivial reading") {
    // definite form: no nontrivial zero, relaxation of the pinned system is empty
    Instance definite;
    definite.n = 3;
    definite.m = 1;
    definite.homogeneous = true;
    definite.matrices = {SymMatrix::Identity(3)};
    const fs::path p1 = write_file("hom_definite.json", write_instance(definite));
    CHECK(run_cli("pipeline " + p1.string() + " --oracle --seed 2") == 3);

    // indefinite product form: nontrivial zeros exist
    Matrix prod = Matrix::Zero(2, 2);
    prod(0, 1) = prod(1, 0) = 0.5;
    Instance indefinite;
    indefinite.n = 2;
    indefinite.m = 1;
    indefinite.homogeneous = true;
    indefinite.matrices = {SymMatrix(prod)};
    const fs::path p2 = write_file("hom_product.json", write_instance(indefinite));
    CHECK(run_cli("pipeline " + p2.string() + " --oracle --seed 2") == 0);
}

TEST_CASE("moments experiment emits one row per moment") {
    const fs::path csv = scratch_dir() / "moments.csv";
    CHECK(run_cli("experiment moments --m 4 --samples 2000 --seed 2 --out " + csv.string()) == 0);
    std::ifstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("m,samples,moment,mean,expected,stderr", 0) == 0);
    int rows = 0;
    while (std::getline(in, line)) rows += line.empty() ? 0 : 1;
    CHECK(rows == 5);
}

TEST_CASE("thread resolution honors the environment override") {
    setenv("QUADCERT_THREADS", "3", 1);
    CHECK(resolve_threads(1) == 3);
    CHECK(resolve_threads(8) == 3);
    unsetenv("QUADCERT_THREADS");
    CHECK(resolve_threads(2) == 2);
    CHECK(resolve_threads(0) == 1);
}
