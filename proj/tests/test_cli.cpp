#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "normgd/cli.hpp"
#include "normgd/glm.hpp"

using namespace normgd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args, const CheckSubject& subject = {}) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err, subject);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("normgd_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("converge smoke run writes traces") {
  const auto dir = scratch("converge");
  const auto r = invoke({"converge", "--model", "glm", "--regime", "low", "--n", "1000", "--p",
                         "2", "--d", "4", "--seed", "7", "--repeats", "2", "--max-iter",
                         "gd=400", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("algorithm\tn\trepeats\t", 0) == 0);
  CHECK(r.out.find("normgd\t1000\t2\t") != std::string::npos);
  CHECK(fs::exists(dir / "traces" / "normgd_rep0.csv"));
  CHECK(fs::exists(dir / "traces" / "gd_rep1.csv"));
  CHECK(fs::exists(dir / "convergence.svg"));
  const auto spec = nlohmann::json::parse(slurp(dir / "spec.json"));
  CHECK(spec["seed"] == 7);
  fs::remove_all(dir);
}

TEST_CASE("same invocation twice gives byte-identical summaries") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  std::vector<std::string> args{"converge", "--model", "gmm",   "--regime", "strong",
                                "--n",      "2000",  "--repeats", "3", "--out"};
  auto args_a = args, args_b = args;
  args_a.push_back(a.string());
  args_b.push_back(b.string());
  args_b.insert(args_b.end(), {"--jobs", "3"});
  REQUIRE(invoke(args_a).code == 0);
  REQUIRE(invoke(args_b).code == 0);
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(slurp(a / "traces" / "normgd_rep2.csv") == slurp(b / "traces" / "normgd_rep2.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("slope with one repeat is repeatable") {
  const auto a = scratch("slope_a"), b = scratch("slope_b");
  const std::vector<std::string> base{"slope", "--model", "glm", "--regime", "strong",
                                      "--n-grid", "300,600,1200", "--repeats", "1", "--seed", "5"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a.string()});
  args_b.insert(args_b.end(), {"--out", b.string()});
  const auto ra = invoke(args_a), rb = invoke(args_b);
  CHECK(ra.code == 0);
  CHECK(ra.out.rfind("algorithm\tregime\tstatistic\tslope\tr2\texcluded\n", 0) == 0);
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(fs::exists(a / "slope.svg"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("invalid invocations exit with 1") {
  CHECK(invoke({}).code == cli::kExitInvalid);
  CHECK(invoke({"converge", "--regime", "low"}).code == cli::kExitInvalid);
  CHECK(invoke({"converge", "--model", "glm", "--regime", "low", "--bogus", "1"}).code ==
        cli::kExitInvalid);
  CHECK(invoke({"converge", "--model", "svm", "--regime", "low"}).code == cli::kExitInvalid);
  CHECK(invoke({"slope", "--model", "glm", "--regime", "low", "--n-grid", "100,200"}).code ==
        cli::kExitInvalid);
  CHECK(invoke({"converge", "--model", "glm", "--regime", "strong", "--theta-star", "0,0,0,0"})
            .code == cli::kExitInvalid);
  CHECK(invoke({"converge", "--model", "glm", "--regime", "low", "--algorithms", "em"}).code ==
        cli::kExitInvalid);
  CHECK(invoke({"converge", "--model", "glm", "--regime", "low", "--eta", "fast"}).code ==
        cli::kExitInvalid);
  CHECK(invoke({"converge", "--model", "glm", "--regime", "strong", "--d", "3"}).code ==
        cli::kExitInvalid);
  CHECK(invoke({"check", "--only", "nothing"}).code == cli::kExitInvalid);
  const auto missing = invoke({"converge", "--regime", "low"});
  CHECK(missing.err.find("--model") != std::string::npos);
}

TEST_CASE("help exits cleanly") { CHECK(invoke({"--help"}).code == 0); }

TEST_CASE("output root comes from the environment") {
  const auto root = scratch("root");
  ::setenv(cli::kOutRootEnv, root.string().c_str(), 1);
  const auto r = invoke({"converge", "--model", "gmm", "--regime", "low", "--n", "500",
                         "--repeats", "1", "--algorithms", "normgd,em", "--dump-data"});
  ::unsetenv(cli::kOutRootEnv);
  CHECK(r.code == 0);
  CHECK(fs::exists(root / "converge-gmm-low-seed1" / "traces" / "em_rep0.csv"));
  CHECK(fs::exists(root / "converge-gmm-low-seed1" / "data" / "n500_rep0.csv"));
  fs::remove_all(root);
}

TEST_CASE("check runs and filters suites") {
  const auto all = invoke({"check", "--instances", "20"});
  CHECK(all.code == 0);
  CHECK(all.out.find("fd\tglm_hessian\tpass") != std::string::npos);
  CHECK(all.out.find("em\tem_step\tpass") != std::string::npos);

  const auto eig = invoke({"check", "--only", "eig"});
  CHECK(eig.code == 0);
  CHECK(eig.out.find("eig\t") != std::string::npos);
  CHECK(eig.out.find("fd\t") == std::string::npos);
  CHECK(eig.out.find("quadrature\t") == std::string::npos);
}

TEST_CASE("a broken Hessian coefficient is caught and named") {
  // p * u^(2p-2) in place of p(2p-1) * u^(2p-2).
  CheckSubject broken;
  broken.glm_hessian = [](const GlmObjective& obj, const ParamVector& theta) {
    const auto& data = obj.data();
    const int p = obj.p();
    SymMatrix h(data.d);
    for (std::size_t i = 0; i < data.n; ++i) {
      const double u = dot(data.row(i), theta.view());
      const double w = p * ipow(u, 2 * p - 2) - p * (p - 1) * data.y[i] * ipow(u, p - 2);
      h.add_outer(data.row(i), w / static_cast<double>(data.n));
    }
    return h;
  };
  const auto r = invoke({"check", "--only", "fd"}, broken);
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.out.find("fd\tglm_hessian\tFAIL") != std::string::npos);
  CHECK(r.out.find("fd\tglm_grad\tpass") != std::string::npos);
  CHECK(r.err.find("glm_hessian") != std::string::npos);
}

TEST_CASE("a broken EM update is caught") {
  CheckSubject broken;
  broken.em_step = [](const GmmObjective& obj, const ParamVector& theta) {
    return 1.0001 * em_step(obj, theta);
  };
  const auto r = invoke({"check", "--only", "em"}, broken);
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.err.find("em_step") != std::string::npos);
}
