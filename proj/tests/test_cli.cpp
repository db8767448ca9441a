#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(QTAKAGI_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("eval prints the exact value and its decimal") {
  RunResult r = run_cli("eval cdf --q 2 --sigma 1,0 --d 1/3,2/3 --r 1/4,3/4 --x 3/4");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "5/6 0.833333333333333\n");

  r = run_cli("eval takagi --q 2 --sigma 0,1 --d 1/2,1/2 --r 1/2,1/2 --u 1 --x 1/4");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "1/4 0.25\n");

  r = run_cli("eval derivative --q 2 --sigma 0,1 --r 1/2,1/2 --u 2 --x 1/4");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "1/2 0.5\n");

  r = run_cli("eval theorem-rhs --q 2 --sigma 1,0 --r 1/4,3/4 --u 1 --x 3/4");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "-1/4 -0.25\n");
}

TEST_CASE("eval configuration errors exit with code 2") {
  RunResult r = run_cli("eval cdf --q 2 --sigma 1,0 --d 1/3,2/3 --r 1/4,3/4 --x 5/4");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("x out of [0,1]") != std::string::npos);

  r = run_cli("eval cdf --q 2 --sigma 1,0 --d 1/3,2/3 --r 1/4,3/4 --x 1/3");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("denominator must be a power of q") != std::string::npos);

  r = run_cli("eval takagi --q 2 --sigma 0,1 --d 1/2,1/2 --r 1/2,1/2 --u 1,1 --x 1/4");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("u:") != std::string::npos);

  r = run_cli("eval cdf --q 3 --sigma 1,0,2 --d 1/3,1/3,1/3 --r 1/4,1/4,1/2 --x 1/3");
  CHECK(r.exit_code == 2);  // sigma cubed is not the identity

  r = run_cli("eval cdf --q 2 --sigma 1,0 --d 2/3,2/3 --r 1/4,3/4 --x 1/2");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("d:") != std::string::npos);
}

TEST_CASE("cap violations exit with code 3") {
  RunResult r =
      run_cli("eval derivative --q 2 --sigma 0,1 --r 1/2,1/2 --u 1 --x 1/2048");
  CHECK(r.exit_code == 3);

  r = run_cli("sample --function cdf --q 2 --sigma 0,1 --d 1/2,1/2 --r 1/2,1/2 "
              "--grid-level 21 --output /tmp/never.csv");
  CHECK(r.exit_code == 3);
}

TEST_CASE("sample writes a deterministic CSV") {
  auto out1 = temp_file("qtakagi_test_sample1.csv");
  auto out2 = temp_file("qtakagi_test_sample2.csv");
  std::string base = "sample --function cdf --q 2 --sigma 1,0 --d 1/3,2/3 --r 1/4,3/4 "
                     "--grid-level 3 --output ";
  CHECK(run_cli(base + out1.string()).exit_code == 0);
  CHECK(run_cli(base + out2.string()).exit_code == 0);
  std::string csv = slurp(out1);
  CHECK(csv == slurp(out2));

  CHECK(csv.find("x_num,x_den,value_num,value_den,value_decimal\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);  // header + 9 rows
  CHECK(csv.find("3,4,5,6,") != std::string::npos);       // cdf(3/4) = 5/6
  CHECK(csv.find('\r') == std::string::npos);

  auto takagi_csv = temp_file("qtakagi_test_sample3.csv");
  CHECK(run_cli("sample --function takagi --q 2 --sigma 0,1 --d 1/2,1/2 --r 1/2,1/2 "
                "--u 1 --grid-level 3 --output " +
                takagi_csv.string())
            .exit_code == 0);
  CHECK(slurp(takagi_csv).find("1,4,1,4,") != std::string::npos);  // T(1/4) = 1/4

  auto deriv_csv = temp_file("qtakagi_test_sample4.csv");
  CHECK(run_cli("sample --function derivative --q 2 --sigma 0,1 --r 1/2,1/2 "
                "--u 2 --grid-level 2 --output " +
                deriv_csv.string())
            .exit_code == 0);
  CHECK(slurp(deriv_csv).find("1,4,1,2,") != std::string::npos);  // value 1/2 at 1/4

  std::filesystem::remove(out1);
  std::filesystem::remove(out2);
  std::filesystem::remove(takagi_csv);
  std::filesystem::remove(deriv_csv);
}

TEST_CASE("sample reports unwritable output as an I/O failure") {
  RunResult r = run_cli("sample --function cdf --q 2 --sigma 0,1 --d 1/2,1/2 "
                        "--r 1/2,1/2 --grid-level 2 --output /nonexistent-dir/x.csv");
  CHECK(r.exit_code == 4);
}

TEST_CASE("verify runs the suites and reports deterministically") {
  RunResult a = run_cli("verify --suite theorem --seed 7 --trials 3");
  CHECK(a.exit_code == 0);
  CHECK(a.output.find("verify: PASS") != std::string::npos);
  RunResult b = run_cli("verify --suite theorem --seed 7 --trials 3");
  CHECK(a.output == b.output);

  RunResult bad = run_cli("verify --suite bogus");
  CHECK(bad.exit_code == 2);

  RunResult corrupted =
      run_cli("verify --suite theorem --seed 7 --trials 2 --selftest-corrupt-sigma");
  CHECK(corrupted.exit_code == 1);
  CHECK(corrupted.output.find("first counterexample") != std::string::npos);
  CHECK(corrupted.output.find("verify: FAIL") != std::string::npos);
}

TEST_CASE("json config supplies fields and explicit flags win") {
  auto cfg_path = temp_file("qtakagi_test_config.json");
  {
    std::ofstream out(cfg_path);
    out << R"({"q": 2, "sigma": [1, 0], "d": ["1/3", "2/3"],)"
        << R"( "r": ["1/4", "3/4"], "x": "1/2"})";
  }
  RunResult r = run_cli("eval cdf --config " + cfg_path.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output == "1/3 0.333333333333333\n");  // L(1/2) = d_0

  r = run_cli("eval cdf --config " + cfg_path.string() + " --x 3/4");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "5/6 0.833333333333333\n");

  {
    std::ofstream out(cfg_path);
    out << R"({"q": 2, "unknown_field": 1})";
  }
  r = run_cli("eval cdf --config " + cfg_path.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("unknown_field") != std::string::npos);
  std::filesystem::remove(cfg_path);
}

TEST_CASE("finite difference diagnostic agrees on polynomial cases") {
  RunResult r = run_cli(
      "eval derivative --q 2 --sigma 0,1 --r 1/2,1/2 --u 2 --x 1/4 --fd-step 1/64");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("1/2 0.5\n") == 0);
  CHECK(r.output.find("fd-diagnostic 1/2 0.5\n") != std::string::npos);
}
