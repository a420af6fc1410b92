#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hermicop/quadrature.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return HERMICOP_CLI_PATH; }

int run_cli(const std::string& args) {
  std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "hermicop_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_flat_pillars(const fs::path& p, const std::string& pair, double sigma,
                        double forward) {
  std::ofstream out(p);
  out << "date,pair,tenor,F,D_dom,D_for,atm,c25,p25,c10,p10\n";
  out << "2021-10-29," << pair << ",1.0," << forward << ",0.98,0.96," << sigma << ","
      << sigma << "," << sigma << "," << sigma << "," << sigma << "\n";
}

}  // namespace

TEST_CASE("cli reports usage errors") {
  CHECK(run_cli("definitely-not-a-command") == 2);
  CHECK(run_cli("price --yz missing.csv") == 2);  // missing required --xz
}

TEST_CASE("cli exit code 3 for missing inputs") {
  fs::path dir = fresh_dir("missing");
  fs::path xz = dir / "xz.csv";
  write_flat_pillars(xz, "XZ", 0.10, 1.10);
  CHECK(run_cli("price --xz " + xz.string() + " --yz " + (dir / "absent.csv").string() +
                " --out " + dir.string()) == 3);
  CHECK(run_cli("--config " + (dir / "absent.json").string() + " price --xz a --yz b") == 3);
}

TEST_CASE("cli exit code 2 for corrupt csv naming the row") {
  fs::path dir = fresh_dir("corrupt");
  fs::path bad = dir / "bad.csv";
  {
    std::ofstream out(bad);
    out << "date,pair,tenor,F,D_dom,D_for,atm,c25,p25,c10,p10\n";
    out << "2021-10-29,XZ,1.0,1.10,0.98,0.96,0.1,0.1,0.1,0.1,0.1\n";
    out << "2021-11-01,XZ,oops,1.10,0.98,0.96,0.1,0.1,0.1,0.1,0.1\n";
  }
  fs::path yz = dir / "yz.csv";
  write_flat_pillars(yz, "YZ", 0.12, 0.0091);
  std::string cmd = std::string(cli_path()) + " price --xz " + bad.string() + " --yz " +
                    yz.string() + " --out " + dir.string() + " 2> " +
                    (dir / "err.txt").string();
  int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  std::string err = slurp(dir / "err.txt");
  CHECK(err.find("row 3") != std::string::npos);
}

TEST_CASE("fit-density on a small gauss target leaves it unchanged") {
  fs::path dir = fresh_dir("fitdensity");
  std::string args = "fit-density --family gauss --spearman 0.0 --sections 64 --n-max 3 "
                     "--max-order 4 --out " + dir.string();
  CHECK(run_cli(args) == 0);

  // a Gauss target with Spearman 0 is the independent normal: the expansion
  // is already feasible, so correction must not move it
  auto uncorrected = hermicop::read_grid_density((dir / "case_a_uncorrected.csv").string(),
                                                 (dir / "case_a_uncorrected.json").string());
  auto corrected = hermicop::read_grid_density((dir / "case_a_corrected.csv").string(),
                                               (dir / "case_a_corrected.json").string());
  REQUIRE(uncorrected.values.size() == corrected.values.size());
  for (std::size_t i = 0; i < corrected.values.size(); ++i) {
    CHECK(std::fabs(corrected.values[i] - uncorrected.values[i]) < 1e-6);
  }

  // moment tables parse and carry the unit mass in the (0,0) cell
  std::ifstream moments(dir / "moments_target.csv");
  std::string header, first;
  REQUIRE(std::getline(moments, header));
  REQUIRE(std::getline(moments, first));
  bool mass_cell_ok =
      first.rfind("x2^0,1.0000", 0) == 0 || first.rfind("x2^0,0.9999", 0) == 0;
  CHECK(mass_cell_ok);

  SUBCASE("byte-identical outputs on a second run") {
    std::string again = slurp(dir / "case_a_corrected.csv");
    fs::path dir2 = fresh_dir("fitdensity2");
    std::string args2 = "fit-density --family gauss --spearman 0.0 --sections 64 "
                        "--n-max 3 --max-order 4 --out " + dir2.string();
    CHECK(run_cli(args2) == 0);
    CHECK(slurp(dir2 / "case_a_corrected.csv") == again);
  }
}

TEST_CASE("correct command round-trips a density") {
  fs::path dir = fresh_dir("correct");
  // build a small density file: independent normal with a negative dent
  auto grid = hermicop::build_grid({{-6.0, 6.0}, {-6.0, 6.0}}, {64, 64});
  hermicop::GridDensity d;
  d.grid = grid;
  d.kind = hermicop::DensityKind::Ratio;
  d.rho = 0.0;
  d.weight_density = hermicop::gaussian_weight_independent(grid);
  d.values.assign(grid.node_count(), 1.0);
  d.values[100] = -0.4;
  hermicop::write_grid_density(d, (dir / "in.csv").string(), (dir / "in.json").string());

  std::string args = "correct --in " + (dir / "in.csv").string() + " --meta " +
                     (dir / "in.json").string() + " --out " + (dir / "out.csv").string() +
                     " --out-meta " + (dir / "out.json").string() + " --report " +
                     (dir / "report.json").string();
  CHECK(run_cli(args) == 0);
  auto out = hermicop::read_grid_density((dir / "out.csv").string(),
                                         (dir / "out.json").string());
  for (double v : out.values) CHECK(v >= -1e-12);
  CHECK(slurp(dir / "report.json").find("\"converged\": true") != std::string::npos);
}

TEST_CASE("price command with flat smiles matches the closed form") {
  fs::path dir = fresh_dir("price");
  write_flat_pillars(dir / "xz.csv", "XZ", 0.10, 1.10);
  write_flat_pillars(dir / "yz.csv", "YZ", 0.12, 0.0091);

  std::string args = "price --xz " + (dir / "xz.csv").string() + " --yz " +
                     (dir / "yz.csv").string() +
                     " --copula gauss --theta 0.4 --nodes 200 --out " + dir.string();
  CHECK(run_cli(args) == 0);

  double expected = std::sqrt(0.01 + 0.0144 - 2.0 * 0.4 * 0.10 * 0.12);
  std::ifstream pillars(dir / "cross_pillars.csv");
  std::string line;
  REQUIRE(std::getline(pillars, line));  // header
  int rows = 0;
  while (std::getline(pillars, line)) {
    auto last = line.rfind(',');
    double vol = std::stod(line.substr(last + 1));
    CHECK(std::fabs(vol - expected) < 1e-3);
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("param-sweep outputs") {
  fs::path dir = fresh_dir("sweep");
  write_flat_pillars(dir / "xz.csv", "XZ", 0.10, 1.10);
  write_flat_pillars(dir / "yz.csv", "YZ", 0.12, 0.0091);
  {
    std::ofstream params(dir / "params.json");
    params << R"({"rho":0.3661,"n_max":6,"m_check":[-0.3535,0.9641,0.0827,-2.0537]})";
  }

  SUBCASE("zero-width sweep emits the base point") {
    std::string args = "param-sweep --xz " + (dir / "xz.csv").string() + " --yz " +
                       (dir / "yz.csv").string() + " --params " +
                       (dir / "params.json").string() + " --param rho --steps 1 --out " +
                       (dir / "sweep.csv").string();
    CHECK(run_cli(args) == 0);
    std::ifstream sweep(dir / "sweep.csv");
    std::string header, row, extra;
    REQUIRE(std::getline(sweep, header));
    REQUIRE(std::getline(sweep, row));
    CHECK(!std::getline(sweep, extra));
    REQUIRE(row.rfind("rho,", 0) == 0);
    std::size_t second_comma = row.find(',', 4);
    double base_value = std::stod(row.substr(4, second_comma - 4));
    CHECK(base_value == doctest::Approx(0.3661).epsilon(1e-12));
  }

  SUBCASE("rho sweep decreases, m3 sweep changes direction") {
    std::string args = "param-sweep --xz " + (dir / "xz.csv").string() + " --yz " +
                       (dir / "yz.csv").string() + " --params " +
                       (dir / "params.json").string() +
                       " --param rho --lo -0.6 --hi 0.6 --steps 4 --out " +
                       (dir / "rho.csv").string();
    CHECK(run_cli(args) == 0);
    std::ifstream sweep(dir / "rho.csv");
    std::string line;
    std::getline(sweep, line);
    double prev = 1e9;
    while (std::getline(sweep, line)) {
      double atm = std::stod(line.substr(line.rfind(',') + 1));
      CHECK(atm < prev);
      prev = atm;
    }

    std::string args3 = "param-sweep --xz " + (dir / "xz.csv").string() + " --yz " +
                        (dir / "yz.csv").string() + " --params " +
                        (dir / "params.json").string() +
                        " --param m3 --lo -3 --hi 3 --steps 13 --out " +
                        (dir / "m3.csv").string();
    CHECK(run_cli(args3) == 0);
    std::ifstream m3(dir / "m3.csv");
    std::getline(m3, line);
    std::vector<double> atms;
    while (std::getline(m3, line)) atms.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    REQUIRE(atms.size() == 13);
    int sign_changes = 0;
    for (std::size_t i = 2; i < atms.size(); ++i) {
      double d1 = atms[i - 1] - atms[i - 2];
      double d2 = atms[i] - atms[i - 1];
      if (d1 * d2 < 0.0) ++sign_changes;
    }
    CHECK(sign_changes >= 1);  // not monotone over the scan
  }
}

TEST_CASE("calibrate command exit code 3 without a cross smile") {
  fs::path dir = fresh_dir("calibrate_missing");
  write_flat_pillars(dir / "xz.csv", "XZ", 0.10, 1.10);
  write_flat_pillars(dir / "yz.csv", "YZ", 0.12, 0.0091);
  {
    std::ofstream cross(dir / "cross.csv");
    cross << "date,pair,tenor,F,D_dom,D_for,atm,c25,p25,c10,p10\n";
    cross << "2021-10-29,XY,1.0,120,0.97,0.96,0.11,0,0,0,0\n";  // ATM only
  }
  std::string args = "calibrate --xz " + (dir / "xz.csv").string() + " --yz " +
                     (dir / "yz.csv").string() + " --cross " +
                     (dir / "cross.csv").string() + " --family gauss --out " + dir.string();
  CHECK(run_cli(args) == 3);
}
