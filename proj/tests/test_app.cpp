#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pnsguard/app/commands.hpp"
#include "pnsguard/app/csv.hpp"

using namespace pnsguard;
using namespace pnsguard::app;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pnsguard");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("pnsguard_test_" + name);
  std::ofstream(path) << text;
  return path;
}

bool has_field(const std::vector<Diagnostic>& diags, const std::string& field) {
  for (const auto& d : diags)
    if (d.field == field) return true;
  return false;
}

}  // namespace

TEST_CASE("numbers round-trip through their text form") {
  for (double v : {0.0, 1.0, -2.5, 1e-300, 0.1 + 0.2, 9.368019506715715e-3, 6.02e23}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("csv writer and parser agree") {
  std::ostringstream buf;
  CsvWriter w(buf);
  w.comment("hello");
  w.header({"a", "b"});
  w.row({"1", "2.5"});
  w.row({"3", "4"});
  CHECK_THROWS_AS(w.row({"1"}), std::logic_error);

  const auto t = parse_csv(buf.str());
  CHECK(t.comments == std::vector<std::string>{"hello"});
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.number(0, "b") == 2.5);
  CHECK_THROWS_AS(t.column("c"), std::out_of_range);
  CHECK(data_section(buf.str()) == "a,b\n1,2.5\n3,4\n");
}

TEST_CASE("grid parsing") {
  CHECK(parse_grid("0:1:0.25") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(parse_grid("0:1:0.1").size() == 11);
  CHECK(parse_grid("0:1:0.1").back() == 1.0);
  CHECK(parse_grid("1,2.5") == std::vector<double>{1, 2.5});
  CHECK(parse_grid("38") == std::vector<double>{38});
  CHECK_THROWS_AS(parse_grid("0:1:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("a,b"), std::invalid_argument);
  CHECK(parse_counts("1e3,1e5") == std::vector<std::uint64_t>{1000, 100000});
  CHECK_THROWS_AS(parse_counts("1.5"), std::invalid_argument);
}

TEST_CASE("built-in presets validate") {
  const auto p = PresetTable::builtin();
  for (const auto& name : p.source_names()) CHECK_NOTHROW(p.source(name).params.validate());
  CHECK(p.source("OUR-HBN").params.quantum_efficiency == 0.0363);
  CHECK(p.link("micius").loss_db == 38);
  CHECK(p.link("micius").flyover_s == 273);
  CHECK_THROWS_AS(p.source("laser"), std::out_of_range);
}

TEST_CASE("shipped preset file matches the built-in table") {
  PresetTable file;
  file.load_file(default_preset_file());
  const auto builtin = PresetTable::builtin();
  for (const auto& name : builtin.source_names()) {
    REQUIRE(file.has_source(name));
    CHECK(file.source(name).params.g3 == builtin.source(name).params.g3);
  }
  CHECK(file.link("micius").distance_km == 645);
}

TEST_CASE("user preset files extend the table") {
  const auto path = write_temp("presets.json", R"({"sources": {"laser-ish": {
      "quantum_efficiency": 0.3, "g2": 0.9, "g3": 0.8}}})");
  auto p = PresetTable::builtin();
  p.load_file(path);
  CHECK(p.has_source("laser-ish"));
  CHECK(p.has_source("our-hbn"));

  const auto bad = write_temp("bad_presets.json", R"({"sources": {"x": {"g2": 0.1}}})");
  CHECK_THROWS_AS(p.load_file(bad), std::invalid_argument);
}

TEST_CASE("valid config produces no diagnostics") {
  const auto path = write_temp("ok.json", R"({"command": "keyrate",
      "source": {"preset": "our-hbn"}, "channel": {"loss_db": "0:10:5"}})");
  CHECK(validate_config(path).empty());
}

TEST_CASE("attack strength outside its range names the field") {
  const auto path = write_temp("x.json", R"({"command": "attack-sweep",
      "source": {"preset": "qd"}, "attack": {"kind": "soft", "x": 1.5}})");
  const auto diags = validate_config(path);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].field == "attack.x");
  CHECK(diags[0].message.find("AttackSpec.x") != std::string::npos);
}

TEST_CASE("missing source is a structural violation") {
  const auto path = write_temp("nosrc.json", R"({"command": "keyrate"})");
  const auto diags = validate_config(path);
  REQUIRE(has_field(diags, "source"));
}

TEST_CASE("every violation is reported at once") {
  const auto path = write_temp("many.json", R"({"command": "attack-sweep",
      "source": {"quantum_efficiency": 1.4, "g2": 0.1, "g3": 0.1},
      "attack": {"kind": "sneaky", "x": [0.5]}, "channel": {"eta_det": 2},
      "colour": "blue"})");
  const auto diags = validate_config(path);
  CHECK(has_field(diags, "source.quantum_efficiency"));
  CHECK(has_field(diags, "attack.kind"));
  CHECK(has_field(diags, "channel.eta_det"));
  CHECK(has_field(diags, "colour"));
}

TEST_CASE("unreadable config is an IO error") {
  CHECK_THROWS_AS(validate_config("/nonexistent/pnsguard.json"), std::runtime_error);
}

TEST_CASE("shipped scenarios validate") {
  const auto dir = std::filesystem::path(PNSGUARD_SOURCE_DIR) / "scenarios";
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    INFO(entry.path().string());
    CHECK(validate_config(entry.path()).empty());
    ++n;
  }
  CHECK(n >= 5);
}

TEST_CASE("attack sweep rows are normalized distributions") {
  const auto r = cli({"attack-sweep", "--preset", "hbn-high", "--kind", "hard", "--x", "0:1:0.25",
                      "--runs", "4", "--samples", "20000"});
  REQUIRE(r.code == 0);
  const auto t = parse_csv(r.out);
  REQUIRE(t.rows.size() == 5);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    double sum = 0, exact = 0;
    for (const char* c : {"P0", "P1", "P2", "P3"}) sum += t.number(i, c);
    for (const char* c : {"exact_P0", "exact_P1", "exact_P2", "exact_P3"}) exact += t.number(i, c);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(t.number(4, "exact_P3") == 0.0);
  bool seed_recorded = false;
  for (const auto& c : t.comments) seed_recorded |= c.rfind("master_seed: ", 0) == 0;
  CHECK(seed_recorded);
}

TEST_CASE("divergent point is marked in the sweep") {
  const auto r = cli({"attack-sweep", "--kind", "hard", "--x", "1", "--runs", "2", "--samples",
                      "1000"});
  REQUIRE(r.code == 0);
  const auto t = parse_csv(r.out);
  CHECK(t.rows[0][t.column("status")] == "divergent");
}

TEST_CASE("keyrate columns and ordering") {
  const auto r = cli({"keyrate", "--loss", "0:40:1"});
  REQUIRE(r.code == 0);
  const auto t = parse_csv(r.out);
  REQUIRE(t.rows.size() == 41);
  for (const char* c : {"loss_db", "R_proposed", "R_gllp", "T_wait"}) CHECK_NOTHROW(t.column(c));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    CHECK(t.number(i, "R_proposed") >= t.number(i, "R_gllp"));
}

TEST_CASE("waiting-time uses the link preset") {
  const auto r = cli({"waiting-time"});
  REQUIRE(r.code == 0);
  const auto t = parse_csv(r.out);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.number(0, "loss_db") == 38);
  CHECK(t.number(0, "feasible") == 1);
  CHECK(cli({"waiting-time", "--loss", "60"}).out.find(",0,") != std::string::npos);
}

TEST_CASE("hbt and convergence commands run at small scale") {
  auto r = cli({"hbt", "--preset", "hbn-high", "--pulses", "200000", "--efficiency", "0.5",
                "--max-lag", "20"});
  REQUIRE(r.code == 0);
  CHECK(parse_csv(r.out).rows.size() == 41);

  r = cli({"convergence", "--sizes", "1e3,1e4", "--runs", "5", "--reference", "1e5"});
  REQUIRE(r.code == 0);
  CHECK(parse_csv(r.out).rows.size() == 2);

  r = cli({"detect", "--preset", "hbn-high", "--x", "0,0.5", "--runs", "5", "--samples", "100000"});
  REQUIRE(r.code == 0);
  const auto t = parse_csv(r.out);
  CHECK(t.number(0, "alarm") == 0);
  CHECK(t.number(1, "alarm") == 1);
}

TEST_CASE("identical seeds give identical data sections") {
  const std::vector<std::string> args{"attack-sweep", "--x", "0,0.5", "--runs", "3", "--samples",
                                      "50000", "--seed", "5"};
  const auto a = cli(args);
  const auto b = cli(args);
  CHECK(data_section(a.out) == data_section(b.out));
  auto c_args = args;
  c_args.back() = "6";
  CHECK(data_section(cli(c_args).out) != data_section(a.out));
}

TEST_CASE("exit codes") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({}).code == 1);
  CHECK(cli({"attack-sweep", "--bogus"}).code == 1);

  auto r = cli({"attack-sweep", "--x", "1.5"});
  CHECK(r.code == 1);
  CHECK(r.err.find("AttackSpec.x") != std::string::npos);

  r = cli({"keyrate", "--qe", "0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("mu") != std::string::npos);

  r = cli({"keyrate", "--qe", "0", "--y0", "0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Q_mu") != std::string::npos);

  r = cli({"attack-sweep", "--qe", "0.9", "--g2", "5", "--g3", "5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("mu") != std::string::npos);
}

TEST_CASE("run executes a config and writes its output file") {
  const auto out = std::filesystem::temp_directory_path() / "pnsguard_test_out.csv";
  std::filesystem::remove(out);
  const auto cfg = write_temp("run.json", R"({"command": "waiting-time",
      "source": {"preset": "our-hbn"}, "output": {"path": ")" + out.string() + R"("}})");
  const auto r = cli({"run", cfg.string()});
  CHECK(r.code == 0);
  REQUIRE(std::filesystem::exists(out));
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(parse_csv(text.str()).number(0, "T_wait") > 0);

  const auto bad = write_temp("run_bad.json", R"({"command": "keyrate"})");
  CHECK(cli({"run", bad.string()}).code == 1);
  CHECK(cli({"validate", bad.string()}).code == 1);
  CHECK(cli({"validate", cfg.string()}).code == 0);
}
