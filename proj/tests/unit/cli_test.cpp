#include <gtest/gtest.h>

#include <cstdio>
#include <limits>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "json.hpp"

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mptosc::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream stream(text);
  for (std::string line; std::getline(stream, line);) result.push_back(line);
  return result;
}

// Rebuilds an argument list from a JSON params_echo so that re-running it
// should reproduce the original rows.
std::vector<std::string> replay_args(const std::string& command, const nlohmann::ordered_json& echo) {
  std::vector<std::string> args{command, "--format", "json"};
  for (const auto& [key, value] : echo.items()) {
    if (value.is_null()) continue;
    if (key == "alpha") {
      std::ostringstream text;
      text.precision(17);
      text << value[0].get<double>() << (value[1].get<double>() < 0 ? "" : "+") << value[1].get<double>() << "i";
      args.insert(args.end(), {"--alpha", text.str()});
    } else if (key == "log_scale") {
      if (value.get<bool>()) args.push_back("--log-scale");
    } else {
      std::string flag = "--" + key;
      for (char& c : flag) c = c == '_' ? '-' : c;
      std::ostringstream text;
      text.precision(17);
      if (value.is_number_float()) {
        text << value.get<double>();
      } else {
        text << value;
      }
      args.insert(args.end(), {flag, text.str()});
    }
  }
  return args;
}

}  // namespace

TEST(ParseComplex, AcceptedForms) {
  using C = std::complex<double>;
  EXPECT_EQ(mptosc::parse_complex("2"), C(2, 0));
  EXPECT_EQ(mptosc::parse_complex("2+1i"), C(2, 1));
  EXPECT_EQ(mptosc::parse_complex("2-1.5j"), C(2, -1.5));
  EXPECT_EQ(mptosc::parse_complex("-3i"), C(0, -3));
  EXPECT_EQ(mptosc::parse_complex("i"), C(0, 1));
  EXPECT_EQ(mptosc::parse_complex("-i"), C(0, -1));
  EXPECT_EQ(mptosc::parse_complex("1-i"), C(1, -1));
  EXPECT_EQ(mptosc::parse_complex("1e-3+2e+2i"), C(1e-3, 2e2));
  EXPECT_EQ(mptosc::parse_complex("+0.5"), C(0.5, 0));
}

TEST(ParseComplex, RejectedForms) {
  for (const char* bad : {"", "abc", "1+", "2+1k", "1++2i", "i2", "1 + 2i", "--1"}) {
    EXPECT_FALSE(mptosc::parse_complex(bad).has_value()) << bad;
  }
}

TEST(Cli, SpectrumHasHeaderAndBoundRows) {
  const auto r = invoke({"spectrum", "--n-param", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "n,E_n,delta_n,f2_n");
  EXPECT_EQ(rows[1].rfind("0,0.45249378105604", 0), 0u) << rows[1];
  EXPECT_NE(rows[5].find(",,"), std::string::npos) << "top level has a blank delta";
}

TEST(Cli, DepthFlagIsEquivalent) {
  EXPECT_EQ(invoke({"spectrum", "--depth", "2.5"}).out, invoke({"spectrum", "--n-param", "10"}).out);
  EXPECT_EQ(invoke({"spectrum", "--depth", "2.5", "--n-param", "10"}).code, 2);
  EXPECT_EQ(invoke({"spectrum"}).code, 2);
}

TEST(Cli, VerifyPassesOnModerateTrap) {
  const auto r = invoke({"verify", "--n-param", "10", "--alpha", "2+1i"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.find(",fail,"), std::string::npos);
}

TEST(Cli, VerifySingleBoundTrap) {
  const auto r = invoke({"verify", "--n-param", "2.8284271247461903", "--alpha", "5"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("statistics.single_bound_state,pass"), std::string::npos);
}

TEST(Cli, VerifyReportsFailuresWithExitOne) {
  // A zero tolerance cannot be met by the floating-point algebra checks.
  const auto r = invoke({"verify", "--n-param", "37.3", "--alpha", "1+2i", "--tol", "1e-300"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("failed checks"), std::string::npos);
  EXPECT_NE(r.out.find(",fail,"), std::string::npos);
}

TEST(Cli, DomainAndUsageErrorsExitTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"verify", "--n-param", "0"},
           {"spectrum", "--n-param", "-3"},
           {"nonsense"},
           {"spectrum", "--n-param", "10", "--bogus"},
           {"state", "--n-param", "10", "--alpha", "two"},
           {"mandel"},
           {"figure", "4"},
           {"spectrum", "--n-param", "10", "--format", "xml"},
           {}}) {
    const auto r = invoke(args);
    EXPECT_EQ(r.code, 2) << (args.empty() ? "<none>" : args[0]);
    EXPECT_FALSE(r.err.empty());
  }
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(invoke({"--help"}).code, 0); }

TEST(Cli, MandelFigureGridHas400Rows) {
  const auto r = invoke({"mandel", "--alpha-abs", "3", "--fig2-grid"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  EXPECT_EQ(rows.size(), 401u);
  EXPECT_EQ(rows[0], "N,Q");
  EXPECT_EQ(invoke({"mandel", "--alpha-abs", "3", "--fig2-grid", "--n-min", "5"}).code, 2);
}

TEST(Cli, SqueezeCustomGrid) {
  const auto r = invoke({"squeeze", "--alpha-abs", "0.5", "--n-min", "1", "--n-max", "3", "--steps", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2].rfind("2,", 0), 0u);
}

TEST(Cli, DeterministicOutput) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"figure", "2"}, {"stats", "--n-param", "40", "--alpha", "1-2i", "--format", "json"}}) {
    EXPECT_EQ(invoke(args).out, invoke(args).out);
  }
}

TEST(Cli, JsonMirrorsRecord) {
  const auto r = invoke({"state", "--n-param", "10", "--alpha", "2", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["schema_version"], "1.0");
  EXPECT_EQ(doc["command"], "state");
  EXPECT_EQ(doc["columns"].size(), 4u);
  EXPECT_EQ(doc["rows"].size(), 5u);
  EXPECT_EQ(doc["params_echo"]["n_param"], 10.0);
}

TEST(Cli, ParamsEchoRoundTrips) {
  const std::vector<std::vector<std::string>> cases{
      {"spectrum", "--depth", "0.7777", "--format", "json"},
      {"stats", "--n-param", "12.345678901234567", "--alpha", "0.3-1.1i", "--format", "json"},
      {"quadrature", "--n-param", "25", "--alpha", "1+1i", "--steps", "9", "--format", "json"},
      {"mandel", "--alpha-abs", "4", "--n-min", "5", "--n-max", "60", "--steps", "17", "--log-scale", "--format",
       "json"},
      {"measure", "--n-param", "7", "--format", "json"},
      {"potential", "--n-param", "6", "--steps", "11", "--format", "json"},
  };
  for (const auto& args : cases) {
    const auto first = invoke(args);
    ASSERT_EQ(first.code, 0) << args[0] << ": " << first.err;
    const auto doc = nlohmann::ordered_json::parse(first.out);
    const auto replay = invoke(replay_args(args[0], doc["params_echo"]));
    ASSERT_EQ(replay.code, 0) << args[0] << ": " << replay.err;
    EXPECT_EQ(nlohmann::ordered_json::parse(replay.out)["rows"], doc["rows"]) << args[0];
  }
}

TEST(Cli, WritesToOutFile) {
  const std::string path = ::testing::TempDir() + "mptosc_cli_test.csv";
  const auto r = invoke({"spectrum", "--n-param", "10", "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream file(path);
  std::stringstream content;
  content << file.rdbuf();
  EXPECT_EQ(content.str(), invoke({"spectrum", "--n-param", "10"}).out);
  std::remove(path.c_str());
}

TEST(Figures, PotentialCurves) {
  const auto record = mptosc::emit_figure_data(1);
  EXPECT_EQ(record.columns, (std::vector<std::string>{"series", "D", "x", "V"}));
  ASSERT_EQ(record.rows.size(), 3u * 401u);
  const auto& centre = record.rows[200];
  EXPECT_EQ(std::get<double>(centre[2]), 0.0);
  EXPECT_EQ(std::get<double>(centre[3]), 0.0);
  EXPECT_NE(std::get<std::string>(record.rows.back()[0]).find("harmonic proxy"), std::string::npos);
}

TEST(Figures, MandelAsymptoteAndSqueezingWindow) {
  const auto fig2 = mptosc::emit_figure_data(2);
  double last_q_alpha3 = 0.0;
  for (const auto& row : fig2.rows) {
    if (std::get<double>(row[1]) == 3.0) last_q_alpha3 = std::get<double>(row[3]);
  }
  EXPECT_LT(std::fabs(last_q_alpha3), 1e-2);

  const auto fig3 = mptosc::emit_figure_data(3);
  bool squeezed = false;
  for (const auto& row : fig3.rows) {
    squeezed = squeezed || (std::get<double>(row[1]) == 0.5 && std::get<double>(row[3]) < 0.0);
  }
  EXPECT_TRUE(squeezed);
  EXPECT_THROW(mptosc::emit_figure_data(0), std::invalid_argument);
}

TEST(Output, CsvQuotingAndNumberFormat) {
  mptosc::OutputRecord record;
  record.columns = {"a", "b,c"};
  record.rows.push_back({std::string("x\"y"), 0.1});
  record.rows.push_back({mptosc::Blank{}, std::int64_t{7}});
  std::ostringstream out;
  mptosc::write_csv(record, out);
  EXPECT_EQ(out.str(), "a,\"b,c\"\n\"x\"\"y\",0.10000000000000001\n,7\n");
  EXPECT_EQ(mptosc::format_number(std::nan("")), "nan");
  EXPECT_EQ(mptosc::format_number(-std::numeric_limits<double>::infinity()), "-inf");
}
