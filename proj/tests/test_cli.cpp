#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bnsens/api.hpp"
#include "bnsens/document.hpp"
#include "bnsens/service.hpp"
#include "testkit.hpp"

using bnsens::api::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  const auto err_path = std::filesystem::temp_directory_path() / ("bnsens_cli_err_" + std::to_string(::getpid()));
  const std::string cmd = std::string(BNSENS_CLI_PATH) + " " + args + " 2>" + err_path.string();
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  std::filesystem::remove(err_path);
  return r;
}

std::string fire() { return testkit::data_path("fire.bnet"); }

std::string quoted(const std::string& s) { return "'" + s + "'"; }

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

// The service's answer to the same question, rounded like the CLI.
json service_answer(const std::string& path, const json& body) {
  bnsens::service::Service s;
  std::ifstream in(fire());
  std::stringstream doc;
  doc << in.rdbuf();
  const auto created = s.handle({"POST", "/sessions", {}, json{{"document", doc.str()}}.dump()});
  const std::string id = json::parse(created.body)["session"];
  const auto r = s.handle({"POST", "/sessions/" + id + path, {{"digits", "6"}}, body.dump()});
  return json::parse(r.body);
}

}  // namespace

TEST_CASE("query prints a table or JSON") {
  const auto table = run("query " + fire() + " -t Tampering=t -e Smoke=t,Leaving=t");
  CHECK(table.code == 0);
  CHECK(table.out == "P(Tampering=t | Leaving=t,Smoke=t) = 0.0287077\n");

  const auto js = run("--format json query " + fire() + " -t Tampering=t -e Smoke=t,Leaving=t");
  CHECK(js.code == 0);
  const auto j = json::parse(js.out);
  CHECK(j["probability"] == 0.0287077);

  const auto full = run("--format json --digits 0 query " + fire() + " -t Tampering=t -e Smoke=t,Leaving=t");
  CHECK(json::parse(full.out)["probability"].get<double>() != 0.0287077);
}

TEST_CASE("CLI JSON equals the service's rounded JSON") {
  const std::string c = "P(Fire=t|Leaving=t,Smoke=f)<=0.025";
  struct Case {
    std::string args;
    std::string path;
    json body;
  };
  const std::vector<Case> cases{
      {"suggest param " + fire() + " -c " + quoted(c), "/suggest/param", {{"constraint", c}}},
      {"suggest cpt " + fire() + " Alarm -c " + quoted(c), "/suggest/cpt", {{"constraint", c}, {"variable", "Alarm"}}},
      {"suggest two-cpt " + fire() + " Fire Tampering -c " + quoted(c), "/suggest/two-cpt",
       {{"constraint", c}, {"x", "Fire"}, {"y", "Tampering"}}},
      {"relevance " + fire() + " -c " + quoted(c), "/suggest/relevance", {{"constraint", c}}},
      {"softev " + fire() + " -s Smoke -c " + quoted("P(Fire=t|Alarm=t)>=0.8"), "/suggest/softev",
       {{"constraint", "P(Fire=t|Alarm=t)>=0.8"}, {"sensors", {"Smoke"}}}},
      {"solution-space " + fire() + " -c " + quoted(c) + " --cpt Fire --cpt Tampering --samples 32",
       "/solution-space", {{"constraint", c}, {"cpts", {"Fire", "Tampering"}}, {"samples", 32}}},
      {"query " + fire() + " -t Fire=t -e Alarm=t", "/posterior", {{"target", "Fire=t"}, {"evidence", "Alarm=t"}}},
  };
  for (const auto& k : cases) {
    CAPTURE(k.args);
    const auto r = run("--format json " + k.args);
    CHECK(r.code == 0);
    CHECK(json::parse(r.out) == service_answer(k.path, k.body));
  }
}

TEST_CASE("table output of the suggestion commands") {
  const std::string c = quoted("P(Tampering=t|Smoke=t,Leaving=t)<=0.01");
  auto r = run("suggest cpt " + fire() + " Alarm -c " + c);
  CHECK(r.code == 0);
  CHECK(r.out.find("suggested change") != std::string::npos);
  CHECK(r.out.find("distance    2.28786") != std::string::npos);

  r = run("suggest param " + fire() + " -c " + c + " --cpt Tampering");
  CHECK(r.code == 0);
  CHECK(r.out.find("Tampering=t") != std::string::npos);
  CHECK(r.out.find("Alarm") == std::string::npos);

  r = run("relevance " + fire() + " -c " + c);
  CHECK(r.out.find("\nrank") != std::string::npos);

  r = run("bounds --d 0.5 --samples 3");
  CHECK(r.out.find("0.5  0.377541  0.622459") != std::string::npos);
  r = run("bounds --d inf --p 0.2");
  CHECK(r.out == "(0, 1)\n");
}

TEST_CASE("solution space rows are plottable") {
  const auto r = run("solution-space " + fire() + " -c " + quoted("P(Fire=t|Leaving=t,Smoke=f)<=0.025") +
                     " --param Fire=t --param Tampering=t --samples 8");
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int numeric = 0;
  while (std::getline(lines, line)) {
    double a, b;
    char extra;
    if (std::sscanf(line.c_str(), "%lf %lf %c", &a, &b, &extra) == 2) ++numeric;
  }
  CHECK(numeric > 4);
}

TEST_CASE("format prints the canonical document") {
  const auto r = run("format " + fire());
  CHECK(r.code == 0);
  const auto doc = bnsens::parse_document(r.out);
  CHECK(doc.name == "fire");
  CHECK(bnsens::serialize_network(doc.network, doc.name) == r.out);
}

TEST_CASE("exit codes") {
  // 1: parse errors, in documents, expressions and flags.
  const auto bad = temp_file("bnsens_bad.bnet", "variable A { a b }\ncpt A { () 0.5 0.6 }\n");
  auto r = run("query " + bad + " -t A=a");
  CHECK(r.code == 1);
  CHECK(r.err.find("line 2") != std::string::npos);
  std::filesystem::remove(bad);
  CHECK(run("query " + fire() + " -t Fire").code == 1);
  CHECK(run("relevance " + fire() + " -c " + quoted("P(Fire=t)<0.5")).code == 1);
  CHECK(run("query").code == 1);
  CHECK(run("--format xml query " + fire() + " -t Fire=t").code == 1);
  CHECK(run("query /no/such/file -t Fire=t").code == 1);

  // 2: the constraint cannot be met.
  r = run("suggest cpt " + fire() + " Leaving -c " + quoted("P(Fire=t|Leaving=t)>=0.9"));
  CHECK(r.code == 2);
  CHECK(r.out.find("INFEASIBLE") != std::string::npos);

  // 3: well-formed but violates a precondition.
  r = run("suggest two-cpt " + fire() + " Fire Smoke -c " + quoted("P(Fire=t|Leaving=t)<=0.01"));
  CHECK(r.code == 3);
  CHECK(r.err.find("error: ") == 0);
  CHECK(run("query " + fire() + " -t Nope=t").code == 3);

  CHECK(run("--help").code == 0);
}
