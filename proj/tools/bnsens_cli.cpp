// bnsens: command-line front-end. Every subcommand parses its flags, calls the
// matching bnsens::api function and prints the result as a table or JSON.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bnsens/api.hpp"
#include "bnsens/document.hpp"
#include "bnsens/service.hpp"
#include "bnsens/text.hpp"

namespace {

using bnsens::api::json;

int exit_code(bnsens::ErrorKind kind) { return static_cast<int>(kind); }

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return bnsens::format_significant(v.get<double>(), 6);
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_null()) return "-";
  return v.dump();
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_)
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (width.size() <= i) width.push_back(0);
        width[i] = std::max(width[i], r[i].size());
      }
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      std::string line;
      for (std::size_t i = 0; i < rows_[k].size(); ++i) {
        if (i) line += "  ";
        line += rows_[k][i] + std::string(width[i] - rows_[k][i].size(), ' ');
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out << line << "\n";
      if (k == 0) {
        std::size_t total = 0;
        for (std::size_t i = 0; i < width.size(); ++i) total += width[i] + (i ? 2 : 0);
        out << std::string(total, '-') << "\n";
      }
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

void print_report(const json& report, std::ostream& out) {
  out << "constraint  " << cell(report["constraint"]["text"]) << "\n";
  out << "current     " << cell(report["current"]) << "\n";
  out << "rhs         " << cell(report["rhs"]) << (report["satisfied"].get<bool>() ? "  (already satisfied)" : "")
      << "\n\n";
  Table t({"parameter", "theta", "alpha", ""});
  for (const auto& a : report["alphas"])
    t.add({cell(a["parameter"]), cell(a["theta"]), cell(a["alpha"]), a["inert"].get<bool>() ? "inert" : ""});
  t.print(out);
  if (!report["cross_alphas"].empty()) {
    out << "\n";
    Table c({"x", "y", "cross alpha"});
    for (const auto& a : report["cross_alphas"]) c.add({cell(a["x"]), cell(a["y"]), cell(a["alpha"])});
    c.print(out);
  }
  for (const auto& e : report["excluded"]) out << "excluded (locked or extreme): " << cell(e) << "\n";
}

void print_suggestion(const json& s, std::ostream& out) {
  out << "\n" << (s["feasible"].get<bool>() ? "suggested change" : "INFEASIBLE; closest attempt") << "\n";
  Table t({"parameter", "theta", "new", "delta"});
  for (const auto& d : s["deltas"])
    t.add({cell(d["parameter"]), cell(d["theta"]), cell(d["new_value"]), cell(d["delta"])});
  t.print(out);
  out << "achieved    " << cell(s["achieved"]) << "\n";
  out << "distance    " << cell(s["distance"]) << "\n";
}

void print_table(const json& r, std::ostream& out) {
  const std::string kind = r.value("kind", "");
  if (r.contains("probability")) {
    std::string ev = bnsens::to_string(bnsens::api::evidence_from_json(r["evidence"]));
    out << "P(" << bnsens::to_string(bnsens::api::evidence_from_json(r["target"])) << (ev.empty() ? "" : " | " + ev)
        << ") = " << cell(r["probability"]) << "\n";
  } else if (kind == "param") {
    out << "constraint  " << cell(r["constraint"]["text"]) << "\n";
    out << "current     " << cell(r["current"]) << "\n\n";
    Table t({"parameter", "theta", "alpha", "status", "admissible", "suggested", "distance"});
    for (const auto& s : r["solutions"]) {
      const bool ok = s["status"] == "feasible";
      t.add({cell(s["parameter"]), cell(s["theta"]), cell(s["alpha"]), cell(s["status"]),
             ok ? "[" + cell(s["low"]) + ", " + cell(s["high"]) + "]" : "-", ok ? cell(s["suggested"]) : "-",
             ok ? cell(s["distance"]) : "-"});
    }
    t.print(out);
  } else if (kind == "cpt" || kind == "two-cpt") {
    print_report(r["report"], out);
    print_suggestion(r["suggestion"], out);
    if (kind == "cpt") {
      out << "log-odds step " << cell(r["step"]) << "\n";
    } else {
      out << "log-odds steps " << cell(r["x"]) << " " << cell(r["step_x"]) << ", " << cell(r["y"]) << " "
          << cell(r["step_y"]) << "\n";
    }
    out << "reachable at this distance  [" << cell(r["bound"]["lower"]) << ", " << cell(r["bound"]["upper"])
        << "]\n";
  } else if (kind == "relevance") {
    out << "constraint  " << cell(r["constraint"]["text"]) << "\n\n";
    Table t({"rank", "cpt", "max |alpha|", "active"});
    std::size_t rank = 1;
    for (const auto& c : r["ranking"])
      t.add({std::to_string(rank++), cell(c["variable"]), cell(c["max_abs_alpha"]), cell(c["active"])});
    t.print(out);
  } else if (kind == "softev") {
    out << "constraint  " << cell(r["constraint"]["text"]) << "\n\n";
    Table t({"host", "sensor", "P(q|r)", "false pos", "false neg", "lambda"});
    for (const auto& s : r["sensors"])
      t.add({cell(s["host"]), cell(s["node"]), cell(s["true_positive"]), cell(s["false_positive"]),
             cell(s["false_negative"]), cell(s["likelihood_ratio"])});
    t.print(out);
    out << "\n" << (r["feasible"].get<bool>() ? "" : "INFEASIBLE\n");
    out << "achieved    " << cell(r["suggestion"]["achieved"]) << "\n";
    out << "distance    " << cell(r["total_distance"]) << "\n";
  } else if (r.contains("curve")) {
    out << "# d = " << cell(r["d"]) << "\n";
    Table t({"p", "lower", "upper"});
    for (const auto& pt : r["curve"]) t.add({cell(pt["p"]), cell(pt["lower"]), cell(pt["upper"])});
    t.print(out);
  } else if (r.contains("lower")) {
    out << "(" << cell(r["lower"]) << ", " << cell(r["upper"]) << ")\n";
  } else if (kind == "solution-space") {
    print_report(r["report"], out);
    const auto& b = r["boundary"];
    if (!b.is_null()) {
      out << "\n# boundary " << cell(b["alpha1"]) << "*d1 + " << cell(b["alpha2"]) << "*d2 + " << cell(b["cross"])
          << "*d1*d2 = " << cell(b["rhs"]) << "\n# d1: " << cell(b["first"]) << "   d2: " << cell(b["second"])
          << "\n";
      for (const auto& pt : b["points"]) out << cell(pt[0]) << " " << cell(pt[1]) << "\n";
    }
  } else {
    out << r.dump(2) << "\n";
  }
}

bnsens::service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensitivity analysis for discrete Bayesian networks"};
  app.require_subcommand(1);

  std::string format = "table";
  int digits = 6;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json"}));
  app.add_option("--digits", digits, "Significant digits in output (0 = full precision)")->check(CLI::Range(0, 17));

  std::string network_path, evidence_text, target_text, constraint_text;
  std::vector<std::string> cpts, params, sensors;
  std::string x_var, y_var;
  double tolerance = 1e-6;
  std::optional<double> p_value;
  double d_value = 0.0;
  std::size_t samples = 0;

  auto add_network = [&](CLI::App* sub) {
    sub->add_option("network", network_path, "Network document")->required()->check(CLI::ExistingFile);
  };
  auto add_constraint = [&](CLI::App* sub) {
    sub->add_option("-c,--constraint", constraint_text, "Constraint, e.g. \"P(Fire=t|Alarm=t)<=0.3\"")->required();
    sub->add_option("-e,--evidence", evidence_text, "Evidence, e.g. Smoke=t,Leaving=t");
  };

  auto* query = app.add_subcommand("query", "Posterior probability of a target event");
  add_network(query);
  query->add_option("-t,--target", target_text, "Target event, e.g. Tampering=t")->required();
  query->add_option("-e,--evidence", evidence_text, "Evidence, e.g. Smoke=t,Leaving=t");

  auto* suggest = app.add_subcommand("suggest", "Parameter changes that enforce a constraint");
  suggest->require_subcommand(1);
  auto* s_param = suggest->add_subcommand("param", "Every single-parameter solution");
  add_network(s_param);
  add_constraint(s_param);
  s_param->add_option("--cpt", cpts, "Restrict to these CPTs");
  auto* s_cpt = suggest->add_subcommand("cpt", "Least-distance change of one whole CPT");
  add_network(s_cpt);
  s_cpt->add_option("variable", x_var, "CPT to change")->required();
  add_constraint(s_cpt);
  s_cpt->add_option("--tolerance", tolerance, "Tolerance on the achieved posterior");
  auto* s_two = suggest->add_subcommand("two-cpt", "Least-distance joint change of two CPTs");
  add_network(s_two);
  s_two->add_option("x", x_var, "First CPT")->required();
  s_two->add_option("y", y_var, "Second CPT")->required();
  add_constraint(s_two);
  s_two->add_option("--tolerance", tolerance, "Tolerance on the achieved posterior");

  auto* rel = app.add_subcommand("relevance", "Rank CPTs by their influence on the constraint");
  add_network(rel);
  add_constraint(rel);

  auto* soft = app.add_subcommand("softev", "Weakest virtual evidence enforcing a constraint");
  add_network(soft);
  soft->add_option("-s,--sensor", sensors, "Host variable of a virtual sensor (one or two)")->required();
  add_constraint(soft);
  soft->add_option("--tolerance", tolerance, "Tolerance on the achieved posterior");

  auto* bounds = app.add_subcommand("bounds", "Range of any query after a change of distance d");
  bounds->add_option("--p", p_value, "Original query value; omit for the whole curve")->check(CLI::Range(0.0, 1.0));
  bounds->add_option("--d", d_value, "Distance (inf allowed)")
      ->required()
      ->check(CLI::Validator(
          [](std::string& v) {
            double d = -1.0;
            try {
              d = std::stod(v);
            } catch (const std::exception&) {
              return std::string("distance must be a number");
            }
            return d >= 0.0 ? std::string() : std::string("distance must be non-negative");
          },
          "NONNEGATIVE"));
  bounds->add_option("--samples", samples, "Curve samples")->check(CLI::Range(2, 1000000));

  auto* space = app.add_subcommand("solution-space", "Constraint coefficients and boundary samples");
  add_network(space);
  add_constraint(space);
  space->add_option("--cpt", cpts, "One or two CPTs");
  space->add_option("--param", params, "Exactly two parameters, e.g. Fire=t");
  space->add_option("--samples", samples, "Boundary samples")->check(CLI::Range(2, 1000000));

  auto* fmt = app.add_subcommand("format", "Print a network document in canonical form");
  add_network(fmt);

  std::string host = "127.0.0.1";
  int port = 8080;
  int idle = 3600;
  int deadline = 30;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--idle-timeout", idle, "Session idle expiry in seconds")->check(CLI::PositiveNumber);
  serve->add_option("--deadline", deadline, "Per-request deadline in seconds")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_code(bnsens::ErrorKind::parse);
  }

  try {
    const bnsens::api::Format out_format{digits};
    bnsens::SolveOptions solve;
    solve.tolerance = tolerance;

    if (serve->parsed()) {
      bnsens::service::Service service({std::chrono::seconds(idle), std::chrono::seconds(deadline)});
      bnsens::service::HttpServer server(service);
      const int bound = server.bind(host, port);
      if (bound < 0) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return exit_code(bnsens::ErrorKind::precondition);
      }
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.run();
      return 0;
    }

    json result;
    if (bounds->parsed()) {
      result = bnsens::api::bounds(p_value, d_value, samples ? samples : 101, out_format);
    } else {
      const auto doc = bnsens::load_network_file(network_path);
      const auto& net = doc.network;
      const auto evidence = bnsens::parse_evidence(evidence_text);
      auto constraint = [&] { return bnsens::parse_constraint(constraint_text, evidence); };

      if (fmt->parsed()) {
        std::cout << bnsens::serialize_network(net, doc.name);
        return 0;
      } else if (query->parsed()) {
        result = bnsens::api::query(net, bnsens::parse_evidence(target_text), evidence, out_format);
      } else if (s_param->parsed()) {
        result = bnsens::api::suggest_parameters(net, constraint(), cpts, out_format);
      } else if (s_cpt->parsed()) {
        result = bnsens::api::suggest_cpt(net, constraint(), x_var, solve, out_format);
      } else if (s_two->parsed()) {
        result = bnsens::api::suggest_two_cpt(net, constraint(), x_var, y_var, solve, out_format);
      } else if (rel->parsed()) {
        result = bnsens::api::relevance(net, constraint(), out_format);
      } else if (soft->parsed()) {
        result = bnsens::api::soft_evidence(net, sensors, constraint(), solve, out_format);
      } else if (space->parsed()) {
        std::vector<bnsens::ParameterRef> refs;
        for (const auto& p : params) refs.push_back(bnsens::parse_parameter(p));
        result = bnsens::api::solution_space(net, constraint(), cpts, refs, samples ? samples : 256, out_format);
      }
    }

    if (format == "json") {
      std::cout << result.dump(2) << "\n";
    } else {
      print_table(result, std::cout);
    }
    return bnsens::api::infeasible(result) ? exit_code(bnsens::ErrorKind::infeasible) : 0;
  } catch (const bnsens::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
}
