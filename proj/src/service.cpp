#include "bnsens/service.hpp"

#include <atomic>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <vector>

#include "bnsens/document.hpp"
#include "bnsens/engine.hpp"
#include "bnsens/text.hpp"

namespace bnsens::service {

using api::json;

struct Session {
  mutable std::shared_mutex mutex;
  std::string name;
  BayesianNetwork network;
  std::vector<BayesianNetwork> history;  // network before each applied delta set
  Evidence evidence;
  std::atomic<Service::Clock::rep> last_used{0};

  void touch() { last_used = Service::Clock::now().time_since_epoch().count(); }
};

namespace {

struct HttpError {
  int status;
  json body;
};

HttpError not_found(const std::string& what) {
  return {404, json{{"error", {{"kind", "not_found"}, {"code", "not_found"}, {"message", what}}}}};
}

HttpError bad_request(const std::string& what) {
  return {400, json{{"error", {{"kind", "parse"}, {"code", "syntax"}, {"message", what}}}}};
}

int status_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::parse: return 400;
    case ErrorKind::timeout: return 504;
    case ErrorKind::infeasible:
    case ErrorKind::precondition: return 422;
  }
  return 500;
}

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/'))
    if (!part.empty()) out.push_back(part);
  return out;
}

json parse_body(const Request& r) {
  if (r.body.empty()) return json::object();
  json body = json::parse(r.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw bad_request("request body must be a JSON object");
  return body;
}

std::string string_field(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string()) throw bad_request(std::string("missing string field \"") + key + "\"");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& body, const char* key) {
  std::vector<std::string> out;
  const auto it = body.find(key);
  if (it == body.end()) return out;
  if (!it->is_array()) throw bad_request(std::string("field \"") + key + "\" must be an array of strings");
  for (const auto& v : *it) {
    if (!v.is_string()) throw bad_request(std::string("field \"") + key + "\" must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string new_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  std::ostringstream out;
  out << std::hex << rng() << rng();
  return out.str();
}

}  // namespace

Service::Service(Options options) : options_(options) {}
Service::~Service() = default;

std::size_t Service::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::size_t Service::expire_idle(Clock::time_point now) {
  std::lock_guard lock(mutex_);
  const auto cutoff = (now - options_.idle_timeout).time_since_epoch().count();
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (it->second->last_used.load() < cutoff) {
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::shared_ptr<Session> Service::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->touch();
  return it->second;
}

std::shared_ptr<Session> Service::create(BayesianNetwork net, std::string name, std::string& id) {
  auto s = std::make_shared<Session>();
  s->network = std::move(net);
  s->name = std::move(name);
  s->touch();
  std::lock_guard lock(mutex_);
  do {
    id = new_id();
  } while (sessions_.count(id));
  sessions_.emplace(id, s);
  return s;
}

bool Service::erase(const std::string& id) {
  std::lock_guard lock(mutex_);
  return sessions_.erase(id) > 0;
}

Response Service::handle(const Request& request) {
  expire_idle(Clock::now());

  api::Format format;
  if (const auto it = request.query.find("digits"); it != request.query.end()) {
    try {
      format.digits = std::stoi(it->second);
    } catch (const std::exception&) {
      return Response{400, bad_request("digits must be an integer").body.dump()};
    }
  }
  SolveOptions solve;
  solve.deadline = Clock::now() + options_.deadline;

  const auto& m = request.method;
  const auto parts = segments(request.path);

  auto reply = [](json body, int status = 200) { return Response{status, body.dump()}; };

  try {
    if (parts.size() == 1 && parts[0] == "health" && m == "GET") return reply({{"status", "ok"}});

    if (parts.size() == 1 && parts[0] == "bounds" && m == "GET") {
      const auto& q = request.query;
      auto real = [&](const char* key) -> std::optional<double> {
        const auto it = q.find(key);
        if (it == q.end()) return std::nullopt;
        try {
          std::size_t used = 0;
          const double v = std::stod(it->second, &used);
          if (used != it->second.size()) throw std::invalid_argument(key);
          return v;
        } catch (const std::exception&) {
          throw bad_request(std::string(key) + " must be a number");
        }
      };
      const auto d = real("d");
      if (!d) throw bad_request("missing query parameter d");
      const auto samples = real("samples").value_or(101.0);
      return reply(api::bounds(real("p"), *d, static_cast<std::size_t>(samples), format));
    }

    if (parts.empty() || parts[0] != "sessions") throw not_found("no resource at " + request.path);

    if (parts.size() == 1) {
      if (m != "POST") throw HttpError{405, json{{"error", {{"kind", "method"}, {"code", "method"}, {"message", "use POST"}}}}};
      const json body = parse_body(request);
      NetworkDocument doc = parse_document(string_field(body, "document"));
      std::string id;
      auto s = create(doc.network, doc.name, id);
      return reply({{"session", id}, {"name", doc.name}, {"network", api::network_summary(doc.network, format)}}, 201);
    }

    const std::string& id = parts[1];
    auto session = find(id);
    if (!session) throw not_found("unknown session '" + id + "'");
    Session& s = *session;

    struct Snapshot {
      BayesianNetwork network;
      Evidence evidence;
    };
    auto snapshot = [&] {
      std::shared_lock lock(s.mutex);
      return Snapshot{s.network, s.evidence};
    };
    auto constraint_from = [&](const json& body, const Evidence& session_evidence) {
      Evidence extra = api::evidence_from_json(body.value("evidence", json()));
      return parse_constraint(string_field(body, "constraint"), merge_evidence(session_evidence, extra));
    };
    auto state = [&](int status = 200) {
      std::shared_lock lock(s.mutex);
      return reply({{"session", id},
                    {"name", s.name},
                    {"evidence", api::evidence_json(s.evidence)},
                    {"history", s.history.size()}},
                   status);
    };

    const std::string sub = parts.size() > 2 ? parts[2] : "";
    const std::string leaf = parts.size() > 3 ? parts[3] : "";
    if (parts.size() > 4 || (parts.size() == 4 && sub != "suggest")) throw not_found("no resource at " + request.path);

    if (sub.empty()) {
      if (m == "GET") return state();
      if (m == "DELETE") {
        erase(id);
        return reply({{"deleted", id}});
      }
    } else if (sub == "network") {
      if (m == "GET") {
        return reply(api::network_summary(snapshot().network, format));
      }
    } else if (sub == "document") {
      if (m == "GET") {
        std::shared_lock lock(s.mutex);
        return Response{200, serialize_network(s.network, s.name), "text/plain"};
      }
    } else if (sub == "evidence") {
      if (m == "GET") return state();
      if (m == "PUT") {
        const json body = parse_body(request);
        Evidence e = api::evidence_from_json(body.value("evidence", json()));
        std::unique_lock lock(s.mutex);
        s.network.observe(e);
        s.evidence = std::move(e);
        lock.unlock();
        return state();
      }
      if (m == "DELETE") {
        std::unique_lock lock(s.mutex);
        s.evidence.clear();
        lock.unlock();
        return state();
      }
    } else if (sub == "posterior") {
      if (m == "POST") {
        const json body = parse_body(request);
        const auto snap = snapshot();
        const Evidence target = api::evidence_from_json(body.value("target", json()));
        const Evidence extra = api::evidence_from_json(body.value("evidence", json()));
        return reply(api::query(snap.network, target, merge_evidence(snap.evidence, extra), format));
      }
    } else if (sub == "suggest") {
      if (m == "POST") {
        const json body = parse_body(request);
        const auto snap = snapshot();
        const QueryConstraint c = constraint_from(body, snap.evidence);
        if (body.contains("tolerance")) {
          if (!body["tolerance"].is_number()) throw bad_request("tolerance must be a number");
          solve.tolerance = body["tolerance"].get<double>();
        }
        if (leaf == "param") return reply(api::suggest_parameters(snap.network, c, string_list(body, "cpts"), format));
        if (leaf == "cpt") return reply(api::suggest_cpt(snap.network, c, string_field(body, "variable"), solve, format));
        if (leaf == "two-cpt")
          return reply(api::suggest_two_cpt(snap.network, c, string_field(body, "x"), string_field(body, "y"), solve, format));
        if (leaf == "relevance") return reply(api::relevance(snap.network, c, format));
        if (leaf == "softev") return reply(api::soft_evidence(snap.network, string_list(body, "sensors"), c, solve, format));
        throw not_found("unknown suggestion kind '" + leaf + "'");
      }
    } else if (sub == "solution-space") {
      if (m == "POST") {
        const json body = parse_body(request);
        const auto snap = snapshot();
        const QueryConstraint c = constraint_from(body, snap.evidence);
        std::vector<ParameterRef> params;
        for (const auto& p : string_list(body, "parameters")) params.push_back(parse_parameter(p));
        const auto samples = body.value("samples", 256);
        if (samples < 2) throw bad_request("samples must be at least 2");
        return reply(api::solution_space(snap.network, c, string_list(body, "cpts"), params,
                                         static_cast<std::size_t>(samples), format));
      }
    } else if (sub == "apply") {
      if (m == "POST") {
        const json body = parse_body(request);
        const auto deltas = api::deltas_from_json(body.value("deltas", json()));
        std::unique_lock lock(s.mutex);
        BayesianNetwork next = apply_deltas(s.network, deltas);
        s.history.push_back(std::move(s.network));
        s.network = std::move(next);
        lock.unlock();
        return state();
      }
    } else if (sub == "undo") {
      if (m == "POST") {
        std::unique_lock lock(s.mutex);
        if (s.history.empty()) throw precondition_error(Errc::nothing_to_undo, "no applied change to undo");
        s.network = std::move(s.history.back());
        s.history.pop_back();
        lock.unlock();
        return state();
      }
    } else if (sub == "locks") {
      if (m == "PUT") {
        const json body = parse_body(request);
        const ParameterRef ref = parse_parameter(string_field(body, "parameter"));
        const bool locked = body.value("locked", true);
        std::unique_lock lock(s.mutex);
        const Cell cell = s.network.resolve(ref);
        // Locks are not part of the undo history: keep every snapshot in step.
        s.network.set_lock(cell, locked);
        for (auto& past : s.history) past.set_lock(cell, locked);
        lock.unlock();
        return reply(api::network_summary(snapshot().network, format));
      }
    } else {
      throw not_found("no resource at " + request.path);
    }
    throw HttpError{405, json{{"error", {{"kind", "method"}, {"code", "method"}, {"message", m + " not allowed on " + request.path}}}}};
  } catch (const HttpError& e) {
    return Response{e.status, e.body.dump()};
  } catch (const Error& e) {
    return Response{status_for(e), api::error_json(e).dump()};
  } catch (const json::exception& e) {
    return Response{400, bad_request(e.what()).body.dump()};
  }
}

}  // namespace bnsens::service
