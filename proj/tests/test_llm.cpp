#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <thread>

#include <doctest.h>
#include <httplib.h>

#include "ace/llm/http.hpp"
#include "ace/llm/scripted.hpp"
#include "ace/util.hpp"

using namespace ace;
using namespace ace::llm;

namespace {

ScriptRule rule(ScriptRule::Match m, std::string pattern, std::string reply,
                int max_uses = -1) {
  ScriptRule r;
  r.match = m;
  r.pattern = std::move(pattern);
  r.reply = std::move(reply);
  r.max_uses = max_uses;
  return r;
}

// Minimal stub chat server on an ephemeral loopback port.
struct StubServer {
  httplib::Server svr;
  int port = 0;
  std::thread th;

  void start() {
    port = svr.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    th = std::thread([this] { svr.listen_after_bind(); });
    svr.wait_until_ready();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
  ~StubServer() {
    svr.stop();
    if (th.joinable()) th.join();
  }
};

std::string chat_body(const std::string& content) {
  return json{{"choices",
               json::array({json{{"message", json{{"content", content}}}}})}}
      .dump();
}

// Sets an environment variable for the current scope, then restores it.
struct EnvGuard {
  std::string name, old;
  bool had = false;
  EnvGuard(const std::string& n, const std::string& value) : name(n) {
    if (const char* prev = std::getenv(n.c_str())) {
      had = true;
      old = prev;
    }
    setenv(n.c_str(), value.c_str(), 1);
  }
  ~EnvGuard() {
    if (had)
      setenv(name.c_str(), old.c_str(), 1);
    else
      unsetenv(name.c_str());
  }
};

}  // namespace

TEST_CASE("scripted backend: matcher kinds and first-match-wins") {
  std::string prompt = "please compute the answer to life";
  ScriptedBackend exact({rule(ScriptRule::Match::Exact, hash_hex(prompt), "42")});
  CHECK(exact.complete(prompt) == "42");
  CHECK_THROWS_AS(exact.complete(prompt + "!"), NoRuleError);

  ScriptedBackend sub({rule(ScriptRule::Match::Substring, "compute", "by substring")});
  CHECK(sub.complete(prompt) == "by substring");

  ScriptedBackend re({rule(ScriptRule::Match::Regex, "ans[a-z]+ to", "by regex")});
  CHECK(re.complete(prompt) == "by regex");
  CHECK_THROWS_AS(re.complete("answer-to"), NoRuleError);

  // earlier rules shadow later ones
  ScriptedBackend both({rule(ScriptRule::Match::Substring, "answer", "first"),
                        rule(ScriptRule::Match::Substring, "answer", "second")});
  CHECK(both.complete(prompt) == "first");
  CHECK(both.complete(prompt) == "first");
}

TEST_CASE("scripted backend: max_uses exhaustion falls through to later rules") {
  ScriptedBackend b({rule(ScriptRule::Match::Substring, "go", "one", 1),
                     rule(ScriptRule::Match::Substring, "go", "two", 2),
                     rule(ScriptRule::Match::Substring, "go", "three", -1)});
  CHECK(b.remaining(0) == 1);
  CHECK(b.complete("go") == "one");
  CHECK(b.remaining(0) == 0);
  CHECK(b.complete("go") == "two");
  CHECK(b.complete("go") == "two");
  CHECK(b.remaining(1) == 0);
  CHECK(b.complete("go") == "three");
  CHECK(b.complete("go") == "three");
  CHECK(b.remaining(2) == -1);
}

TEST_CASE("scripted backend: NoRuleError carries the prompt head") {
  ScriptedBackend b({rule(ScriptRule::Match::Substring, "never-matches", "x")});
  std::string prompt = "line one\nline two with detail";
  try {
    b.complete(prompt);
    FAIL("expected NoRuleError");
  } catch (const NoRuleError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line one") != std::string::npos);
    CHECK(msg.find('\n') == std::string::npos);  // head is single-line
  }
}

TEST_CASE("scripted rules: json round-trip and validation") {
  std::vector<ScriptRule> rules = {
      rule(ScriptRule::Match::Exact, hash_hex("p"), "a", 3),
      rule(ScriptRule::Match::Substring, "needle", "b"),
      rule(ScriptRule::Match::Regex, "^x+$", "c", 1)};
  for (const auto& r : rules) CHECK(rule_from_json(rule_to_json(r)) == r);

  json bad_match = rule_to_json(rules[0]);
  bad_match["match"] = "fuzzy";
  CHECK_THROWS_AS(rule_from_json(bad_match), std::invalid_argument);

  json bad_regex = rule_to_json(rules[2]);
  bad_regex["pattern"] = "([unclosed";
  CHECK_THROWS_AS(rule_from_json(bad_regex), std::invalid_argument);

  ScriptedBackend b({rules[1]});
  ScriptedBackend back = ScriptedBackend::from_json(b.to_json());
  CHECK(back.complete("find the needle here") == "b");
}

TEST_CASE("scripted backend: load from file") {
  std::string dir = "/tmp/ace_llm_test";
  std::filesystem::create_directories(dir);
  std::string path = dir + "/rules.json";
  json doc{{"rules", json::array({rule_to_json(
                rule(ScriptRule::Match::Substring, "hello", "world", 1))})}};
  write_file(path, doc.dump(2));
  ScriptedBackend b = ScriptedBackend::load(path);
  CHECK(b.complete("hello there") == "world");
  CHECK_THROWS_AS(b.complete("hello again"), NoRuleError);
}

TEST_CASE("backend log: monotonic indices, failures recorded") {
  ScriptedBackend b({rule(ScriptRule::Match::Substring, "ok", "fine")});
  CHECK(b.complete("ok 1") == "fine");
  CHECK(b.complete("ok 2") == "fine");
  CHECK_THROWS_AS(b.complete("miss"), NoRuleError);
  CHECK(b.complete("ok 3") == "fine");

  auto log = b.log();
  REQUIRE(log.size() == 4);
  CHECK(b.call_count() == 4);
  for (size_t i = 0; i < log.size(); ++i) CHECK(log[i].index == i);
  CHECK(log[0].ok);
  CHECK(log[0].prompt == "ok 1");
  CHECK(log[0].reply == "fine");
  CHECK_FALSE(log[2].ok);
  CHECK(log[2].reply.empty());
  CHECK_FALSE(log[2].error.empty());
  CHECK(log[3].ok);
}

TEST_CASE("backend log: concurrent calls get unique indices") {
  ScriptedBackend b({rule(ScriptRule::Match::Substring, "p", "r")});
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t)
    pool.emplace_back([&b, t] {
      for (int i = 0; i < 25; ++i) b.complete("p " + std::to_string(t * 25 + i));
    });
  for (auto& th : pool) th.join();

  auto log = b.log();
  REQUIRE(log.size() == 200);
  std::set<size_t> indices;
  for (const auto& rec : log) indices.insert(rec.index);
  CHECK(indices.size() == 200);
  CHECK(*indices.begin() == 0);
  CHECK(*indices.rbegin() == 199);
}

TEST_CASE("http backend: success, request shape and bearer auth") {
  StubServer stub;
  json seen_body;
  std::string seen_auth;
  stub.svr.Post("/v1/chat/completions",
                [&](const httplib::Request& req, httplib::Response& res) {
                  seen_body = json::parse(req.body);
                  seen_auth = req.get_header_value("Authorization");
                  res.set_content(chat_body("pong"), "application/json");
                });
  stub.start();

  EnvGuard key("ACE_API_KEY", "sk-test-123");
  HttpConfig cfg;
  cfg.endpoint = stub.endpoint();
  cfg.model = "test-model";
  cfg.backoff_ms = 1;
  HttpBackend b(cfg);
  CHECK(b.name() == "http:test-model");
  CHECK_FALSE(b.deterministic());

  CHECK(b.complete("ping") == "pong");
  CHECK(seen_auth == "Bearer sk-test-123");
  CHECK(seen_body.at("model") == "test-model");
  CHECK(seen_body.at("temperature") == 0.0);
  REQUIRE(seen_body.at("messages").size() == 1);
  CHECK(seen_body["messages"][0]["role"] == "user");
  CHECK(seen_body["messages"][0]["content"] == "ping");
}

TEST_CASE("http backend: two 500s then 200 succeeds within max_retries=3") {
  StubServer stub;
  std::atomic<int> hits{0};
  stub.svr.Post("/v1/chat/completions",
                [&](const httplib::Request&, httplib::Response& res) {
                  if (hits.fetch_add(1) < 2) {
                    res.status = 500;
                    res.set_content("boom", "text/plain");
                  } else {
                    res.set_content(chat_body("recovered"), "application/json");
                  }
                });
  stub.start();

  HttpConfig cfg;
  cfg.endpoint = stub.endpoint();
  cfg.max_retries = 3;
  cfg.backoff_ms = 1;
  HttpBackend b(cfg);
  CHECK(b.complete("x") == "recovered");
  CHECK(hits.load() == 3);
}

TEST_CASE("http backend: persistent 5xx exhausts retries") {
  StubServer stub;
  std::atomic<int> hits{0};
  stub.svr.Post("/v1/chat/completions",
                [&](const httplib::Request&, httplib::Response& res) {
                  hits.fetch_add(1);
                  res.status = 503;
                });
  stub.start();

  HttpConfig cfg;
  cfg.endpoint = stub.endpoint();
  cfg.max_retries = 2;
  cfg.backoff_ms = 1;
  HttpBackend b(cfg);
  CHECK_THROWS_AS(b.complete("x"), RetryExhausted);
  CHECK(hits.load() == 3);  // initial attempt + 2 retries
}

TEST_CASE("http backend: non-5xx errors fail fast without retry") {
  StubServer stub;
  std::atomic<int> hits{0};
  stub.svr.Post("/v1/chat/completions",
                [&](const httplib::Request&, httplib::Response& res) {
                  hits.fetch_add(1);
                  res.status = 404;
                });
  stub.start();

  HttpConfig cfg;
  cfg.endpoint = stub.endpoint();
  cfg.max_retries = 3;
  cfg.backoff_ms = 1;
  HttpBackend b(cfg);
  try {
    b.complete("x");
    FAIL("expected HttpStatus");
  } catch (const HttpStatus& e) {
    CHECK(e.code == 404);
  }
  CHECK(hits.load() == 1);

  auto log = b.log();  // the failure is still logged with its call index
  REQUIRE(log.size() == 1);
  CHECK_FALSE(log[0].ok);
}

TEST_CASE("http backend: malformed completion body is a hard error") {
  StubServer stub;
  stub.svr.Post("/v1/chat/completions",
                [&](const httplib::Request&, httplib::Response& res) {
                  res.set_content("{\"choices\": []}", "application/json");
                });
  stub.start();

  HttpConfig cfg;
  cfg.endpoint = stub.endpoint();
  cfg.backoff_ms = 1;
  HttpBackend b(cfg);
  CHECK_THROWS_AS(b.complete("x"), BackendError);
}

TEST_CASE("http backend: unreachable endpoint exhausts retries") {
  StubServer closed;  // bind then immediately stop, leaving a dead port
  closed.svr.Post("/x", [](const httplib::Request&, httplib::Response&) {});
  closed.start();
  std::string dead = closed.endpoint();
  closed.svr.stop();
  if (closed.th.joinable()) closed.th.join();

  HttpConfig cfg;
  cfg.endpoint = dead;
  cfg.max_retries = 1;
  cfg.backoff_ms = 1;
  cfg.timeout_ms = 500;
  HttpBackend b(cfg);
  CHECK_THROWS_AS(b.complete("x"), BackendError);  // RetryExhausted or Timeout
  auto log = b.log();
  REQUIRE(log.size() == 1);
  CHECK_FALSE(log[0].ok);
}

TEST_CASE("http backend: ACE_API_BASE overrides the configured endpoint") {
  EnvGuard base("ACE_API_BASE", "http://10.0.0.1:1");
  HttpConfig cfg;
  cfg.endpoint = "http://example.invalid:2";
  HttpBackend b(cfg);
  CHECK(b.config().endpoint == "http://10.0.0.1:1");
}
