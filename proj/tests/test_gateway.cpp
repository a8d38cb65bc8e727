#include "sheetloop/gateway.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <thread>

using namespace sheetloop;
using namespace sheetloop::llm;

namespace {

ChatRequest simple_request(const std::string& user_text) {
    ChatRequest req;
    req.session_tag = "planner";
    req.model_id = "test-model";
    req.messages = {{"system", "You plan actions."}, {"user", user_text}};
    return req;
}

}  // namespace

TEST_SUITE("gateway") {

TEST_CASE("request rendering and whitespace-normalized hashing") {
    ChatRequest a = simple_request("set   cell\nA1");
    ChatRequest b = simple_request("set cell A1");
    CHECK(render_request(a) != render_request(b));
    CHECK(request_hash(a) == request_hash(b));  // cosmetic whitespace only

    ChatRequest c = simple_request("set cell A2");
    CHECK(request_hash(a) != request_hash(c));  // semantic drift caught
}

TEST_CASE("replay returns scripted text verbatim in order") {
    std::vector<ReplayEntry> entries = {
        {"substring", "", "SET_CELL Sheet1!E1 41100\nDONE"},
        {"substring", "", "second response"},
    };
    ReplayBackend backend(entries, true);
    Transcript transcript;
    Gateway gw(std::make_shared<ReplayBackend>(entries, true), &transcript);

    ChatResponse r1 = gw.complete(simple_request("anything"));
    CHECK(r1.content == "SET_CELL Sheet1!E1 41100\nDONE");
    CHECK(r1.prompt_tokens == 0);
    ChatResponse r2 = gw.complete(simple_request("more"));
    CHECK(r2.content == "second response");
    CHECK_THROWS_AS(gw.complete(simple_request("third")), GatewayError);
}

TEST_CASE("strict replay mismatch fails with a diff") {
    std::vector<ReplayEntry> entries = {{"substring", "rows 3", "resp"}};
    Gateway gw(std::make_shared<ReplayBackend>(entries, true), nullptr);
    try {
        gw.complete(simple_request("the sheet now has rows 4"));
        FAIL("should have thrown");
    } catch (const GatewayError& e) {
        CHECK(e.kind == GatewayError::Kind::ScriptMismatch);
        CHECK(std::string(e.what()).find("rows 3") != std::string::npos);
        CHECK(std::string(e.what()).find("rows 4") != std::string::npos);
    }
}

TEST_CASE("hash matcher pins the exact request") {
    ChatRequest req = simple_request("hello");
    std::vector<ReplayEntry> entries = {{"hash", request_hash(req), "hi"}};
    Gateway gw(std::make_shared<ReplayBackend>(entries, true), nullptr);
    CHECK(gw.complete(req).content == "hi");

    Gateway gw2(std::make_shared<ReplayBackend>(entries, true), nullptr);
    CHECK_THROWS_AS(gw2.complete(simple_request("hellooo")), GatewayError);
}

TEST_CASE("non-strict replay scans forward to a match") {
    std::vector<ReplayEntry> entries = {
        {"substring", "alpha", "A"},
        {"substring", "beta", "B"},
    };
    Gateway gw(std::make_shared<ReplayBackend>(entries, false), nullptr);
    CHECK(gw.complete(simple_request("this one mentions beta")).content == "B");
    CHECK_THROWS_AS(gw.complete(simple_request("alpha now")), GatewayError);  // consumed past it
}

TEST_CASE("first message must be the system prompt") {
    Gateway gw(std::make_shared<ReplayBackend>(std::vector<ReplayEntry>{{"substring", "", "x"}},
                                               true),
               nullptr);
    ChatRequest bad;
    bad.messages = {{"user", "no system"}};
    CHECK_THROWS_AS(gw.complete(bad), GatewayError);
}

TEST_CASE("transcript records every exchange once with session tags and steps") {
    Transcript transcript;
    std::vector<ReplayEntry> entries = {{"substring", "", "one"}, {"substring", "", "two"}};
    Gateway gw(std::make_shared<ReplayBackend>(entries, true), &transcript);
    gw.use_local_embedder(retrieval::HashNgramEmbedder(16));

    transcript.set_step(1);
    gw.complete(simple_request("first"));
    gw.embed({"a", "b"});
    transcript.set_step(2);
    gw.complete(simple_request("second"));

    REQUIRE(transcript.entries().size() == 3);
    CHECK(transcript.entries()[0].kind == "chat");
    CHECK(transcript.entries()[0].session_tag == "planner");
    CHECK(transcript.entries()[0].step == 1);
    CHECK(transcript.entries()[1].kind == "embed");
    CHECK(transcript.entries()[1].session_tag == "embedder");
    CHECK(transcript.entries()[1].embed_dim == 16);
    CHECK(transcript.entries()[2].step == 2);
    // logical timestamps in replay mode
    CHECK(transcript.entries()[0].timestamp == 0);
    CHECK(transcript.entries()[1].timestamp == 1);
    CHECK(transcript.entries()[2].timestamp == 2);

    std::string json1 = transcript.to_json();
    CHECK(json1.find("\"response\": \"one\"") != std::string::npos);
}

TEST_CASE("temperature appears in the serialized outbound request") {
    ChatRequest req = simple_request("x");
    req.temperature = 0.2;
    std::string rendered = render_request(req);
    CHECK(rendered.find("temperature: 0.200") != std::string::npos);
}

TEST_CASE("embed batches keep order and dimension") {
    Gateway gw(std::make_shared<ReplayBackend>(std::vector<ReplayEntry>{}, true), nullptr);
    gw.use_local_embedder(retrieval::HashNgramEmbedder(32));
    auto vecs = gw.embed({"first", "second", "third"});
    REQUIRE(vecs.size() == 3);
    retrieval::HashNgramEmbedder ref(32);
    CHECK(vecs[0] == ref.embed_one("first"));
    CHECK(vecs[2] == ref.embed_one("third"));
}

TEST_CASE("http backend round-trip against a local server") {
    httplib::Server server;
    server.Post("/v1/chat", [](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body);
        nlohmann::json out;
        out["content"] = "echo: " + body["messages"].back()["content"].get<std::string>();
        out["finish_reason"] = "stop";
        out["usage"] = {{"prompt_tokens", 5}, {"completion_tokens", 7}};
        res.set_content(out.dump(), "application/json");
    });
    server.Post("/v1/embed", [](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body);
        nlohmann::json out;
        nlohmann::json vectors = nlohmann::json::array();
        for (size_t i = 0; i < body["input"].size(); ++i) {
            vectors.push_back({1.0, 0.0, static_cast<double>(i)});
        }
        out["vectors"] = vectors;
        res.set_content(out.dump(), "application/json");
    });

    int port = server.bind_to_any_port("127.0.0.1");
    if (port <= 0) {
        MESSAGE("skipping: cannot bind a loopback port in this environment");
        return;
    }
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpBackendConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port);
    cfg.model_id = "m";
    cfg.retries = 0;
    Transcript transcript;
    Gateway gw(std::make_shared<HttpBackend>(cfg), &transcript);

    ChatResponse res = gw.complete(simple_request("ping"));
    CHECK(res.content == "echo: ping");
    CHECK(res.prompt_tokens == 5);
    CHECK(res.completion_tokens == 7);

    auto vecs = gw.embed({"a", "b"});
    REQUIRE(vecs.size() == 2);
    CHECK(vecs[1][2] == 1.0);

    server.stop();
    runner.join();
    REQUIRE(transcript.entries().size() == 2);
    // wall-clock timestamps in http mode (non-decreasing)
    CHECK(transcript.entries()[1].timestamp >= transcript.entries()[0].timestamp);
}

TEST_CASE("unreachable endpoint surfaces GatewayError after retries") {
    HttpBackendConfig cfg;
    cfg.endpoint = "http://127.0.0.1:9";  // discard port, nothing listens
    cfg.retries = 1;
    cfg.backoff_ms = 1;
    cfg.timeout_s = 1;
    HttpBackend backend(cfg);
    CHECK_THROWS_AS(backend.complete(simple_request("x")), GatewayError);
}

}  // TEST_SUITE
