#include "msgw/errors.hpp"
#include "msgw/model_server.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <sstream>
#include <thread>

using namespace msgw;
using testsupport::fixtures_dir;
using testsupport::read_file;
using json = nlohmann::json;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line))
        out.push_back(line);
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, '\t'))
        out.push_back(field);
    return out;
}

GenerationRequest paris_request(std::string query) {
    auto doc = parse_page(read_file(fixtures_dir() / "pages/fixture_paris.html"));
    return GenerationRequest::forecast(std::move(query), serialize_dataset(doc.dataset));
}

} // namespace

TEST(IsoTimestamp, Format) {
    auto t = std::chrono::system_clock::time_point(std::chrono::milliseconds(1710408413589));
    EXPECT_EQ(iso_timestamp(t), "2024-03-14T09:26:53.589Z");
}

TEST(ModelServer, TemplateReply) {
    std::ostringstream log;
    ModelServer model(make_template_service_backend(), std::make_shared<RequestLog>(&log));
    auto req = paris_request("weather in Paris");
    auto reply = model.handle_meteo(json{{"message", compose_message(req)}}.dump());
    EXPECT_EQ(reply.status, 200);
    EXPECT_EQ(json::parse(reply.body)["message"], read_file(fixtures_dir() / "golden/paris_bulletin.txt"));

    auto general = model.handle_meteo(R"({"message":"hello"})");
    EXPECT_EQ(general.status, 200);
    EXPECT_EQ(json::parse(general.body)["message"], kGeneralReply);
}

TEST(ModelServer, BadRequestsGive500AndAreLogged) {
    std::ostringstream log;
    auto request_log = std::make_shared<RequestLog>(&log);
    ModelServer model(std::make_shared<EchoBackend>(), request_log);
    for (const char* bad : {"", "{}", "[\"message\"]", R"({"message":null})", R"({"message":"\u0001\u0002"})"}) {
        auto reply = model.handle_meteo(bad);
        EXPECT_EQ(reply.status, 500) << bad;
        EXPECT_TRUE(json::parse(reply.body)["message"].is_string());
    }
    EXPECT_EQ(request_log->count(), 5u);
    auto lines = lines_of(log.str());
    ASSERT_EQ(lines.size(), 5u);
    auto f = fields_of(lines[1]);
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[1], "2");
    EXPECT_EQ(f[2], "500");
}

TEST(ModelServer, StripsControlCharacters) {
    ModelServer model(std::make_shared<EchoBackend>(), nullptr);
    auto reply = model.handle_meteo(json{{"message", "he\x01ll\x1bo\nthere\x7f"}}.dump());
    EXPECT_EQ(json::parse(reply.body)["message"], "hello\nthere");
}

TEST(RequestLog, RedactedByDefault) {
    std::ostringstream log;
    ModelServer model(std::make_shared<EchoBackend>(), std::make_shared<RequestLog>(&log));
    std::string body = json{{"message", "secret question"}}.dump();
    model.handle_meteo(body);
    auto f = fields_of(lines_of(log.str()).at(0));
    ASSERT_EQ(f.size(), 4u);
    EXPECT_TRUE(std::regex_match(f[0], std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\d\.\d{3}Z)"))) << f[0];
    EXPECT_EQ(f[1], std::to_string(body.size()));
    EXPECT_EQ(f[2], "200");
    EXPECT_TRUE(std::regex_match(f[3], std::regex(R"(\d+)")));
    EXPECT_EQ(log.str().find("secret"), std::string::npos);
}

TEST(RequestLog, FullLogging) {
    std::ostringstream log;
    ModelServer model(std::make_shared<EchoBackend>(), std::make_shared<RequestLog>(&log, true));
    model.handle_meteo(json{{"message", "a\tb\nc"}}.dump());
    auto f = fields_of(lines_of(log.str()).at(0));
    ASSERT_EQ(f.size(), 6u);
    // The log holds the message as the model saw it, tab already stripped.
    EXPECT_EQ(json::parse(f[4]), "ab\nc");
    EXPECT_EQ(json::parse(f[5]), "ab\nc");
}

TEST(ModelServer, WireRoundTripIsByteExact) {
    std::ostringstream log;
    ModelServer model(std::make_shared<EchoBackend>(), std::make_shared<RequestLog>(&log));
    BackgroundServer server([&](httplib::Server& s) { register_model_routes(s, model); });
    server.start();
    NetworkHttpClient client;
    std::mt19937_64 rng(8);
    for (int i = 0; i < 40; ++i) {
        auto d = testsupport::random_dataset(rng);
        auto req = GenerationRequest::forecast("Weather in " + d.location_name() + " «" + std::to_string(i) + "»?",
                                               serialize_dataset(d));
        auto bulletin = remote_generate(req, server.url("/meteo"), client);
        EXPECT_EQ(bulletin.text(), compose_message(req));
        EXPECT_EQ(parse_composed_message(bulletin.text()), req);
    }
    auto general = GenerationRequest::general("just \"chatting\" \\ here");
    EXPECT_EQ(remote_generate(general, server.url("/meteo"), client).text(), compose_message(general));
    EXPECT_EQ(lines_of(log.str()).size(), 41u);
}

TEST(ModelServer, OneLogLinePerRequestUnderLoad) {
    std::ostringstream log;
    auto request_log = std::make_shared<RequestLog>(&log, true);
    ModelServer model(make_template_service_backend(), request_log, 2);
    BackgroundServer server([&](httplib::Server& s) { register_model_routes(s, model); });
    server.start();
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int i = 0; i < 24; ++i) {
        threads.emplace_back([&, i] {
            httplib::Client c("127.0.0.1", server.port());
            for (int k = 0; k < 5; ++k) {
                auto body = (i + k) % 3 == 0 ? std::string("{bad") : json{{"message", "hi " + std::to_string(i)}}.dump();
                auto res = c.Post("/meteo", body, "application/json");
                if (res)
                    ++ok;
            }
        });
    }
    for (auto& t : threads)
        t.join();
    EXPECT_EQ(ok.load(), 120);
    EXPECT_EQ(request_log->count(), 120u);
    auto lines = lines_of(log.str());
    EXPECT_EQ(lines.size(), 120u);
    for (const auto& l : lines)
        EXPECT_EQ(fields_of(l).size(), 6u) << l;
    EXPECT_LE(model.limit().peak(), 2);
}
