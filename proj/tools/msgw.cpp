// msgw: metasearch weather gateway command line.
//
//   msgw serve-gateway  --provider fixture --backend template
//   msgw serve-model    --backend echo --log model.log
//   msgw query          "weather in Paris today"
//   msgw eval           --corpus fixtures/eval.jsonl --metrics rouge,judge --judge-endpoint URL
//   msgw build-corpus   --pages-dir DIR --out corpus.jsonl
//   msgw sample-coords  --n 5 --seed 42
//
// Settings resolve as: flag > MSGW_<NAME> environment variable > --config
// file (key=value, key is the long flag name) > built-in default.
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include "msgw/corpus_tools.hpp"
#include "msgw/errors.hpp"
#include "msgw/evaluation.hpp"
#include "msgw/gateway.hpp"
#include "msgw/model_server.hpp"
#include "msgw/text.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <pthread.h>
#include <unistd.h>

#ifndef MSGW_DEFAULT_DATA_DIR
#define MSGW_DEFAULT_DATA_DIR "fixtures"
#endif

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PipelineFlags {
    std::string gazetteer = std::string(MSGW_DEFAULT_DATA_DIR) + "/gazetteer.tsv";
    std::string lexicon = std::string(MSGW_DEFAULT_DATA_DIR) + "/lexicon.txt";
    std::string provider = "fixture";
    std::string fixtures_dir = std::string(MSGW_DEFAULT_DATA_DIR) + "/pages";
    std::string provider_base = std::string(msgw::kDefaultProviderBase);
    std::string backend = "template";
    int provider_timeout_ms = 10'000;
    int backend_timeout_ms = static_cast<int>(msgw::kRemoteGenerateTimeout.count());
    int max_in_flight = 4;
};

std::string env_name(const std::string& flag) {
    std::string name = "MSGW_";
    for (char c : flag)
        name.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return name;
}

template <typename T>
CLI::Option* add(CLI::App* app, const std::string& flag, T& target, const std::string& help) {
    return app->add_option("--" + flag, target, help)->envname(env_name(flag))->capture_default_str();
}

void add_pipeline_flags(CLI::App* app, PipelineFlags& f) {
    add(app, "gazetteer", f.gazetteer, "City database (name, lat, lon, population; tab-separated)");
    add(app, "lexicon", f.lexicon, "Weather vocabulary, one term per line");
    add(app, "provider", f.provider, "Forecast source")->check(CLI::IsMember({"fixture", "live"}));
    add(app, "fixtures-dir", f.fixtures_dir, "Directory of stored provider pages for --provider fixture");
    add(app, "provider-base", f.provider_base, "Provider base URL for --provider live");
    add(app, "backend", f.backend, "Generator: template, echo or remote:URL");
    add(app, "provider-timeout-ms", f.provider_timeout_ms, "Provider request timeout");
    add(app, "backend-timeout-ms", f.backend_timeout_ms, "Remote generator request timeout");
    add(app, "max-in-flight", f.max_in_flight, "Concurrent remote generator calls");
}

std::shared_ptr<const msgw::GeneratorBackend> make_backend(const std::string& spec, int timeout_ms,
                                                           int max_in_flight) {
    if (spec == "template")
        return msgw::make_template_service_backend();
    if (spec == "echo")
        return std::make_shared<msgw::EchoBackend>();
    if (spec.rfind("remote:", 0) == 0) {
        auto endpoint = spec.substr(7);
        try {
            msgw::split_url(endpoint);
        } catch (const msgw::ValueError& e) {
            throw ConfigError(std::string("--backend: ") + e.what());
        }
        auto client = std::make_shared<msgw::NetworkHttpClient>(
            msgw::HttpClientOptions{std::chrono::milliseconds(timeout_ms), "msgw-gateway/1.0"});
        return std::make_shared<msgw::RemoteBackend>(endpoint, client, max_in_flight);
    }
    throw ConfigError("--backend must be template, echo or remote:URL");
}

std::unique_ptr<msgw::Pipeline> make_pipeline(const PipelineFlags& f) {
    std::shared_ptr<msgw::Gazetteer> gazetteer;
    std::shared_ptr<msgw::Lexicon> lexicon;
    try {
        gazetteer = std::make_shared<msgw::Gazetteer>(msgw::Gazetteer::load_file(f.gazetteer));
        lexicon = std::make_shared<msgw::Lexicon>(msgw::Lexicon::load_file(f.lexicon));
    } catch (const msgw::Error& e) {
        throw ConfigError(e.what());
    }
    if (gazetteer->skipped_lines() > 0)
        std::cerr << "warning: skipped " << gazetteer->skipped_lines() << " malformed gazetteer line(s)\n";

    std::shared_ptr<const msgw::HttpClient> provider;
    if (f.provider == "fixture") {
        try {
            provider = std::make_shared<msgw::FixtureHttpClient>(f.fixtures_dir);
        } catch (const msgw::IoError& e) {
            throw ConfigError(e.what());
        }
    } else {
        provider = std::make_shared<msgw::NetworkHttpClient>(
            msgw::HttpClientOptions{std::chrono::milliseconds(f.provider_timeout_ms), "msgw/1.0"});
    }
    msgw::ProviderOptions options;
    options.base_url = f.provider_base;
    return std::make_unique<msgw::Pipeline>(gazetteer, lexicon, provider, options,
                                            make_backend(f.backend, f.backend_timeout_ms, f.max_in_flight));
}

// Blocks SIGINT/SIGTERM for every thread started afterwards so that the
// main thread can collect them with sigwait.
sigset_t block_shutdown_signals() {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    return set;
}

int serve(msgw::BackgroundServer& server, const std::string& what, const std::string& host, int port) {
    auto signals = block_shutdown_signals();
    try {
        server.start(host, port);
    } catch (const msgw::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    std::cout << what << " listening on " << server.url() << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    std::cout << "shutting down" << std::endl;
    server.stop();
    return 0;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    std::map<std::string, std::string> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto trimmed = std::string(msgw::text::trim(line));
        if (trimmed.empty() || trimmed.front() == '#')
            continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
        values[std::string(msgw::text::trim(trimmed.substr(0, eq)))] =
            std::string(msgw::text::trim(trimmed.substr(eq + 1)));
    }
    return values;
}

std::optional<std::string> config_path_from_argv(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string_view arg = argv[i];
        if (arg == "--config" && i + 1 < argc)
            return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0)
            return std::string(arg.substr(9));
    }
    if (const char* env = std::getenv("MSGW_CONFIG"))
        return env;
    return std::nullopt;
}

// Config-file values become option defaults, so flags and environment
// variables still take precedence.
void apply_config_defaults(CLI::App& app, const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
        bool used = false;
        for (auto* sub : app.get_subcommands({})) {
            if (auto* opt = sub->get_option_no_throw("--" + key)) {
                opt->default_val(value);
                used = true;
            }
        }
        if (!used)
            throw ConfigError("unknown config key '" + key + "'");
    }
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : csv + ",") {
        if (c == ',') {
            auto t = std::string(msgw::text::trim(current));
            if (!t.empty())
                parts.push_back(t);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    return parts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural-language weather gateway, model-server shim and evaluation harness"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_file;
    app.add_option("--config", config_file, "key=value settings file")->envname("MSGW_CONFIG");

    PipelineFlags gateway_flags;
    std::string gateway_host = "127.0.0.1";
    int gateway_port = 8080;
    std::vector<std::string> allowed_origins{"http://localhost:5173"};
    auto* serve_gateway = app.add_subcommand("serve-gateway", "Serve POST /html and POST /meteo-query");
    add_pipeline_flags(serve_gateway, gateway_flags);
    add(serve_gateway, "host", gateway_host, "Listen address");
    add(serve_gateway, "port", gateway_port, "Listen port (0 picks a free port)");
    serve_gateway->add_option("--allowed-origin", allowed_origins, "CORS origin allowed to call the gateway")
        ->envname("MSGW_ALLOWED_ORIGIN")
        ->delimiter(',');

    std::string model_backend = "template";
    std::string model_host = "127.0.0.1";
    int model_port = 8081;
    std::string log_path;
    bool log_full = false;
    int model_in_flight = 4;
    auto* serve_model = app.add_subcommand("serve-model", "Serve POST /meteo in front of a generator backend");
    add(serve_model, "backend", model_backend, "Generator: template or echo")
        ->check(CLI::IsMember({"template", "echo"}));
    add(serve_model, "host", model_host, "Listen address");
    add(serve_model, "port", model_port, "Listen port (0 picks a free port)");
    add(serve_model, "log", log_path, "Request log file (appended); stderr when empty");
    serve_model->add_flag("--log-full", log_full, "Also log request and reply text")->envname("MSGW_LOG_FULL");
    add(serve_model, "max-in-flight", model_in_flight, "Concurrent backend invocations");

    PipelineFlags query_flags;
    std::string question;
    auto* query = app.add_subcommand("query", "Answer one question offline, exactly as /meteo-query would");
    add_pipeline_flags(query, query_flags);
    query->add_option("question", question, "The question")->required();

    std::string corpus_path;
    std::string eval_backend = "template";
    std::string metrics_csv = "rouge";
    std::string judge_endpoint;
    std::string bleurt_endpoint;
    std::string report_path;
    int eval_timeout_ms = static_cast<int>(msgw::kRemoteGenerateTimeout.count());
    auto* eval = app.add_subcommand("eval", "Score a generator against a reference corpus");
    add(eval, "corpus", corpus_path, "JSONL corpus of {input, reference} records")->required();
    add(eval, "backend", eval_backend, "Generator: template, echo or remote:URL");
    add(eval, "metrics", metrics_csv, "Comma-separated subset of rouge,judge,bleurt");
    add(eval, "judge-endpoint", judge_endpoint, "Judge URL speaking the {\"message\"} contract");
    add(eval, "bleurt-endpoint", bleurt_endpoint, "External scorer URL for the bleurt slot");
    add(eval, "report", report_path, "Write the JSON report here");
    add(eval, "backend-timeout-ms", eval_timeout_ms, "Remote generator and judge timeout");

    std::string pages_dir;
    std::string corpus_out;
    auto* build = app.add_subcommand("build-corpus", "Turn stored provider pages into an evaluation corpus");
    add(build, "pages-dir", pages_dir, "Directory of *.html provider pages")->required();
    add(build, "out", corpus_out, "Output JSONL path")->required();

    int sample_n = 10;
    std::uint64_t sample_seed = 42;
    auto* sample = app.add_subcommand("sample-coords", "Print reproducible random coordinates and provider URLs");
    add(sample, "n", sample_n, "How many coordinates");
    add(sample, "seed", sample_seed, "Random seed");

    try {
        if (auto path = config_path_from_argv(argc, argv))
            apply_config_defaults(app, read_config_file(*path));
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (serve_gateway->parsed()) {
            auto pipeline = make_pipeline(gateway_flags);
            msgw::GatewayOptions options{allowed_origins};
            msgw::BackgroundServer server(
                [&](httplib::Server& s) { msgw::register_gateway_routes(s, *pipeline, options); });
            return serve(server, "gateway", gateway_host, gateway_port);
        }

        if (serve_model->parsed()) {
            std::ofstream log_file;
            std::ostream* sink = &std::cerr;
            if (!log_path.empty()) {
                log_file.open(log_path, std::ios::app);
                if (!log_file)
                    throw ConfigError("cannot open log file " + log_path);
                sink = &log_file;
            }
            auto backend = make_backend(model_backend, 0, model_in_flight);
            msgw::ModelServer model(backend, std::make_shared<msgw::RequestLog>(sink, log_full), model_in_flight);
            msgw::BackgroundServer server([&](httplib::Server& s) { msgw::register_model_routes(s, model); });
            return serve(server, "model server", model_host, model_port);
        }

        if (query->parsed()) {
            auto pipeline = make_pipeline(query_flags);
            try {
                // Byte-identical to the /meteo-query message; the newline is
                // only for terminals.
                std::cout << pipeline->answer(question);
                if (isatty(STDOUT_FILENO))
                    std::cout << "\n";
            } catch (const msgw::EmptyInputError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitUsage;
            } catch (const msgw::InputTooLongError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitUsage;
            }
            return 0;
        }

        if (eval->parsed()) {
            msgw::MetricSelection metrics;
            metrics.rouge = false;
            for (const auto& m : split_csv(metrics_csv)) {
                if (m == "rouge")
                    metrics.rouge = true;
                else if (m == "judge")
                    metrics.judge_endpoint = judge_endpoint;
                else if (m == "bleurt")
                    metrics.bleurt_endpoint = bleurt_endpoint;
                else
                    throw ConfigError("unknown metric '" + m + "'");
            }
            if (metrics.judge_endpoint && metrics.judge_endpoint->empty())
                throw ConfigError("--metrics judge needs --judge-endpoint");
            if (metrics.bleurt_endpoint && metrics.bleurt_endpoint->empty())
                throw ConfigError("--metrics bleurt needs --bleurt-endpoint");
            metrics.client = std::make_shared<msgw::NetworkHttpClient>(
                msgw::HttpClientOptions{std::chrono::milliseconds(eval_timeout_ms), "msgw-eval/1.0"});

            std::ifstream corpus(corpus_path);
            if (!corpus)
                throw ConfigError("cannot open corpus " + corpus_path);
            auto backend = make_backend(eval_backend, eval_timeout_ms, 4);
            auto report = msgw::run_eval(corpus, *backend, metrics);
            if (!report_path.empty()) {
                std::ofstream out(report_path, std::ios::trunc);
                if (!out)
                    throw msgw::IoError("cannot write report " + report_path);
                out << report.to_json().dump(2) << "\n";
            }
            std::cout << msgw::format_means_table(report);
            return report.failed_records > 0 ? kExitRuntime : 0;
        }

        if (build->parsed()) {
            auto result = msgw::build_corpus(pages_dir, corpus_out);
            if (result.emitted == 0)
                std::cerr << "warning: no corpus lines written\n";
            std::cout << "wrote " << result.emitted << " record(s); skipped " << result.skipped_no_bulletin
                      << " without bulletin, " << result.skipped_unparseable << " unparseable\n";
            return 0;
        }

        if (sample->parsed()) {
            for (const auto& c : msgw::sample_coordinates(sample_n, sample_seed))
                std::cout << msgw::format_coordinate(c) << "\t" << msgw::build_url(c) << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const msgw::ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
