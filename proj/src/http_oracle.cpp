// Chat-completion oracle over HTTP(S). Kept in its own unit so only this file pulls in httplib.
#include <cstdlib>
#include <iostream>

#include <httplib.h>

#include "unsolv/reverse_construction.hpp"

namespace unsolv::revcon {

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
    bool https = false;
};

Url split_url(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw InvalidArgument("endpoint must start with http:// or https://");
    const std::string scheme = endpoint.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw InvalidArgument("unsupported endpoint scheme '" + scheme + "'");
    const auto path_start = endpoint.find('/', scheme_end + 3);
    Url url;
    url.https = scheme == "https";
    url.origin = endpoint.substr(0, path_start);
    url.path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);
    if (url.origin.size() <= scheme_end + 3) throw InvalidArgument("endpoint has no host");
    return url;
}

class HttpOracle final : public TextOracle {
public:
    HttpOracle(HttpOracleConfig config, std::string key, Url url)
        : config_(std::move(config)), key_(std::move(key)), url_(std::move(url)) {}

    std::string complete(const std::string& prompt) override {
        httplib::Client client(url_.origin);
        const auto timeout = config_.retry.timeout;
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        client.set_bearer_token_auth(key_);

        const Json body{{"model", config_.model},
                        {"temperature", config_.temperature},
                        {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})}};
        const std::string payload = body.dump();
        if (config_.debug)
            std::cerr << "[oracle] POST " << url_.origin << url_.path << " Authorization: Bearer <redacted>\n" << payload << "\n";

        auto res = client.Post(url_.path, payload, "application/json");
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout)
                throw OracleTimeout(httplib::to_string(err));
            throw OracleError(httplib::to_string(err));
        }
        if (config_.debug) std::cerr << "[oracle] " << res->status << "\n" << redact(res->body) << "\n";
        if (res->status != 200) throw OracleError("HTTP " + std::to_string(res->status));
        try {
            const Json reply = Json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const Json::exception& e) {
            throw OracleError(std::string("unexpected response body: ") + e.what());
        }
    }

    RetryPolicy retry_policy() const override { return config_.retry; }

private:
    std::string redact(std::string text) const {
        for (auto pos = text.find(key_); !key_.empty() && pos != std::string::npos; pos = text.find(key_, pos))
            text.replace(pos, key_.size(), "<redacted>");
        return text;
    }

    HttpOracleConfig config_;
    std::string key_;
    Url url_;
};

}  // namespace

std::unique_ptr<TextOracle> make_http_oracle(const HttpOracleConfig& config) {
    Url url = split_url(config.endpoint);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.https) throw InvalidArgument("built without TLS support; https endpoints are unavailable");
#endif
    const char* key = std::getenv(config.api_key_env.c_str());
    if (!key || !*key) throw InvalidArgument("environment variable " + config.api_key_env + " is not set");
    return std::make_unique<HttpOracle>(config, key, std::move(url));
}

}  // namespace unsolv::revcon
