#include <stdexcept>
#include <string>

#ifdef TESTSUM_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "testsum/llmgw.hpp"

namespace testsum::llmgw::http_detail {

namespace {

// Splits "https://host:port/prefix" into origin and path prefix.
std::pair<std::string, std::string> split_base(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = base_url.find('/', host_start);
    if (path_start == std::string::npos) return {base_url, ""};
    return {base_url.substr(0, path_start), base_url.substr(path_start)};
}

}  // namespace

std::string post_json(const std::string& base_url, const std::string& path,
                      const std::string& bearer, const std::string& body) {
    auto [origin, prefix] = split_base(base_url);
    httplib::Client client(origin);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);

    httplib::Headers headers = {{"Authorization", "Bearer " + bearer}};
    auto res = client.Post(prefix + path, headers, body, "application/json");
    if (!res) throw ProviderError(0, httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw ProviderError(res->status, res->body);
    return res->body;
}

}  // namespace testsum::llmgw::http_detail
