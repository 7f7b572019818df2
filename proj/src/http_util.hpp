#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace agentbench::detail {

struct HttpTarget {
    std::string origin;  // "http://host:port"
    std::string path;    // "/..." (never empty)
};

// Only plain http is supported; the vendored client is built without TLS.
inline std::optional<HttpTarget> split_http_url(std::string_view url) {
    constexpr std::string_view scheme = "http://";
    if (!url.starts_with(scheme)) return std::nullopt;
    auto rest = url.substr(scheme.size());
    auto slash = rest.find('/');
    auto authority = rest.substr(0, slash);
    if (authority.empty()) return std::nullopt;
    HttpTarget target;
    target.origin = std::string(scheme) + std::string(authority);
    target.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    return target;
}

inline std::string excerpt(std::string_view text, std::size_t max_bytes) {
    if (text.size() <= max_bytes) return std::string(text);
    std::size_t cut = max_bytes;
    // Back off to a UTF-8 code point boundary.
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    return std::string(text.substr(0, cut)) + "...";
}

}  // namespace agentbench::detail
