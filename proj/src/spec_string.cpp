#include "ehpc/spec_string.hpp"

#include "ehpc/errors.hpp"

#include <cerrno>
#include <cstdlib>
#include <string>

namespace ehpc {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
    const std::string s = trim(text);
    if (s.empty()) throw DomainError("empty value for " + std::string(what));
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw DomainError("not a number for " + std::string(what) + ": '" + s + "'");
    }
    return v;
}

double SpecString::number(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw DomainError("missing parameter '" + key + "' in '" + name + "' spec");
    return parse_number(it->second, key);
}

double SpecString::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

const std::string& SpecString::text(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw DomainError("missing parameter '" + key + "' in '" + name + "' spec");
    return it->second;
}

SpecString parse_spec_string(std::string_view spec) {
    SpecString out;
    const auto colon = spec.find(':');
    out.name = trim(spec.substr(0, colon));
    if (out.name.empty()) throw DomainError("spec string has no name: '" + std::string(spec) + "'");
    if (colon == std::string_view::npos) return out;

    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw DomainError("expected key=value in spec string, got '" + std::string(item) + "'");
        }
        std::string key = trim(item.substr(0, eq));
        std::string value = trim(item.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw DomainError("empty key or value in spec string: '" + std::string(item) + "'");
        }
        if (!out.params.emplace(std::move(key), std::move(value)).second) {
            throw DomainError("duplicate key in spec string: '" + std::string(item) + "'");
        }
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

}  // namespace ehpc
