#pragma once

#include <map>
#include <string>
#include <string_view>

namespace ehpc {

/// A parsed `name:key=value[,key=value]*` specification string.
struct SpecString {
    std::string name;
    std::map<std::string, std::string> params;

    bool has(const std::string& key) const { return params.count(key) != 0; }
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    const std::string& text(const std::string& key) const;
};

/// Throws DomainError on malformed input (missing name, duplicate key, empty value).
SpecString parse_spec_string(std::string_view spec);

/// strtod on the whole string; accepts "inf". Throws DomainError otherwise.
double parse_number(std::string_view text, std::string_view what);

}  // namespace ehpc
