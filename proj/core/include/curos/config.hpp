#pragma once

// Flat key = value configuration. Lines starting with '#' are comments;
// later assignments override earlier ones.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace curos {

class KeyValues {
public:
    static KeyValues parse(const std::string& text, const std::string& origin = "<string>");
    static KeyValues load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Throws ArgumentError naming the first key not in `known`.
    void require_known(const std::set<std::string>& known) const;

    // Overlay: entries of `other` replace ours.
    void merge(const KeyValues& other);

    const std::map<std::string, std::string>& entries() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace curos
