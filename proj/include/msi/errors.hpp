#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace msi {

// Error categories map 1:1 onto CLI exit codes (see tools/msi.cpp).
enum class ErrorCategory { Usage, Config, Backend, Data };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string code, const std::string& message)
        : std::runtime_error(message), category_(category), code_(std::move(code)) {}

    ErrorCategory category() const noexcept { return category_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorCategory category_;
    std::string code_;
};

namespace errors {

inline Error usage(const std::string& msg) { return Error(ErrorCategory::Usage, "usage", msg); }
inline Error config(const std::string& msg) { return Error(ErrorCategory::Config, "config", msg); }

inline Error data(const std::string& code, const std::string& msg) {
    return Error(ErrorCategory::Data, code, msg);
}
inline Error backend(const std::string& code, const std::string& msg) {
    return Error(ErrorCategory::Backend, code, msg);
}

inline Error invariant(const std::string& msg) { return data("invariant", msg); }
inline Error frozen_database() {
    return data("frozen_database", "insight database is frozen; mutations are rejected");
}
inline Error unknown_insight_id(unsigned long long id) {
    return data("unknown_insight_id", "no insight with id " + std::to_string(id));
}
inline Error empty_record_set() { return data("empty_record_set", "metric over an empty record set"); }
inline Error empty_failure_set() {
    return data("empty_failure_set", "pair selection requires at least one failed experience");
}
inline Error dimension_mismatch(std::size_t a, std::size_t b) {
    return data("dimension_mismatch",
                "vector dimensions differ: " + std::to_string(a) + " vs " + std::to_string(b));
}
inline Error zero_vector() { return data("zero_vector", "cosine of an all-zero vector is undefined"); }
inline Error snapshot_parse(const std::string& detail) { return data("snapshot_parse", detail); }

inline Error timeout(const std::string& msg) { return backend("timeout", msg); }
inline Error rate_limited(const std::string& msg) { return backend("rate_limited", msg); }
inline Error malformed_response(const std::string& msg) { return backend("malformed_response", msg); }
inline Error cache_miss(const std::string& digest) {
    return backend("cache_miss", "replay-only cache has no entry for request digest " + digest);
}
inline Error no_script(const std::string& digest) {
    return backend("no_script", "scripted backend has no rule matching prompt digest " + digest);
}

} // namespace errors
} // namespace msi
