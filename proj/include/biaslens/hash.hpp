#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace biaslens {

/// 64-bit FNV-1a, used for cache keys and model fingerprints.
class Fnv1a {
public:
    void update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
    }
    void update(const void* data, std::size_t size) {
        update(std::string_view(static_cast<const char*>(data), size));
    }
    template <class T>
    void update_value(const T& value) {
        update(&value, sizeof(T));
    }
    std::uint64_t digest() const { return state_; }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace biaslens
