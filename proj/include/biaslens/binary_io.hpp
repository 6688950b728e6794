#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "biaslens/error.hpp"

namespace biaslens::binary {

/// Little-endian writer into an in-memory buffer.
class Writer {
public:
    template <class T>
    void put(T value) {
        static_assert(std::is_arithmetic_v<T>);
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) {
            for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        }
        buf_.append(reinterpret_cast<const char*>(bytes), sizeof(T));
    }
    void put_raw(std::string_view bytes) { buf_.append(bytes); }
    void put_string(std::string_view s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    const std::string& data() const { return buf_; }

private:
    std::string buf_;
};

/// Bounds-checked little-endian reader; throws FormatError on truncation.
class Reader {
public:
    explicit Reader(std::string_view data, std::string what = "file") : data_(data), what_(std::move(what)) {}

    template <class T>
    T get() {
        static_assert(std::is_arithmetic_v<T>);
        need(sizeof(T));
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, data_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) {
            for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        }
        pos_ += sizeof(T);
        T value;
        std::memcpy(&value, bytes, sizeof(T));
        return value;
    }
    std::string_view get_raw(std::size_t n) {
        need(n);
        auto out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    std::string get_string() {
        auto n = get<std::uint32_t>();
        return std::string(get_raw(n));
    }
    std::size_t remaining() const { return data_.size() - pos_; }
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw FormatError(what_ + ": truncated at byte " + std::to_string(pos_));
    }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
    std::string what_;
};

}  // namespace biaslens::binary
