#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ranger/errors.hpp"

namespace ranger {

static_assert(std::endian::native == std::endian::little, "index files are little-endian; big-endian hosts unsupported");

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::byte>& out) : out_(out) {}

    template <class T>
        requires std::is_trivially_copyable_v<T>
    void put(T v) {
        const auto* p = reinterpret_cast<const std::byte*>(&v);
        out_.insert(out_.end(), p, p + sizeof(T));
    }
    void put_bytes(std::span<const std::byte> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
    void pad_to(std::size_t alignment) {
        while (out_.size() % alignment != 0) {
            out_.push_back(std::byte{0});
        }
    }
    std::size_t size() const noexcept { return out_.size(); }

private:
    std::vector<std::byte>& out_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::byte> in, std::string what) : in_(in), what_(std::move(what)) {}

    template <class T>
        requires std::is_trivially_copyable_v<T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, in_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::span<const std::byte> take(std::size_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) {
            throw FormatError(FormatFault::truncated, what_ + ": truncated");
        }
    }

    std::span<const std::byte> in_;
    std::size_t pos_ = 0;
    std::string what_;
};

} // namespace ranger
