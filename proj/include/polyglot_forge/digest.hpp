#pragma once

// Content digests (BLAKE2b) and seeded 64-bit hashing (SipHash-2-4), both
// from libsodium.

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <sodium.h>

namespace polyglot_forge {

namespace detail {
inline void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}
}  // namespace detail

struct Digest128 {
    std::array<std::uint8_t, 16> bytes{};

    std::string hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(32);
        for (auto b : bytes) {
            out.push_back(digits[b >> 4]);
            out.push_back(digits[b & 0xF]);
        }
        return out;
    }

    friend bool operator==(const Digest128&, const Digest128&) = default;
};

struct Digest128Hash {
    std::size_t operator()(const Digest128& d) const noexcept {
        std::uint64_t h;
        std::memcpy(&h, d.bytes.data(), sizeof h);
        return static_cast<std::size_t>(h);
    }
};

/// Incremental BLAKE2b with a 128-bit output.
class Blake2b128 {
public:
    Blake2b128() {
        detail::ensure_sodium();
        crypto_generichash_init(&state_, nullptr, 0, 16);
    }

    Blake2b128& update(std::string_view data) {
        crypto_generichash_update(&state_, reinterpret_cast<const unsigned char*>(data.data()), data.size());
        return *this;
    }

    /// Length-prefixed field, so ("ab","c") and ("a","bc") differ.
    Blake2b128& update_field(std::string_view data) {
        std::array<unsigned char, 8> len{};
        std::uint64_t n = data.size();
        for (auto& b : len) {
            b = static_cast<unsigned char>(n & 0xFF);
            n >>= 8;
        }
        crypto_generichash_update(&state_, len.data(), len.size());
        return update(data);
    }

    Digest128 finish() {
        Digest128 d;
        crypto_generichash_final(&state_, d.bytes.data(), d.bytes.size());
        return d;
    }

private:
    crypto_generichash_state state_{};
};

/// Keyed 64-bit hash of a digest. The key is the seed (little endian) padded
/// with a fixed tag, so equal seeds give equal streams on every platform.
inline std::uint64_t seeded_hash64(const Digest128& digest, std::uint64_t seed, std::uint64_t salt = 0) {
    detail::ensure_sodium();
    std::array<unsigned char, crypto_shorthash_KEYBYTES> key{};
    for (int i = 0; i < 8; ++i) key[i] = static_cast<unsigned char>((seed >> (8 * i)) & 0xFF);
    std::memcpy(key.data() + 8, "pgf-smpl", 8);
    std::array<unsigned char, 24> msg{};
    std::memcpy(msg.data(), digest.bytes.data(), 16);
    for (int i = 0; i < 8; ++i) msg[16 + i] = static_cast<unsigned char>((salt >> (8 * i)) & 0xFF);
    std::array<unsigned char, crypto_shorthash_BYTES> out{};
    crypto_shorthash(out.data(), msg.data(), msg.size(), key.data());
    std::uint64_t h = 0;
    for (int i = 7; i >= 0; --i) h = (h << 8) | out[i];
    return h;
}

/// BLAKE2b-256 of a file's bytes, hex encoded. Used in stage manifests.
inline std::string file_digest_hex(const std::string& path) {
    detail::ensure_sodium();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for hashing: " + path);
    crypto_generichash_state st;
    crypto_generichash_init(&st, nullptr, 0, 32);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        const auto got = in.gcount();
        if (got > 0) crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(buf.data()), static_cast<unsigned long long>(got));
    }
    std::array<unsigned char, 32> out{};
    crypto_generichash_final(&st, out.data(), out.size());
    static constexpr char digits[] = "0123456789abcdef";
    std::string hex;
    for (auto b : out) {
        hex.push_back(digits[b >> 4]);
        hex.push_back(digits[b & 0xF]);
    }
    return hex;
}

}  // namespace polyglot_forge
