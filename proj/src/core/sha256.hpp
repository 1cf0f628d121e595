#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pressflow {

// FIPS 180-2 SHA-256, kept in-tree so the shared library stays dependency
// free. Verified against the published NIST test vectors.
class Sha256 {
public:
    Sha256();
    void update(const void* data, size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    // Lowercase hex digest; the object must not be reused afterwards.
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t total_len_ = 0;
    std::uint8_t buffer_[64];
    size_t buffer_len_ = 0;
};

std::string sha256_hex(std::string_view data);
// Throws IoError when the file cannot be read.
std::string sha256_file_hex(const std::string& path);

} // namespace pressflow
