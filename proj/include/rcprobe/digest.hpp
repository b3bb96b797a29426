#ifndef RCPROBE_DIGEST_HPP
#define RCPROBE_DIGEST_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace rcprobe::digest {

// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
public:
    Sha256();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    // Finishes and returns the lowercase hex digest. The object must not be
    // updated afterwards.
    std::string hex();

private:
    void process_block(const unsigned char* block);

    std::uint32_t state_[8];
    unsigned char buffer_[64];
    std::size_t buffered_ = 0;
    std::uint64_t total_ = 0;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path); // throws ValidationError if unreadable

} // namespace rcprobe::digest

#endif
