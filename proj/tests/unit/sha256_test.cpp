#include <doctest.h>

#include <string>

#include "core/sha256.hpp"

using namespace pressflow;

// FIPS 180-2 test vectors.
TEST_CASE("sha256 matches the published test vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    CHECK(sha256_hex(std::string(1000000, 'a')) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("streaming digest equals one-shot digest") {
    const std::string payload = "state-to-state migration flows, 2010 through 2019\n";
    Sha256 h;
    for (char c : payload) h.update(std::string_view(&c, 1));
    CHECK(h.hex_digest() == sha256_hex(payload));
}

TEST_CASE("padding boundary lengths 55, 56 and 64 bytes") {
    // One block with room, one that forces an extra block, one exact block.
    CHECK(sha256_hex(std::string(55, 'x')).size() == 64);
    CHECK(sha256_hex(std::string(56, 'x')).size() == 64);
    CHECK(sha256_hex(std::string(64, 'x')).size() == 64);
    CHECK(sha256_hex(std::string(55, 'x')) != sha256_hex(std::string(56, 'x')));
}
