#include "promptrouter/codec.hpp"
#include "promptrouter/text.hpp"

#include <doctest.h>

#include <bit>
#include <cstring>
#include <random>

using namespace promptrouter;

TEST_CASE("normalize_label lowercases, trims and collapses spaces") {
    CHECK(text::normalize_label("  Oil   Painting \t") == "oil painting");
    CHECK(text::normalize_label("ANIME") == "anime");
    CHECK(text::normalize_label("   ").empty());
}

TEST_CASE("words splits on punctuation and keeps inner apostrophes") {
    CHECK(text::words("I'd like, a DOG!") == std::vector<std::string>{"i'd", "like", "a", "dog"});
    CHECK(text::words("'quoted'") == std::vector<std::string>{"quoted"});
    CHECK(text::words("").empty());
    CHECK(text::words("caf\xC3\xA9 au lait").front() == "caf\xC3\xA9");
}

TEST_CASE("content_words drops stopwords") {
    CHECK(text::content_words("an image of a laughing woman") == std::vector<std::string>{"laughing", "woman"});
}

TEST_CASE("truncate_utf8 never splits a code point") {
    const std::string s = "ab\xE2\x82\xAC";  // "ab€", euro sign is 3 bytes
    CHECK(text::truncate_utf8(s, 10) == s);
    CHECK(text::truncate_utf8(s, 4) == "ab");
    CHECK(text::truncate_utf8(s, 5) == s);
    CHECK(text::truncate_utf8(s, 2) == "ab");
    CHECK(text::truncate_utf8(s, 0).empty());
}

TEST_CASE("base64 matches RFC 4648 test vectors") {
    const std::pair<const char*, const char*> vectors[] = {
        {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},         {"foo", "Zm9v"},
        {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
    };
    for (const auto& [plain, encoded] : vectors) {
        const std::string p(plain);
        const std::vector<std::uint8_t> bytes(p.begin(), p.end());
        CHECK(codec::base64_encode(bytes) == encoded);
        CHECK(codec::base64_decode(encoded) == bytes);
    }
}

TEST_CASE("base64 decode rejects malformed input") {
    CHECK_THROWS(codec::base64_decode("Zm9"));
    CHECK_THROWS(codec::base64_decode("Zm9v!!!!"));
}

TEST_CASE("float64 packing round-trips bit-exactly, including special values") {
    std::mt19937_64 rng(7);
    std::vector<double> values = {0.0, -0.0, 1.0, -1.5, 1e-308, 5e-324, 1.7976931348623157e308,
                                  std::numeric_limits<double>::infinity()};
    for (int i = 0; i < 500; ++i) values.push_back(std::bit_cast<double>(rng() & 0x7fefffffffffffffULL));
    const auto decoded = codec::decode_f64(codec::encode_f64(values));
    REQUIRE(decoded.size() == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(std::bit_cast<std::uint64_t>(decoded[i]) == std::bit_cast<std::uint64_t>(values[i]));
    }
}

TEST_CASE("float64 packing is little-endian") {
    const double one = 1.0;  // 0x3FF0000000000000
    const auto bytes = codec::base64_decode(codec::encode_f64(std::span(&one, 1)));
    REQUIRE(bytes.size() == 8);
    CHECK(bytes[7] == 0x3F);
    CHECK(bytes[6] == 0xF0);
    CHECK(bytes[0] == 0x00);
}

TEST_CASE("sha256 and fnv1a match published vectors") {
    CHECK(codec::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(codec::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(codec::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(codec::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(codec::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
