#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>

#include "nativqa/sha256.hpp"

using namespace nativqa;

TEST_CASE("sha256_hex matches the published test vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256_hex is 64 lowercase hex characters") {
  std::string h = sha256_hex("anything at all");
  REQUIRE(h.size() == 64);
  for (char c : h) {
    CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  }
}

TEST_CASE("sha256_unit_interval is the first eight digest bytes over 2^64") {
  // For "abc" the digest starts ba7816bf8f01cfea.
  double expected = static_cast<double>(0xba7816bf8f01cfeaULL) /
                    std::pow(2.0, 64);
  CHECK(sha256_unit_interval("abc") == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("sha256_unit_interval stays in the half-open unit interval") {
  for (int i = 0; i < 5000; ++i) {
    double v = sha256_unit_interval("key-" + std::to_string(i));
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("sha256_unit_interval is deterministic") {
  CHECK(sha256_unit_interval("same input") == sha256_unit_interval("same input"));
  CHECK(sha256_unit_interval("one") != sha256_unit_interval("two"));
}
