#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cayley/codec.hpp"
#include "helpers.hpp"

using namespace cayley;

namespace {

std::string spell(const Word& w) { return word_to_string(beta_alphabet(), w); }

}  // namespace

TEST_CASE("signed binary encodes least significant first with no trailing zeros") {
  REQUIRE(spell(beta_encode(0)) == "+0");
  REQUIRE(spell(beta_encode(1)) == "+1");
  REQUIRE(spell(beta_encode(5)) == "+101");
  REQUIRE(spell(beta_encode(6)) == "+011");
  REQUIRE(spell(beta_encode(-3)) == "-11");
  REQUIRE(spell(beta_encode(-6)) == "-011");
  REQUIRE(spell(beta_encode(8)) == "+0001");
  for (long long z = -1000; z <= 1000; ++z) REQUIRE(beta_decode(beta_encode(z)) == z);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    Int z = Int(static_cast<long long>(rng())) * Int(static_cast<long long>(rng()));
    if (rng() % 2) z = -z;
    REQUIRE(beta_decode(beta_encode(z)) == z);
  }

  REQUIRE_THROWS(beta_decode(Word{kMinus, kD0}));         // zero is "+0" only
  REQUIRE_THROWS(beta_decode(Word{kPlus}));               // sign alone
  REQUIRE_THROWS(beta_decode(Word{kPlus, kD1, kD0}));     // trailing zero
  REQUIRE_THROWS(beta_decode(Word{kD1}));                 // no sign
  REQUIRE_THROWS(beta_decode(Word{}));
}

TEST_CASE("unary encoding is a letter repeated") {
  REQUIRE(unary_encode(0).empty());
  REQUIRE(unary_encode(3) == Word({0, 0, 0}));
  REQUIRE(unary_encode(-2) == Word({1, 1}));
  for (long long z = -40; z <= 40; ++z) REQUIRE(unary_decode(unary_encode(z)) == z);
  REQUIRE_THROWS(unary_decode(Word{0, 1}));
}

TEST_CASE("most-significant-first encoding matches the windowed examples") {
  REQUIRE(spell(msb_encode(0)) == "+0");
  REQUIRE(spell(msb_encode(1)) == "+1");
  REQUIRE(spell(msb_encode(-4)) == "-100");
  REQUIRE(spell(msb_encode(5)) == "+101");
  for (long long z = -1000; z <= 1000; ++z) REQUIRE(msb_decode(msb_encode(z)) == z);

  std::mt19937_64 rng(9);
  for (int i = 0; i < 2000; ++i) {
    Int z = Int(static_cast<long long>(rng() % (1ull << 40)));
    if (rng() % 2) z = -z;
    REQUIRE(msb_decode(msb_encode(z)) == z);
  }

  REQUIRE_THROWS(msb_decode(Word{kMinus, kD0}));          // zero is "+0" only
  REQUIRE_THROWS(msb_decode(Word{kPlus, kD0, kD1}));      // leading zero
  REQUIRE_THROWS(msb_decode(Word{kPlus}));                // no digits
}

TEST_CASE("the two binary codecs disagree exactly by digit order") {
  for (long long z = 1; z <= 300; ++z) {
    Word lsb = beta_encode(z);
    Word msb = msb_encode(z);
    Word rev(lsb.begin() + 1, lsb.end());
    std::reverse(rev.begin(), rev.end());
    Word expect{lsb[0]};
    expect.insert(expect.end(), rev.begin(), rev.end());
    REQUIRE(msb == expect);
  }
}
