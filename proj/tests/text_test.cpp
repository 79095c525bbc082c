#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "archnet/text.hpp"

using namespace archnet;

TEST_CASE("utf8 round trip") {
  std::string samples[] = {"", "plain ascii", "Müller", "Curaçao",
                           " Древний", "日本 glass", "naïve café ñ"};
  for (const auto& s : samples) {
    CHECK(encode_utf8(decode_utf8(s)) == s);
  }
}

TEST_CASE("utf8 invalid bytes decode to replacement, one per byte") {
  std::string bad = "a\xC3(b";  // truncated two-byte sequence
  auto points = decode_utf8(bad);
  REQUIRE(points.size() == 4);
  CHECK(points[0] == U'a');
  CHECK(points[1] == 0xFFFD);
  CHECK(points[2] == U'(');
  CHECK(points[3] == U'b');

  std::string lone_continuation = "\x80\x80";
  CHECK(decode_utf8(lone_continuation) == std::u32string(2, 0xFFFD));
}

TEST_CASE("latin letter classification") {
  CHECK(is_latin_letter(U'a'));
  CHECK(is_latin_letter(U'Z'));
  CHECK(is_latin_letter(U'é'));
  CHECK(is_latin_letter(U'ü'));
  CHECK(is_latin_letter(char32_t{0x0133}));  // ij ligature, Latin Extended-A
  CHECK_FALSE(is_latin_letter(U'×'));  // multiplication sign sits inside Latin-1 letters
  CHECK_FALSE(is_latin_letter(U'÷'));
  CHECK_FALSE(is_latin_letter(U'3'));
  CHECK_FALSE(is_latin_letter(U'§'));
  CHECK_FALSE(is_latin_letter(U'д'));
  CHECK_FALSE(is_latin_letter(U' '));
}

TEST_CASE("lowercasing keeps diacritics") {
  CHECK(lower_copy("VALKEMA") == "valkema");
  CHECK(lower_copy("Müller") == "müller");
  CHECK(lower_copy("ÉTÉ") == "été");
  CHECK(lower_copy("Ōsaka") == "ōsaka");   // Extended-A macron
  CHECK(lower_copy("ДОМ") == "ДОМ");       // outside the folded ranges: unchanged
}

TEST_CASE("normalize_name") {
  // Periods and commas become spaces so initials split into tokens.
  CHECK(normalize_name("S.Valkema") == "s valkema");
  CHECK(normalize_name("Dhr S. Valkema") == "dhr s valkema");
  CHECK(normalize_name("Sybren Valkema") == "sybren valkema");
  CHECK(normalize_name("Valkema, Sybren") == "valkema sybren");
  CHECK(normalize_name("  D.   Valkema  ") == "d valkema");
  CHECK(normalize_name("van der Berg") == "van der berg");
  CHECK(normalize_name("Müller") == "müller");
  CHECK(normalize_name("") == "");
  CHECK(normalize_name(" . , ") == "");
}

TEST_CASE("split_tokens") {
  CHECK(split_tokens("d valkema") == std::vector<std::string>{"d", "valkema"});
  CHECK(split_tokens("  one ") == std::vector<std::string>{"one"});
  CHECK(split_tokens("") == std::vector<std::string>{});
  CHECK(split_tokens("van der berg") ==
        std::vector<std::string>{"van", "der", "berg"});
}

TEST_CASE("length_points counts code points not bytes") {
  CHECK(length_points("") == 0);
  CHECK(length_points("abc") == 3);
  CHECK(length_points("é") == 1);
  CHECK(length_points("Müller") == 6);
}

TEST_CASE("trim strips outer whitespace including nbsp") {
  CHECK(trim("  x  ") == "x");
  CHECK(trim("\t a b \n") == "a b");
  CHECK(trim("\xC2\xA0x\xC2\xA0") == "x");  // NBSP on both sides
  CHECK(trim("   ") == "");
}
