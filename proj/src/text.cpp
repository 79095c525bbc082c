#include "archnet/text.hpp"

namespace archnet {

char32_t decode_point(std::string_view text, std::size_t& i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(text[k]);
  };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t point = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    point = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    point = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    point = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > text.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    point = (point << 6) | (bk & 0x3F);
  }
  // Reject overlong encodings and surrogates.
  if ((len == 2 && point < 0x80) || (len == 3 && point < 0x800) ||
      (len == 4 && point < 0x10000) || point > 0x10FFFF ||
      (point >= 0xD800 && point <= 0xDFFF)) {
    ++i;
    return 0xFFFD;
  }
  i += len;
  return point;
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) out.push_back(decode_point(text, i));
  return out;
}

std::string encode_utf8(char32_t point) {
  std::string out;
  if (point < 0x80) {
    out.push_back(static_cast<char>(point));
  } else if (point < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (point >> 6)));
    out.push_back(static_cast<char>(0x80 | (point & 0x3F)));
  } else if (point < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (point >> 12)));
    out.push_back(static_cast<char>(0x80 | ((point >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (point & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (point >> 18)));
    out.push_back(static_cast<char>(0x80 | ((point >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((point >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (point & 0x3F)));
  }
  return out;
}

std::string encode_utf8(std::u32string_view points) {
  std::string out;
  out.reserve(points.size());
  for (char32_t p : points) out += encode_utf8(p);
  return out;
}

bool is_latin_letter(char32_t p) {
  if ((p >= 'A' && p <= 'Z') || (p >= 'a' && p <= 'z')) return true;
  if (p >= 0xC0 && p <= 0xFF) return p != 0xD7 && p != 0xF7;
  if (p >= 0x100 && p <= 0x24F) return true;  // Latin Extended-A/B
  return false;
}

bool is_space(char32_t p) {
  switch (p) {
    case ' ':
    case '\t':
    case '\n':
    case '\r':
    case '\f':
    case '\v':
    case 0x00A0:
      return true;
    default:
      return false;
  }
}

char32_t to_lower(char32_t p) {
  if (p >= 'A' && p <= 'Z') return p + 0x20;
  if (p >= 0xC0 && p <= 0xDE && p != 0xD7) return p + 0x20;
  // Latin Extended-A mostly alternates upper/lower pairs.
  if ((p >= 0x100 && p <= 0x137) || (p >= 0x14A && p <= 0x177)) {
    return (p % 2 == 0) ? p + 1 : p;
  }
  if (p >= 0x139 && p <= 0x147) {
    return (p % 2 == 1) ? p + 1 : p;
  }
  if (p == 0x178) return 0xFF;  // Ÿ
  if (p == 0x179 || p == 0x17B || p == 0x17D) return p + 1;
  if (p == 0x17F) return 's';  // long s
  return p;
}

std::string lower_copy(std::string_view text) {
  std::u32string points = decode_utf8(text);
  for (char32_t& p : points) p = to_lower(p);
  return encode_utf8(points);
}

std::string normalize_name(std::string_view surface) {
  std::u32string points = decode_utf8(surface);
  std::u32string out;
  out.reserve(points.size());
  bool pending_space = false;
  for (char32_t p : points) {
    p = to_lower(p);
    if (p == '.' || p == ',' || is_space(p)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(p);
  }
  return encode_utf8(out);
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string points = decode_utf8(text);
  std::u32string cur;
  for (char32_t p : points) {
    if (is_space(p)) {
      if (!cur.empty()) {
        tokens.push_back(encode_utf8(cur));
        cur.clear();
      }
    } else {
      cur.push_back(p);
    }
  }
  if (!cur.empty()) tokens.push_back(encode_utf8(cur));
  return tokens;
}

std::size_t length_points(std::string_view text) {
  return decode_utf8(text).size();
}

std::string trim(std::string_view text) {
  std::u32string points = decode_utf8(text);
  std::size_t b = 0;
  std::size_t e = points.size();
  while (b < e && is_space(points[b])) ++b;
  while (e > b && is_space(points[e - 1])) --e;
  return encode_utf8(std::u32string_view(points).substr(b, e - b));
}

}  // namespace archnet
