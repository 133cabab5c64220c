#pragma once

// Locale-independent number formatting and parsing.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "lfbloch/quantities.hpp"

namespace lfbloch {

/// Shortest representation that round-trips.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericalError("format_double failed");
  return std::string(buf, ptr);
}

/// "a+bi" / "a-bi".
inline std::string format_complex(cplx z) {
  std::string s = format_double(z.real());
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  if (std::signbit(im) || im != im) {
    s += format_double(im);
  } else {
    s += '+';
    s += format_double(im);
  }
  s += 'i';
  return s;
}

namespace detail {
inline bool parse_double_prefix(std::string_view s, double& out, std::size_t& used) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{}) return false;
  used = static_cast<std::size_t>(ptr - s.data());
  return true;
}
}  // namespace detail

// Accepts "a", "bi", "a+bi", "a-bi", "i", "-i", "a+i"; optional leading '+'.
inline cplx parse_complex(std::string_view text) {
  auto fail = [&]() -> cplx {
    throw DomainError("malformed complex literal '" + std::string(text) + "'");
  };
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return fail();

  const bool imaginary = s.back() == 'i';
  if (imaginary) s.remove_suffix(1);

  auto parse_signed = [&](std::string_view t, double& v) {
    bool neg = false;
    if (!t.empty() && (t.front() == '+' || t.front() == '-')) {
      neg = t.front() == '-';
      t.remove_prefix(1);
    }
    if (t.empty()) {
      v = neg ? -1.0 : 1.0;  // bare "i"
      return imaginary;
    }
    if (t.front() == '+' || t.front() == '-') return false;
    std::size_t used = 0;
    if (!detail::parse_double_prefix(t, v, used) || used != t.size()) return false;
    if (neg) v = -v;
    return true;
  };

  if (!imaginary) {
    double re = 0.0;
    if (!parse_signed(s, re)) return fail();
    return {re, 0.0};
  }
  // Split at the last sign that is not part of an exponent and not leading.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  double re = 0.0, im = 0.0;
  if (split == std::string_view::npos) {
    if (!parse_signed(s, im)) return fail();
    return {0.0, im};
  }
  {
    // real part
    std::string_view rs = s.substr(0, split);
    bool neg = false;
    if (!rs.empty() && (rs.front() == '+' || rs.front() == '-')) {
      neg = rs.front() == '-';
      rs.remove_prefix(1);
    }
    std::size_t used = 0;
    if (rs.empty() || !detail::parse_double_prefix(rs, re, used) || used != rs.size()) return fail();
    if (neg) re = -re;
  }
  if (!parse_signed(s.substr(split), im)) return fail();
  return {re, im};
}

/// 64-bit FNV-1a; stable across platforms, used for config fingerprints.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// `# key=value` lines preceding a CSV header.
inline std::string metadata_block(const Metadata& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  return out;
}

// RFC 4180 quoting for fields that need it.
inline std::string csv_field(std::string_view v) {
  if (v.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\n";
  return out;
}

/// A metadata block plus a rectangular table of preformatted cells.
struct Table {
  Metadata meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline std::string to_csv(const Table& t) {
  std::string out = metadata_block(t.meta);
  out += csv_row(t.columns);
  for (const auto& r : t.rows) out += csv_row(r);
  return out;
}

}  // namespace lfbloch
