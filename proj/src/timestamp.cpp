#include "relgrow/timestamp.hpp"

#include <cstdio>

#include "relgrow/error.hpp"

namespace relgrow {
namespace {

using namespace std::chrono;

class Cursor {
 public:
  Cursor(std::string_view text, std::string_view original) : text_(text), original_(original) {}

  int digits(std::size_t n) {
    if (text_.size() < n) fail();
    int value = 0;
    for (std::size_t i = 0; i < n; ++i) {
      char c = text_[i];
      if (c < '0' || c > '9') fail();
      value = value * 10 + (c - '0');
    }
    text_.remove_prefix(n);
    return value;
  }

  void expect(char c) {
    if (text_.empty() || text_.front() != c) fail();
    text_.remove_prefix(1);
  }

  bool accept(char c) {
    if (text_.empty() || text_.front() != c) return false;
    text_.remove_prefix(1);
    return true;
  }

  char take() {
    if (text_.empty()) fail();
    char c = text_.front();
    text_.remove_prefix(1);
    return c;
  }

  bool done() const { return text_.empty(); }

  [[noreturn]] void fail() const {
    throw Error(Errc::BadTimestamp, "cannot parse timestamp '" + std::string(original_) + "'");
  }

 private:
  std::string_view text_;
  std::string_view original_;
};

Timestamp assemble(Cursor& cur, int y, int mo, int d, int h, int mi, int s, int ms, int sign,
                   int oh, int om) {
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59 || oh > 23 || om > 59) cur.fail();
  auto local_ms = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
  minutes offset{sign * (oh * 60 + om)};
  return Timestamp{local_ms - offset, offset};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Fields {
  int y, mo, d, h, mi, s, ms, oh, om;
  char sign;
};

Fields split_local(const Timestamp& ts) {
  auto local = ts.instant + ts.offset;
  auto day_point = floor<days>(local);
  year_month_day ymd{day_point};
  hh_mm_ss<milliseconds> tod{local - day_point};
  auto off = ts.offset.count();
  char sign = off < 0 ? '-' : '+';
  off = off < 0 ? -off : off;
  return {int(ymd.year()),
          int(unsigned(ymd.month())),
          int(unsigned(ymd.day())),
          int(tod.hours().count()),
          int(tod.minutes().count()),
          int(tod.seconds().count()),
          int(tod.subseconds().count()),
          int(off / 60),
          int(off % 60),
          sign};
}

}  // namespace

Timestamp Timestamp::parse_crash_format(std::string_view text) {
  std::string_view body = trim(text);
  Cursor cur(body, text);
  int y = cur.digits(4);
  cur.expect('-');
  int mo = cur.digits(2);
  cur.expect('-');
  int d = cur.digits(2);
  cur.expect(' ');
  int h = cur.digits(2);
  cur.expect(':');
  int mi = cur.digits(2);
  cur.expect(':');
  int s = cur.digits(2);
  cur.expect('.');
  int ms = cur.digits(3);
  cur.expect(' ');
  char sign = cur.take();
  if (sign != '+' && sign != '-') cur.fail();
  int oh = cur.digits(2);
  int om = cur.digits(2);
  if (!cur.done()) cur.fail();
  return assemble(cur, y, mo, d, h, mi, s, ms, sign == '-' ? -1 : 1, oh, om);
}

Timestamp Timestamp::parse_iso8601(std::string_view text) {
  std::string_view body = trim(text);
  Cursor cur(body, text);
  int y = cur.digits(4);
  cur.expect('-');
  int mo = cur.digits(2);
  cur.expect('-');
  int d = cur.digits(2);
  cur.expect('T');
  int h = cur.digits(2);
  cur.expect(':');
  int mi = cur.digits(2);
  cur.expect(':');
  int s = cur.digits(2);
  int ms = 0;
  if (cur.accept('.')) ms = cur.digits(3);
  if (cur.accept('Z')) {
    if (!cur.done()) cur.fail();
    return assemble(cur, y, mo, d, h, mi, s, ms, 1, 0, 0);
  }
  char sign = cur.take();
  if (sign != '+' && sign != '-') cur.fail();
  int oh = cur.digits(2);
  cur.expect(':');
  int om = cur.digits(2);
  if (!cur.done()) cur.fail();
  return assemble(cur, y, mo, d, h, mi, s, ms, sign == '-' ? -1 : 1, oh, om);
}

std::string Timestamp::to_crash_format() const {
  auto f = split_local(*this);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d.%03d %c%02d%02d", f.y, f.mo, f.d,
                f.h, f.mi, f.s, f.ms, f.sign, f.oh, f.om);
  return buf;
}

std::string Timestamp::to_iso8601() const {
  auto f = split_local(*this);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03d%c%02d:%02d", f.y, f.mo, f.d,
                f.h, f.mi, f.s, f.ms, f.sign, f.oh, f.om);
  return buf;
}

std::chrono::local_time<std::chrono::milliseconds> Timestamp::local() const {
  return local_time<milliseconds>{(instant + offset).time_since_epoch()};
}

}  // namespace relgrow
