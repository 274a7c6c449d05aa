#include "islopt/seqio.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "islopt/error.hpp"

namespace islopt {
namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

SequenceSet read_sequence_set(std::istream& in) {
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (!line.empty() && line.front() == '#') continue;
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError("missing 'L K' header");

  std::istringstream header(line);
  long long length = 0;
  long long count = 0;
  std::string extra;
  if (!(header >> length >> count) || (header >> extra)) throw ParseError("malformed header: '" + line + "'");
  if (length < kMinLength || length > kMaxLength || count < 1 || count > (1 << 20)) {
    throw ParseError("header values out of range: '" + line + "'");
  }

  std::vector<int8_t> entries;
  entries.reserve(static_cast<std::size_t>(length * count));
  for (long long c = 0; c < count; ++c) {
    if (!std::getline(in, line)) throw ParseError("expected " + std::to_string(count) + " sequence lines");
    strip_cr(line);
    if (static_cast<long long>(line.size()) != length) {
      throw ParseError("line " + std::to_string(c + 2) + " has " + std::to_string(line.size()) +
                       " characters, expected " + std::to_string(length));
    }
    for (char ch : line) {
      if (ch == '0') {
        entries.push_back(1);
      } else if (ch == '1') {
        entries.push_back(-1);
      } else {
        throw ParseError("line " + std::to_string(c + 2) + " contains a character other than 0/1");
      }
    }
  }
  while (std::getline(in, line)) {
    strip_cr(line);
    if (!line.empty()) throw ParseError("unexpected trailing content");
  }
  return SequenceSet(static_cast<int>(length), static_cast<int>(count), std::move(entries));
}

void write_sequence_set(std::ostream& out, const SequenceSet& x) {
  out << x.length() << ' ' << x.count() << '\n';
  std::string line(static_cast<std::size_t>(x.length()), '0');
  for (int c = 0; c < x.count(); ++c) {
    const auto col = x.column(c);
    for (int m = 0; m < x.length(); ++m) line[m] = col[m] == 1 ? '0' : '1';
    out << line << '\n';
  }
}

SequenceSet load_sequence_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_sequence_set(in);
}

void save_sequence_set(const std::filesystem::path& path, const SequenceSet& x) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  write_sequence_set(out, x);
}

}  // namespace islopt
