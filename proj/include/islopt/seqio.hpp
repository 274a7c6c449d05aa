#pragma once

#include <filesystem>
#include <iosfwd>

#include "islopt/sequence_set.hpp"

namespace islopt {

// Text format, version 1:
//   L K
//   <K lines of exactly L characters, '0' for +1 and '1' for -1; line n is column n>
// Lines starting with '#' before the header are ignored.
SequenceSet read_sequence_set(std::istream& in);
void write_sequence_set(std::ostream& out, const SequenceSet& x);

SequenceSet load_sequence_set(const std::filesystem::path& path);
void save_sequence_set(const std::filesystem::path& path, const SequenceSet& x);

}  // namespace islopt
