#pragma once

#include <istream>
#include <string>

#include "cointsearch/series.hpp"

namespace cointsearch {

/// Reads a CSV file whose first column is `year` (strictly consecutive integers) and whose
/// other columns are numeric series. The first series becomes the target.
/// A missing file raises DataError; malformed content raises ParseError with its location.
AlignedDataset load_dataset(const std::string& path);

/// Same as load_dataset for an already open stream; `source` names it in error messages.
AlignedDataset parse_dataset(std::istream& in, const std::string& source);

}  // namespace cointsearch
