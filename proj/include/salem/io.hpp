#pragma once

// Plain-text artifacts: gap tables, measures, spectra and moment scans as
// CSV; numbers in shortest round-trip form, independent of the C locale.

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "salem/fourier.hpp"
#include "salem/geometry.hpp"
#include "salem/measures.hpp"

namespace salem {

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

/// Strict locale-independent parse; throws Error(parse).
double parse_double(std::string_view text);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// `# key,value` lines written after the title line of every CSV artifact.
using HeaderFields = std::vector<std::pair<std::string, std::string>>;

std::string gap_table_csv(const GapSet& gaps, const HeaderFields& extra = {});
/// Accepts the output of gap_table_csv: `# hull,lo,hi` is required; data
/// lines are `lo,hi[,generation]`. Throws Error(parse) on malformed input
/// and Error(construction) when the gaps violate the GapSet invariants.
GapSet parse_gap_table(std::string_view text);

std::string measure_csv(const DiscreteMeasure& measure, const HeaderFields& extra = {});
DiscreteMeasure parse_measure(std::string_view text);

std::string spectrum_csv(const Spectrum& spectrum, const HeaderFields& extra = {});
std::string moments_csv(const MomentScan& scan, const HeaderFields& extra = {});

std::string read_file(const std::string& path);
/// Writes atomically enough for our purposes: truncate then write.
void write_file(const std::string& path, std::string_view contents);

}  // namespace salem
