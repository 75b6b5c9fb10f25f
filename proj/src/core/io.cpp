#include "salem/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "salem/error.hpp"

namespace salem {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), result.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    fail(ErrorKind::parse, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::io, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

void write_header(std::ostringstream& out, std::string_view title, const HeaderFields& extra) {
  out << "# " << title << '\n';
  for (const auto& [key, value] : extra) out << "# " << key << ',' << value << '\n';
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

struct CsvLines {
  std::vector<std::pair<std::string, std::vector<std::string_view>>> meta;  // "# key,..." lines
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> rows;  // line number, fields
};

/// Splits a CSV artifact into header metadata and data rows. The first
/// non-comment line is skipped when it starts with `column_header`.
CsvLines scan_csv(std::string_view text, std::string_view column_header) {
  CsvLines out;
  std::size_t line_no = 0;
  bool first_data = true;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '#') {
      auto fields = split(trim(line.substr(1)), ',');
      std::string key(trim(fields.front()));
      fields.erase(fields.begin());
      out.meta.emplace_back(std::move(key), std::move(fields));
    } else if (first_data && line.substr(0, column_header.size()) == column_header) {
      first_data = false;
    } else {
      first_data = false;
      out.rows.emplace_back(line_no, split(line, ','));
    }
    if (end == text.size()) break;
  }
  return out;
}

std::string at_line(std::size_t line) { return " (line " + std::to_string(line) + ")"; }

}  // namespace

std::string gap_table_csv(const GapSet& gaps, const HeaderFields& extra) {
  std::ostringstream out;
  HeaderFields fields{{"hull", format_double(gaps.hull().lo) + "," + format_double(gaps.hull().hi)},
                      {"gaps", std::to_string(gaps.size())}};
  fields.insert(fields.end(), extra.begin(), extra.end());
  write_header(out, "salemlab gap table", fields);
  out << "lo,hi,generation\n";
  for (const Gap& g : gaps.gaps()) {
    out << format_double(g.span.lo) << ',' << format_double(g.span.hi) << ',';
    if (g.generation) out << *g.generation;
    out << '\n';
  }
  return out.str();
}

GapSet parse_gap_table(std::string_view text) {
  const CsvLines csv = scan_csv(text, "lo");
  std::optional<Interval> hull;
  for (const auto& [key, fields] : csv.meta) {
    if (key != "hull") continue;
    if (fields.size() != 2) fail(ErrorKind::parse, "hull line needs two numbers");
    hull = Interval{parse_double(fields[0]), parse_double(fields[1])};
  }
  if (!hull) fail(ErrorKind::parse, "gap table has no '# hull,lo,hi' line");
  std::vector<Gap> gaps;
  for (const auto& [line, fields] : csv.rows) {
    if (fields.size() < 2 || fields.size() > 3) {
      fail(ErrorKind::parse, "expected lo,hi[,generation]" + at_line(line));
    }
    Gap g;
    try {
      g.span = {parse_double(fields[0]), parse_double(fields[1])};
      if (fields.size() == 3 && !trim(fields[2]).empty()) {
        const std::string_view gen = trim(fields[2]);
        int value = 0;
        const auto r = std::from_chars(gen.data(), gen.data() + gen.size(), value);
        if (r.ec != std::errc() || r.ptr != gen.data() + gen.size()) {
          fail(ErrorKind::parse, "bad generation '" + std::string(gen) + "'");
        }
        g.generation = value;
      }
    } catch (const Error& e) {
      fail(ErrorKind::parse, e.what() + at_line(line));
    }
    gaps.push_back(g);
  }
  return GapSet(*hull, std::move(gaps));
}

std::string measure_csv(const DiscreteMeasure& measure, const HeaderFields& extra) {
  std::ostringstream out;
  HeaderFields fields{{"resolution", format_double(measure.resolution())},
                      {"provenance", measure.provenance()},
                      {"atoms", std::to_string(measure.size())}};
  fields.insert(fields.end(), extra.begin(), extra.end());
  write_header(out, "salemlab measure", fields);
  out << "position,weight\n";
  for (const Atom& a : measure.atoms()) {
    out << format_double(a.position) << ',' << format_double(a.weight) << '\n';
  }
  return out.str();
}

DiscreteMeasure parse_measure(std::string_view text) {
  const CsvLines csv = scan_csv(text, "position");
  std::optional<double> resolution;
  std::string provenance;
  for (const auto& [key, fields] : csv.meta) {
    if (key == "resolution" && fields.size() == 1) resolution = parse_double(fields[0]);
    if (key == "provenance" && !fields.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) provenance += ',';
        provenance += fields[i];
      }
    }
  }
  if (!resolution) fail(ErrorKind::parse, "measure file has no '# resolution,<value>' line");
  std::vector<Atom> atoms;
  for (const auto& [line, fields] : csv.rows) {
    if (fields.size() != 2) fail(ErrorKind::parse, "expected position,weight" + at_line(line));
    try {
      atoms.push_back({parse_double(fields[0]), parse_double(fields[1])});
    } catch (const Error& e) {
      fail(ErrorKind::parse, e.what() + at_line(line));
    }
  }
  return DiscreteMeasure(std::move(atoms), *resolution, provenance);
}

std::string spectrum_csv(const Spectrum& spectrum, const HeaderFields& extra) {
  std::ostringstream out;
  HeaderFields fields{{"xi_max_valid", format_double(spectrum.xi_max_valid)}};
  fields.insert(fields.end(), extra.begin(), extra.end());
  write_header(out, "salemlab spectrum", fields);
  out << "xi,re,im,abs\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto v = spectrum.values[i];
    out << format_double(spectrum.xi[i]) << ',' << format_double(v.real()) << ','
        << format_double(v.imag()) << ',' << format_double(std::abs(v)) << '\n';
  }
  return out.str();
}

std::string moments_csv(const MomentScan& scan, const HeaderFields& extra) {
  std::ostringstream out;
  write_header(out, "salemlab moments", extra);
  out << "xi,q,mean,stderr,n\n";
  for (const MomentRow& row : scan.rows) {
    out << format_double(row.xi) << ',' << row.q << ',' << format_double(row.mean) << ','
        << format_double(row.std_error) << ',' << row.n << '\n';
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorKind::io, "failed writing '" + path + "'");
}

}  // namespace salem
