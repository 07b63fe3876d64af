#include "molcert/pdb.hpp"

#include "molcert/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>

namespace molcert {
namespace {

constexpr double kEightPiSq = 8.0 * 3.14159265358979323846 * 3.14159265358979323846;

std::string_view column(std::string_view line, std::size_t first, std::size_t last) {
  // 1-based inclusive columns; missing columns read as blanks.
  if (line.size() < first) return {};
  return line.substr(first - 1, std::min(last, line.size()) - first + 1);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view field, const char* what, std::size_t line_no, std::optional<double> blank = {}) {
  const auto t = trim(field);
  if (t.empty()) {
    if (blank) return *blank;
    throw ParseError(std::string("missing ") + what, line_no);
  }
  double v = 0.0;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError(std::string("non-numeric ") + what + " '" + std::string(t) + "'", line_no);
  }
  return v;
}

long parse_integer(std::string_view field, const char* what, std::size_t line_no, std::optional<long> blank = {}) {
  const auto t = trim(field);
  if (t.empty()) {
    if (blank) return *blank;
    throw ParseError(std::string("missing ") + what, line_no);
  }
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(std::string("non-numeric ") + what + " '" + std::string(t) + "'", line_no);
  }
  return v;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::string guess_element(std::string_view raw_name, bool hetero) {
  static const std::set<std::string> two_letter = {"FE", "ZN", "CL", "BR", "MG", "NA", "CA", "MN", "CU", "SE", "CO", "NI"};
  if (raw_name.size() >= 2 && hetero && std::isalpha(static_cast<unsigned char>(raw_name[0])) &&
      std::isalpha(static_cast<unsigned char>(raw_name[1]))) {
    const std::string cand = upper(raw_name.substr(0, 2));
    if (two_letter.count(cand)) return cand;
  }
  for (char c : raw_name) {
    if (std::isalpha(static_cast<unsigned char>(c))) return std::string(1, static_cast<char>(std::toupper(c)));
  }
  return {};
}

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  std::optional<std::string_view> next() {
    if (pos >= text.size()) return std::nullopt;
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    return line;
  }
};

class ModelBuilder {
 public:
  void atom(std::string_view line, std::size_t line_no, bool hetero) {
    if (line.size() < 54) throw ParseError("record shorter than the coordinate columns", line_no);
    const char alt = line[16];
    const long serial = parse_integer(column(line, 7, 11), "atom serial", line_no);
    last_serial_ = serial;
    last_alt_ = alt;
    if (alt != ' ' && alt != 'A') {
      last_skipped_ = true;
      return;
    }
    last_skipped_ = false;
    Atom a;
    a.serial = static_cast<int>(serial);
    const auto raw_name = column(line, 13, 16);
    a.name = std::string(trim(raw_name));
    a.residue_name = std::string(trim(column(line, 18, 20)));
    a.chain_id = line.size() >= 22 ? line[21] : ' ';
    a.residue_seq = static_cast<int>(parse_integer(column(line, 23, 26), "residue number", line_no, 0));
    a.insertion_code = line.size() >= 27 ? line[26] : ' ';
    a.hetero = hetero;
    a.position = Vec3(parse_real(column(line, 31, 38), "x coordinate", line_no),
                      parse_real(column(line, 39, 46), "y coordinate", line_no),
                      parse_real(column(line, 47, 54), "z coordinate", line_no));
    a.occupancy = parse_real(column(line, 55, 60), "occupancy", line_no, 1.0);
    a.b_iso = parse_real(column(line, 61, 66), "B-factor", line_no, 0.0);
    if (a.b_iso < 0.0) throw ParseError("negative B-factor", line_no);
    a.element = upper(trim(column(line, 77, 78)));
    if (a.element.empty()) a.element = guess_element(trim(raw_name), hetero);
    s_.atoms.push_back(std::move(a));
  }

  void anisou(std::string_view line, std::size_t line_no) {
    if (line.size() < 49) throw ParseError("ANISOU record too short", line_no);
    const long serial = parse_integer(column(line, 7, 11), "ANISOU serial", line_no);
    const char alt = line[16];
    if (!last_serial_ || *last_serial_ != serial || alt != last_alt_) {
      throw ParseError("ANISOU without preceding matching ATOM record (serial " + std::to_string(serial) + ")",
                       line_no);
    }
    if (last_skipped_) return;
    Vec3 u(parse_real(column(line, 29, 35), "U11", line_no), parse_real(column(line, 36, 42), "U22", line_no),
           parse_real(column(line, 43, 49), "U33", line_no));
    if ((u.array() < 0.0).any()) throw ParseError("negative ANISOU diagonal", line_no);
    s_.atoms.back().b_aniso = u * (kEightPiSq * 1e-4);
  }

  void other() { last_serial_.reset(); }

  Structure take() {
    Structure out = std::move(s_);
    s_ = Structure{};
    last_serial_.reset();
    return out;
  }
  bool empty() const { return s_.atoms.empty(); }

 private:
  Structure s_;
  std::optional<long> last_serial_;
  char last_alt_ = ' ';
  bool last_skipped_ = false;
};

std::vector<Structure> parse_impl(std::string_view text, bool first_model_only) {
  std::vector<Structure> models;
  ModelBuilder builder;
  LineReader reader{text};
  bool in_model = false;
  while (auto line = reader.next()) {
    const auto rec = column(*line, 1, 6);
    if (rec == "ATOM  " || rec == "ATOM" || rec == "HETATM") {
      builder.atom(*line, reader.line_no, rec == "HETATM");
    } else if (rec == "ANISOU") {
      builder.anisou(*line, reader.line_no);
    } else if (rec.substr(0, std::min<std::size_t>(rec.size(), 5)) == "MODEL") {
      if (in_model || !builder.empty()) models.push_back(builder.take());
      in_model = true;
    } else if (rec == "ENDMDL") {
      models.push_back(builder.take());
      in_model = false;
      if (first_model_only) return models;
    } else if (rec == "END" || rec == "END   ") {
      break;
    } else {
      builder.other();
    }
  }
  if (!builder.empty() || models.empty()) models.push_back(builder.take());
  return models;
}

std::string fixed(double v, int width, int precision, const char* what, int serial) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%*.*f", width, precision, v);
  if (static_cast<int>(std::char_traits<char>::length(buf)) > width || std::abs(v) >= 10000.0) {
    throw DomainError(std::string(what) + " of atom " + std::to_string(serial) + " does not fit the PDB format");
  }
  return buf;
}

std::string name_field(const Atom& a) {
  if (a.name.size() >= 4 || a.element.size() == 2) return a.name;
  return " " + a.name;
}

std::string atom_prefix(const char* record, const Atom& a) {
  if (a.serial < -9999 || a.serial > 99999) throw DomainError("atom serial " + std::to_string(a.serial) + " exceeds 5 columns");
  if (a.name.size() > 4) throw DomainError("atom name '" + a.name + "' exceeds 4 columns");
  if (a.residue_name.size() > 3) throw DomainError("residue name '" + a.residue_name + "' exceeds 3 columns");
  if (a.residue_seq < -999 || a.residue_seq > 9999) throw DomainError("residue number exceeds 4 columns");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-6s%5d %-4s %3s %c%4d%c", record, a.serial, name_field(a).c_str(),
                a.residue_name.c_str(), a.chain_id, a.residue_seq, a.insertion_code);
  return buf;
}

void write_atom(std::string& out, const Atom& a, const Vec3& pos) {
  out += atom_prefix(a.hetero ? "HETATM" : "ATOM", a);
  out += "   ";
  for (int k = 0; k < 3; ++k) out += fixed(pos[k], 8, 3, "coordinate", a.serial);
  out += fixed(a.occupancy, 6, 2, "occupancy", a.serial);
  out += fixed(a.b_iso, 6, 2, "B-factor", a.serial);
  char tail[32];
  std::snprintf(tail, sizeof tail, "          %2s\n", a.element.c_str());
  out += tail;
  if (a.b_aniso) {
    out += atom_prefix("ANISOU", a);
    char buf[96];
    const Vec3 u = *a.b_aniso / (kEightPiSq * 1e-4);
    for (int k = 0; k < 3; ++k) {
      if (std::round(u[k]) > 9999999.0) throw DomainError("anisotropic B-factor of atom " + std::to_string(a.serial) + " does not fit the PDB format");
    }
    std::snprintf(buf, sizeof buf, " %7ld%7ld%7ld%7d%7d%7d      %2s\n", std::lround(u[0]), std::lround(u[1]),
                  std::lround(u[2]), 0, 0, 0, a.element.c_str());
    out += buf;
  }
}

}  // namespace

Structure parse_pdb(std::string_view text) {
  auto models = parse_impl(text, true);
  return std::move(models.front());
}

std::vector<Structure> parse_pdb_models(std::string_view text) { return parse_impl(text, false); }

std::string write_pdb(const Structure& s) {
  std::string out;
  for (const auto& a : s.atoms) write_atom(out, a, a.position);
  out += "END\n";
  return out;
}

std::string write_pdb_models(const Structure& s, std::span<const Positions> models,
                             std::span<const std::size_t> model_numbers) {
  std::string out;
  for (std::size_t m = 0; m < models.size(); ++m) {
    if (models[m].size() != s.size()) throw DomainError("model atom count differs from the structure");
    char buf[32];
    const std::size_t number = model_numbers.empty() ? m + 1 : model_numbers[m];
    std::snprintf(buf, sizeof buf, "MODEL     %4zu\n", number);
    out += buf;
    for (std::size_t i = 0; i < s.size(); ++i) write_atom(out, s.atoms[i], models[m][i]);
    out += "ENDMDL\n";
  }
  out += "END\n";
  return out;
}

}  // namespace molcert
