#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sentimix/build_info.hpp"
#include "sentimix/error.hpp"
#include "sentimix/formats.hpp"

namespace sentimix {
namespace {

std::optional<Sentiment> parse_label_field(std::string_view field, size_t line_no) {
  if (field == "-") return std::nullopt;
  try {
    return parse_sentiment(field);
  } catch (const ValueError& e) {
    throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

std::string label_field(const std::optional<Sentiment>& label) {
  return label ? std::string(to_string(*label)) : "-";
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "': " + std::strerror(errno));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("read failed on '" + path + "'");
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot create '" + path + "': " + std::strerror(errno));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error("write failed on '" + path + "'");
}

Corpus load_corpus(const std::string& path, Split split) {
  return parse_corpus(sanitize_raw(read_file(path)), split);
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  write_file(path, serialize_corpus(corpus));
}

std::string serialize_cleaned(const std::vector<CleanedDoc>& docs) {
  std::ostringstream out;
  for (const CleanedDoc& d : docs) {
    out << d.uid << '\t' << label_field(d.label) << '\t';
    for (size_t i = 0; i < d.tokens.size(); ++i) {
      if (i) out << ' ';
      out << d.tokens[i];
    }
    out << '\n';
  }
  return out.str();
}

std::vector<CleanedDoc> parse_cleaned(const std::string& text) {
  std::vector<CleanedDoc> docs;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw FormatError("line " + std::to_string(line_no) +
                        ": expected uid<TAB>label<TAB>tokens");
    CleanedDoc d;
    d.uid = line.substr(0, t1);
    d.label = parse_label_field(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), line_no);
    std::istringstream toks(line.substr(t2 + 1));
    std::string tok;
    while (toks >> tok) d.tokens.push_back(tok);
    docs.push_back(std::move(d));
  }
  return docs;
}

std::string serialize_matrix(const LabeledMatrix& m) {
  if (m.X.rows.size() != m.uids.size() || m.uids.size() != m.labels.size())
    throw ValueError("matrix rows, uids and labels differ in length");
  std::ostringstream out;
  out << "#cols " << m.X.n_cols << '\n';
  char buf[64];
  for (size_t r = 0; r < m.X.rows.size(); ++r) {
    out << m.uids[r] << '\t' << label_field(m.labels[r]) << '\t';
    const auto& entries = m.X.rows[r].entries;
    for (size_t i = 0; i < entries.size(); ++i) {
      if (i) out << ' ';
      std::snprintf(buf, sizeof(buf), "%d:%.17g", entries[i].col, entries[i].value);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

LabeledMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#cols ", 0) != 0)
    throw FormatError("matrix file must start with '#cols <N>'");
  LabeledMatrix m;
  {
    char* end = nullptr;
    errno = 0;
    const long cols = std::strtol(line.c_str() + 6, &end, 10);
    if (errno != 0 || *end != '\0' || cols < 0)
      throw FormatError("bad column count '" + line.substr(6) + "'");
    m.X.n_cols = static_cast<std::int32_t>(cols);
  }
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw FormatError("line " + std::to_string(line_no) +
                        ": expected uid<TAB>label<TAB>entries");
    m.uids.push_back(line.substr(0, t1));
    m.labels.push_back(
        parse_label_field(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), line_no));
    SparseVector row;
    std::istringstream entries(line.substr(t2 + 1));
    std::string cell;
    std::int32_t prev_col = -1;
    while (entries >> cell) {
      const size_t colon = cell.find(':');
      if (colon == std::string::npos)
        throw FormatError("line " + std::to_string(line_no) + ": bad entry '" + cell + "'");
      char* end = nullptr;
      errno = 0;
      const long col = std::strtol(cell.c_str(), &end, 10);
      if (errno != 0 || end != cell.c_str() + colon)
        throw FormatError("line " + std::to_string(line_no) + ": bad column in '" + cell + "'");
      errno = 0;
      const double value = std::strtod(cell.c_str() + colon + 1, &end);
      if (errno != 0 || *end != '\0')
        throw FormatError("line " + std::to_string(line_no) + ": bad value in '" + cell + "'");
      if (col <= prev_col || col >= m.X.n_cols)
        throw FormatError("line " + std::to_string(line_no) +
                          ": columns must be strictly increasing and within #cols");
      if (value != 0.0) row.entries.push_back({static_cast<std::int32_t>(col), value});
      prev_col = static_cast<std::int32_t>(col);
    }
    m.X.rows.push_back(std::move(row));
  }
  return m;
}

std::set<std::string> load_word_set(const std::string& path) {
  std::set<std::string> words;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    if (start) line.erase(0, start);
    if (line.empty() || line[0] == '#') continue;
    words.insert(line);
  }
  return words;
}

void save_word_list(const std::string& path, const std::set<std::string>& words) {
  std::ostringstream out;
  for (const auto& w : words) out << w << '\n';
  write_file(path, out.str());
}

NormalizationDictionary load_norm_dict(const std::string& path) {
  return norm_dict_from_rows(parse_curated(read_file(path)));
}

void save_norm_dict(const std::string& path, const NormalizationDictionary& dict) {
  write_file(path, serialize_norm_dict(dict));
}

nlohmann::json load_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("cannot parse '" + path + "': " + e.what());
  }
}

void save_json(const std::string& path, const nlohmann::json& j) {
  write_file(path, j.dump(2) + "\n");
}

std::string default_data_dir() {
  if (const char* env = std::getenv("SENTIMIX_DATA_DIR"); env && *env) return env;
  return detail::kSourceDataDir;
}

std::string dataset_dir() {
  if (const char* env = std::getenv("SENTIMIX_DATASET_DIR"); env && *env) return env;
  return {};
}

}  // namespace sentimix
