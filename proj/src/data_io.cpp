#include "race/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "race/errors.hpp"
#include "race/rng.hpp"

namespace race {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool istarts_with(const std::string& s, const std::string& kw) {
  return s.size() >= kw.size() && lower(s.substr(0, kw.size())) == kw;
}

// strips one layer of matching single or double quotes
std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

// comma split that keeps quoted runs together (no escape sequences)
std::vector<std::string> split_quoted(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char c : s) {
    if (quote) {
      cur += c;
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      cur += c;
      quote = c;
    } else if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& tok, int line, const std::string& what) {
  const std::string t = trim(tok);
  if (t.empty()) throw ParseError("empty " + what, line);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw ParseError("expected a number for " + what + ", got '" + t + "'", line);
  return v;
}

long parse_integer(const std::string& tok, int line, const std::string& what) {
  const std::string t = trim(tok);
  if (t.empty()) throw ParseError("empty " + what, line);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw ParseError("expected an integer for " + what + ", got '" + t + "'", line);
  return v;
}

int nominal_index(const AttrInfo& attr, const std::string& raw, int line) {
  const std::string v = unquote(trim(raw));
  for (size_t i = 0; i < attr.values.size(); ++i)
    if (attr.values[i] == v) return static_cast<int>(i);
  throw ParseError("value '" + v + "' not in domain of attribute '" + attr.name + "'", line);
}

// one parsed value destined for column `idx`; zeros are dropped so sparse and
// dense renderings of the same data store identically
void push_cell(SparseRow& row, int idx, double value) {
  if (value == 0.0) return;
  row.push_back({idx, value});
}

double format_roundtrip(char* buf, size_t cap, double v) {
  std::snprintf(buf, cap, "%.17g", v);
  return v;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  return s.find_first_of(" \t,{}%'\"") != std::string::npos;
}

std::string arff_quote(const std::string& s) {
  return needs_quotes(s) ? "\"" + s + "\"" : s;
}

}  // namespace

FeatureSchema Dataset::schema() const {
  FeatureSchema out;
  out.reserve(attrs.size());
  for (const auto& a : attrs)
    out.push_back({a.kind, static_cast<int>(a.values.size())});
  return out;
}

Mat Dataset::dense_features(int begin, int count) const {
  if (begin < 0 || count < 0 || begin + count > n())
    throw DimensionError("dense_features: row range out of bounds");
  Mat X = Mat::Zero(count, m());
  for (int i = 0; i < count; ++i)
    for (const Cell& c : rows[begin + i]) X(i, c.index) = c.value;
  return X;
}

ArffFile parse_arff(const std::string& text) {
  ArffFile out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool in_data = false;
  bool saw_relation = false;
  std::unordered_set<std::string> attr_names;

  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '%') continue;

    if (!in_data) {
      if (istarts_with(s, "@relation")) {
        out.relation = unquote(trim(s.substr(9)));
        saw_relation = true;
      } else if (istarts_with(s, "@attribute")) {
        std::string rest = trim(s.substr(10));
        if (rest.empty()) throw ParseError("attribute declaration without a name", line);
        // name, possibly quoted
        std::string name;
        if (rest[0] == '\'' || rest[0] == '"') {
          const size_t close = rest.find(rest[0], 1);
          if (close == std::string::npos)
            throw ParseError("unterminated quote in attribute name", line);
          name = rest.substr(1, close - 1);
          rest = trim(rest.substr(close + 1));
        } else {
          const size_t sp = rest.find_first_of(" \t");
          if (sp == std::string::npos)
            throw ParseError("attribute declaration without a type", line);
          name = rest.substr(0, sp);
          rest = trim(rest.substr(sp));
        }
        if (!attr_names.insert(name).second)
          throw ParseError("duplicate attribute name '" + name + "'", line);

        AttrInfo attr;
        attr.name = name;
        const std::string type = lower(rest);
        if (type == "numeric" || type == "real" || type == "integer") {
          attr.kind = FeatureKind::numeric;
        } else if (!rest.empty() && rest.front() == '{' && rest.back() == '}') {
          attr.kind = FeatureKind::nominal;
          for (const std::string& v : split_quoted(rest.substr(1, rest.size() - 2), ','))
            attr.values.push_back(unquote(trim(v)));
          if (attr.values.empty())
            throw ParseError("empty nominal domain for attribute '" + name + "'", line);
        } else {
          throw ParseError("unsupported attribute type '" + rest + "' for '" + name + "'", line);
        }
        out.attrs.push_back(std::move(attr));
      } else if (istarts_with(s, "@data")) {
        if (!saw_relation) throw ParseError("@data before @relation", line);
        if (out.attrs.empty()) throw ParseError("@data with no attributes declared", line);
        in_data = true;
      } else {
        throw ParseError("unexpected header line '" + s + "'", line);
      }
      continue;
    }

    const int nattr = static_cast<int>(out.attrs.size());
    SparseRow row;
    if (s.front() == '{') {
      if (s.back() != '}') throw ParseError("sparse row missing closing brace", line);
      const std::string body = trim(s.substr(1, s.size() - 2));
      if (!body.empty()) {
        for (const std::string& entry : split_quoted(body, ',')) {
          const std::string e = trim(entry);
          const size_t sp = e.find_first_of(" \t");
          if (sp == std::string::npos)
            throw ParseError("sparse entry '" + e + "' needs an index and a value", line);
          const long idx = parse_integer(e.substr(0, sp), line, "sparse index");
          if (idx < 0 || idx >= nattr)
            throw ParseError("index " + std::to_string(idx) + " out of range", line);
          const std::string val = trim(e.substr(sp));
          const AttrInfo& attr = out.attrs[idx];
          if (val == "?") {
            row.push_back({static_cast<int>(idx), kNaN});
          } else if (attr.kind == FeatureKind::numeric) {
            push_cell(row, static_cast<int>(idx),
                      parse_number(val, line, "attribute '" + attr.name + "'"));
          } else {
            push_cell(row, static_cast<int>(idx),
                      static_cast<double>(nominal_index(attr, val, line)));
          }
        }
      }
      std::sort(row.begin(), row.end(),
                [](const Cell& a, const Cell& b) { return a.index < b.index; });
      for (size_t i = 1; i < row.size(); ++i)
        if (row[i].index == row[i - 1].index)
          throw ParseError("duplicate sparse index " + std::to_string(row[i].index), line);
    } else {
      const std::vector<std::string> fields = split_quoted(s, ',');
      if (static_cast<int>(fields.size()) != nattr)
        throw ParseError("expected " + std::to_string(nattr) + " values, got " +
                             std::to_string(fields.size()),
                         line);
      for (int j = 0; j < nattr; ++j) {
        const std::string val = trim(fields[j]);
        const AttrInfo& attr = out.attrs[j];
        if (val == "?") {
          row.push_back({j, kNaN});
        } else if (attr.kind == FeatureKind::numeric) {
          push_cell(row, j, parse_number(val, line, "attribute '" + attr.name + "'"));
        } else {
          push_cell(row, j, static_cast<double>(nominal_index(attr, val, line)));
        }
      }
    }
    out.rows.push_back(std::move(row));
  }

  if (!in_data) throw ParseError("no @data section", line);
  return out;
}

std::vector<std::string> parse_label_xml(const std::string& text) {
  // strip comments so commented-out labels don't count
  std::string t = text;
  size_t c;
  while ((c = t.find("<!--")) != std::string::npos) {
    const size_t e = t.find("-->", c);
    if (e == std::string::npos) throw Error("label xml: unterminated comment");
    t.erase(c, e - c + 3);
  }

  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  size_t pos = 0;
  while ((pos = t.find("<label", pos)) != std::string::npos) {
    const size_t after = pos + 6;
    // skip <labels ...>, match only the label element itself
    if (after < t.size() && (std::isalnum(static_cast<unsigned char>(t[after])) ||
                             t[after] == '-' || t[after] == '_')) {
      pos = after;
      continue;
    }
    const size_t close = t.find('>', pos);
    if (close == std::string::npos) throw Error("label xml: unterminated label tag");
    const std::string tag = t.substr(pos, close - pos);
    const size_t nm = tag.find("name");
    if (nm == std::string::npos) throw Error("label xml: label element without a name");
    size_t q = tag.find_first_of("\"'", nm);
    if (q == std::string::npos) throw Error("label xml: unquoted label name");
    const size_t qe = tag.find(tag[q], q + 1);
    if (qe == std::string::npos) throw Error("label xml: unterminated label name");
    std::string name = tag.substr(q + 1, qe - q - 1);
    // undo the escaping emit_label_xml applies
    const std::pair<const char*, const char*> subs[] = {
        {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&amp;", "&"}};
    for (const auto& [from, to] : subs) {
      size_t p = 0;
      while ((p = name.find(from, p)) != std::string::npos) {
        name.replace(p, std::strlen(from), to);
        p += std::strlen(to);
      }
    }
    if (!seen.insert(name).second) throw Error("label xml: duplicate label '" + name + "'");
    names.push_back(std::move(name));
    pos = close + 1;
  }
  if (names.empty()) throw Error("label xml: no label elements found");
  return names;
}

Dataset assemble_dataset(const ArffFile& arff,
                         const std::vector<std::string>& label_names) {
  std::unordered_map<std::string, int> by_name;
  for (size_t j = 0; j < arff.attrs.size(); ++j)
    by_name.emplace(arff.attrs[j].name, static_cast<int>(j));

  const int l = static_cast<int>(label_names.size());
  std::vector<int> label_col(l);
  std::vector<char> is_label(arff.attrs.size(), 0);
  for (int j = 0; j < l; ++j) {
    const auto it = by_name.find(label_names[j]);
    if (it == by_name.end())
      throw Error("label '" + label_names[j] + "' not in ARFF schema");
    label_col[j] = it->second;
    is_label[it->second] = 1;
  }

  Dataset ds;
  ds.name = arff.relation;
  ds.label_names = label_names;
  std::vector<int> remap(arff.attrs.size(), -1);
  for (size_t j = 0; j < arff.attrs.size(); ++j) {
    if (is_label[j]) continue;
    remap[j] = ds.m();
    ds.attrs.push_back(arff.attrs[j]);
  }

  const int n = static_cast<int>(arff.rows.size());
  ds.labels = Mat::Zero(n, l);
  std::vector<int> col_to_label(arff.attrs.size(), -1);
  for (int j = 0; j < l; ++j) col_to_label[label_col[j]] = j;

  // a label cell must encode the bit directly: nominal via its value string,
  // numeric via the value itself; absent sparse cells fall back to index 0
  auto label_bit = [&](int col, double stored, bool present) -> double {
    const AttrInfo& attr = arff.attrs[col];
    if (!std::isfinite(stored) && present)
      throw Error("label '" + attr.name + "' has a missing value");
    if (attr.kind == FeatureKind::nominal) {
      const int idx = present ? static_cast<int>(stored) : 0;
      const std::string& v = attr.values[idx];
      if (v == "0") return 0.0;
      if (v == "1") return 1.0;
      throw Error("label '" + attr.name + "' has non-binary value '" + v + "'");
    }
    const double v = present ? stored : 0.0;
    if (v != 0.0 && v != 1.0)
      throw Error("label '" + attr.name + "' has non-binary value " + std::to_string(v));
    return v;
  };

  ds.rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    SparseRow feats;
    std::vector<char> label_present(l, 0);
    for (const Cell& cell : arff.rows[i]) {
      const int lj = col_to_label[cell.index];
      if (lj >= 0) {
        ds.labels(i, lj) = label_bit(cell.index, cell.value, true);
        label_present[lj] = 1;
      } else {
        feats.push_back({remap[cell.index], cell.value});
      }
    }
    for (int j = 0; j < l; ++j)
      if (!label_present[j]) ds.labels(i, j) = label_bit(label_col[j], 0.0, false);
    ds.rows.push_back(std::move(feats));
  }
  return ds;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Dataset load_dataset(const std::string& arff_path, const std::string& xml_path) {
  return assemble_dataset(parse_arff(read_text_file(arff_path)),
                          parse_label_xml(read_text_file(xml_path)));
}

std::string emit_arff(const Dataset& ds) {
  std::ostringstream out;
  out << "@relation " << arff_quote(ds.name.empty() ? "dataset" : ds.name) << "\n\n";
  char buf[64];
  for (const AttrInfo& a : ds.attrs) {
    out << "@attribute " << arff_quote(a.name) << " ";
    if (a.kind == FeatureKind::numeric) {
      out << "numeric";
    } else {
      out << "{";
      for (size_t i = 0; i < a.values.size(); ++i)
        out << (i ? "," : "") << arff_quote(a.values[i]);
      out << "}";
    }
    out << "\n";
  }
  for (const std::string& name : ds.label_names)
    out << "@attribute " << arff_quote(name) << " {0,1}\n";

  out << "\n@data\n";
  const int m = ds.m();
  for (int i = 0; i < ds.n(); ++i) {
    out << "{";
    bool first = true;
    for (const Cell& c : ds.rows[i]) {
      if (!first) out << ", ";
      first = false;
      out << c.index << " ";
      const AttrInfo& a = ds.attrs[c.index];
      if (std::isnan(c.value)) {
        out << "?";
      } else if (a.kind == FeatureKind::nominal) {
        out << arff_quote(a.values[static_cast<int>(c.value)]);
      } else {
        format_roundtrip(buf, sizeof buf, c.value);
        out << buf;
      }
    }
    for (int j = 0; j < ds.l(); ++j) {
      if (ds.labels(i, j) == 0.0) continue;
      if (!first) out << ", ";
      first = false;
      out << (m + j) << " 1";
    }
    out << "}\n";
  }
  return out.str();
}

std::string emit_label_xml(const Dataset& ds) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  out << "<labels xmlns=\"http://mulan.sourceforge.net/labels\">\n";
  for (const std::string& name : ds.label_names)
    out << "  <label name=\"" << xml_escape(name) << "\"></label>\n";
  out << "</labels>\n";
  return out.str();
}

Dataset parse_sparse_tsv(const std::string& text, const std::string& name) {
  Dataset ds;
  ds.name = name;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  int l = -1;
  int max_idx = -1;
  std::vector<std::string> bit_rows;

  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) continue;

    std::vector<std::string> fields;
    size_t start = 0;
    for (size_t p = 0; p <= raw.size(); ++p) {
      if (p == raw.size() || raw[p] == '\t') {
        fields.push_back(raw.substr(start, p - start));
        start = p + 1;
      }
    }
    if (fields.size() != 3)
      throw ParseError("expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       line);

    parse_integer(fields[0], line, "row id");

    SparseRow row;
    const std::string pairs = trim(fields[1]);
    if (!pairs.empty()) {
      std::istringstream ps(pairs);
      std::string pair;
      while (std::getline(ps, pair, ',')) {
        const size_t colon = pair.find(':');
        if (colon == std::string::npos)
          throw ParseError("feature entry '" + trim(pair) + "' needs idx:val", line);
        const long idx = parse_integer(pair.substr(0, colon), line, "feature index");
        if (idx < 0) throw ParseError("negative feature index", line);
        const double val = parse_number(pair.substr(colon + 1), line, "feature value");
        max_idx = std::max(max_idx, static_cast<int>(idx));
        push_cell(row, static_cast<int>(idx), val);
      }
      std::sort(row.begin(), row.end(),
                [](const Cell& a, const Cell& b) { return a.index < b.index; });
      for (size_t i = 1; i < row.size(); ++i)
        if (row[i].index == row[i - 1].index)
          throw ParseError("duplicate feature index " + std::to_string(row[i].index), line);
    }

    const std::string bits = trim(fields[2]);
    if (l < 0) l = static_cast<int>(bits.size());
    if (static_cast<int>(bits.size()) != l || l == 0)
      throw ParseError("label bits '" + bits + "' should have " + std::to_string(l) +
                           " digits",
                       line);
    for (char b : bits)
      if (b != '0' && b != '1')
        throw ParseError("label bits must be 0 or 1, got '" + bits + "'", line);

    ds.rows.push_back(std::move(row));
    bit_rows.push_back(bits);
  }

  if (ds.rows.empty()) throw Error("sparse tsv: no data rows");

  const int m = max_idx + 1;
  for (int j = 0; j < m; ++j)
    ds.attrs.push_back({"f" + std::to_string(j), FeatureKind::numeric, {}});
  ds.labels = Mat::Zero(ds.n(), l);
  for (int i = 0; i < ds.n(); ++i)
    for (int j = 0; j < l; ++j) ds.labels(i, j) = bit_rows[i][j] == '1' ? 1.0 : 0.0;
  for (int j = 0; j < l; ++j) ds.label_names.push_back("label" + std::to_string(j));
  return ds;
}

Dataset load_sparse_tsv(const std::string& path) {
  return parse_sparse_tsv(read_text_file(path), path);
}

Dataset synth_stream(std::uint64_t seed, int n_instances, int m, int l,
                     double density, double dependency_strength) {
  if (!(density > 0.0 && density < 1.0))
    throw Error("synth_stream: density must lie strictly inside (0,1)");
  if (dependency_strength < 0.0 || dependency_strength > 1.0)
    throw Error("synth_stream: dependency_strength must lie in [0,1]");
  if (n_instances < 2 || m < 1 || l < 1)
    throw Error("synth_stream: need n >= 2, m >= 1, l >= 1");

  const int n = n_instances;
  const int r = std::max(2, static_cast<int>(std::ceil(std::log2(std::max(l, 2)))));
  const int npairs = (l + 1) / 2;
  // cube root keeps mid-range requests from washing out: the pair share maps
  // to correlation sub-linearly once thresholds bite
  const double share =
      dependency_strength > 0.0 ? std::cbrt(dependency_strength) : 0.0;

  Rng rng(seed);
  Mat W(npairs, r);
  for (int p = 0; p < npairs; ++p) {
    for (int j = 0; j < r; ++j) W(p, j) = rng.gaussian();
    const double norm = W.row(p).norm();
    if (norm > 0.0) W.row(p) /= norm;
  }
  Mat g(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) g(i, j) = rng.gaussian();
  Mat eps(n, l);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < l; ++j) eps(i, j) = rng.gaussian();

  const Mat pair_score = g * W.transpose();  // n x npairs
  Mat score(n, l);
  const double w_common = std::sqrt(share);
  const double w_own = std::sqrt(1.0 - share);
  for (int j = 0; j < l; ++j)
    score.col(j) = w_common * pair_score.col(j / 2) + w_own * eps.col(j);

  // Zipf-profiled per-label rates, shared within a pair, rescaled to the
  // requested mean density; clip away degenerate always/never labels
  std::vector<double> rates(l);
  double sum = 0.0;
  for (int j = 0; j < l; ++j) {
    rates[j] = std::pow(1.0 + j / 2, -1.3);
    sum += rates[j];
  }
  for (double& v : rates) v *= density * l / sum;
  sum = 0.0;
  for (double& v : rates) {
    v = std::clamp(v, 1.0 / n, 0.9);
    sum += v;
  }
  for (double& v : rates) v *= density * l / sum;

  Dataset ds;
  ds.name = "synth";
  ds.labels = Mat::Zero(n, l);
  std::vector<double> sorted(n);
  for (int j = 0; j < l; ++j) {
    for (int i = 0; i < n; ++i) sorted[i] = score(i, j);
    std::sort(sorted.begin(), sorted.end());
    const int idx = std::clamp(
        static_cast<int>(std::floor((1.0 - rates[j]) * n)), 0, n - 1);
    const double tau = sorted[idx];
    for (int i = 0; i < n; ++i) ds.labels(i, j) = score(i, j) >= tau ? 1.0 : 0.0;
  }

  Mat proto(l, m);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < m; ++j) proto(i, j) = 3.0 * rng.gaussian();
  Mat X = ds.labels * proto;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) X(i, j) += rng.gaussian();

  for (int j = 0; j < m; ++j)
    ds.attrs.push_back({"f" + std::to_string(j), FeatureKind::numeric, {}});
  for (int j = 0; j < l; ++j) ds.label_names.push_back("label" + std::to_string(j));
  ds.rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    SparseRow row;
    row.reserve(m);
    for (int j = 0; j < m; ++j) row.push_back({j, X(i, j)});
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

std::vector<StreamBatch> batch_iter(const Dataset& ds, const StreamConfig& cfg) {
  if (cfg.window < 1) throw Error("batch_iter: window must be >= 1");
  const int n = ds.n();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  if (cfg.shuffle_seed) {
    Rng rng(*cfg.shuffle_seed);
    rng.shuffle(order);
  }

  std::vector<StreamBatch> batches;
  for (int start = 0; start < n; start += cfg.window) {
    const int count = std::min(cfg.window, n - start);
    StreamBatch b;
    b.X = Mat::Zero(count, ds.m());
    b.L = Mat(count, ds.l());
    for (int i = 0; i < count; ++i) {
      const int src = order[start + i];
      for (const Cell& c : ds.rows[src]) b.X(i, c.index) = c.value;
      b.L.row(i) = ds.labels.row(src);
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace race
