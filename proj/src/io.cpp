#include "wscond/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wscond/errors.hpp"

namespace wscond {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw ValidationError("cannot format number");
  return std::string(buf, end);
}

std::string format_fixed(double x, int digits) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  if (ec != std::errc{}) throw ValidationError("cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double x = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(x)) {
    throw ValidationError("invalid number '" + std::string(s) + "'");
  }
  return x;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    out.push_back(trim(line));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

struct Field {
  std::string text;
  bool quoted = false;
};

std::vector<Field> split_csv(std::string_view line) {
  std::vector<Field> out;
  std::size_t i = 0;
  while (true) {
    Field f;
    if (i < line.size() && line[i] == '"') {
      f.quoted = true;
      ++i;
      while (true) {
        if (i >= line.size()) throw ValidationError("unterminated quoted CSV field");
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            f.text.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        f.text.push_back(line[i++]);
      }
      if (i < line.size() && line[i] != ',') throw ValidationError("malformed CSV field");
    } else {
      auto comma = line.find(',', i);
      auto end = comma == std::string_view::npos ? line.size() : comma;
      f.text = std::string(trim(line.substr(i, end - i)));
      i = end;
    }
    out.push_back(std::move(f));
    if (i >= line.size()) break;
    ++i;  // skip comma
    if (i == line.size()) {
      out.push_back(Field{});
      break;
    }
  }
  return out;
}

bool looks_like_integer(std::string_view s) {
  if (s.empty()) return false;
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && end == s.data() + s.size();
}

std::string quote_csv(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_value(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  const auto& s = std::get<std::string>(v);
  const bool needs_quotes = s.empty() || looks_like_integer(s) ||
                            s.find_first_of(",\"\n\r") != std::string::npos ||
                            s.front() == ' ' || s.back() == ' ';
  return needs_quotes ? quote_csv(s) : s;
}

}  // namespace

WorldTable parse_world_table(std::string_view csv) {
  auto lines = lines_of(csv);
  std::size_t li = 0;
  while (li < lines.size() && lines[li].empty()) ++li;
  if (li == lines.size()) throw ValidationError("world table: missing header");
  {
    auto header = split_csv(lines[li]);
    if (header.size() != 3 || header[0].text != "var" || header[1].text != "value" ||
        header[2].text != "prob") {
      throw ValidationError("world table: expected header 'var,value,prob'");
    }
  }
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<double>>> acc;
  for (++li; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    auto f = split_csv(lines[li]);
    if (f.size() != 3) {
      throw ValidationError("world table line " + std::to_string(li + 1) +
                            ": expected 3 fields");
    }
    auto [it, fresh] = acc.try_emplace(f[0].text);
    if (fresh) order.push_back(f[0].text);
    it->second.first.push_back(f[1].text);
    it->second.second.push_back(parse_double(f[2].text));
  }
  WorldTable w;
  for (const auto& name : order) {
    auto& [labels, probs] = acc[name];
    w.add_variable(name, std::move(labels), std::move(probs));
  }
  return w;
}

std::string serialize(const WorldTable& w) {
  std::string out = "var,value,prob\n";
  for (VarId v = 0; v < w.size(); ++v) {
    for (ValueIdx i = 0; i < w.domain_size(v); ++i) {
      out += w.name(v) + "," + w.label(v, i) + "," + format_double(w.prob(v, i)) + "\n";
    }
  }
  return out;
}

WsDescriptor parse_descriptor(std::string_view text, const WorldTable& w) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
    throw ValidationError("descriptor must be enclosed in braces: '" + std::string(text) + "'");
  }
  text = trim(text.substr(1, text.size() - 2));
  std::vector<Assignment> as;
  while (!text.empty()) {
    auto semi = text.find(';');
    auto part = trim(text.substr(0, semi));
    auto eq = part.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("assignment without '=': '" + std::string(part) + "'");
    }
    const VarId v = w.require(trim(part.substr(0, eq)));
    as.push_back({v, w.require_value(v, trim(part.substr(eq + 1)))});
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  return WsDescriptor(std::move(as));
}

std::string serialize(const WsDescriptor& d, const WorldTable& w) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : d) {
    if (!first) out.push_back(';');
    first = false;
    out += w.name(a.var) + "=" + w.label(a.var, a.value);
  }
  out.push_back('}');
  return out;
}

WsSet parse_wsset(std::string_view text, const WorldTable& w) {
  std::vector<WsDescriptor> ds;
  for (auto line : lines_of(text)) {
    if (line.empty() || line.front() == '#') continue;
    ds.push_back(parse_descriptor(line, w));
  }
  return WsSet(std::move(ds));
}

std::string serialize(const WsSet& s, const WorldTable& w) {
  std::string out;
  for (const auto& d : s) out += serialize(d, w) + "\n";
  return out;
}

URelation parse_urelation(std::string_view csv, const WorldTable& w) {
  auto lines = lines_of(csv);
  std::size_t li = 0;
  while (li < lines.size() && lines[li].empty()) ++li;
  if (li == lines.size()) throw ValidationError("U-relation: missing header");
  auto header = split_csv(lines[li]);
  if (header.empty() || header[0].text != "wsd") {
    throw ValidationError("U-relation: header must start with 'wsd'");
  }
  Schema schema;
  for (std::size_t i = 1; i < header.size(); ++i) schema.push_back(header[i].text);
  URelation u(schema);
  for (++li; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    auto f = split_csv(lines[li]);
    if (f.size() != schema.size() + 1) {
      throw ValidationError("U-relation line " + std::to_string(li + 1) +
                            ": expected " + std::to_string(schema.size() + 1) + " fields");
    }
    Tuple t;
    for (std::size_t i = 1; i < f.size(); ++i) {
      if (!f[i].quoted && looks_like_integer(f[i].text)) {
        std::int64_t v = 0;
        std::from_chars(f[i].text.data(), f[i].text.data() + f[i].text.size(), v);
        t.emplace_back(v);
      } else {
        t.emplace_back(f[i].text);
      }
    }
    u.add(parse_descriptor(f[0].text, w), std::move(t));
  }
  return u;
}

std::string serialize(const URelation& u, const WorldTable& w) {
  std::string out = "wsd";
  for (const auto& c : u.schema()) out += "," + c;
  out.push_back('\n');
  for (const auto& row : u.rows()) {
    out += serialize(row.wsd, w);
    for (const auto& v : row.values) out += "," + csv_value(v);
    out.push_back('\n');
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view contents) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + p.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

ProbabilisticDatabase read_database(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("not a directory: '" + dir.string() + "'");
  ProbabilisticDatabase db;
  db.world = parse_world_table(read_file(dir / "world.csv"));
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto& p = entry.path();
    if (!entry.is_regular_file() || p.extension() != ".csv" || p.stem() == "world") continue;
    db.relations.emplace(p.stem().string(), parse_urelation(read_file(p), db.world));
  }
  return db;
}

void write_database(const ProbabilisticDatabase& db, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "world.csv", serialize(db.world));
  for (const auto& [name, rel] : db.relations) {
    if (name == "world") throw ValidationError("relation may not be named 'world'");
    write_file(dir / (name + ".csv"), serialize(rel, db.world));
  }
}

// ---------------------------------------------------------------------------
// Query parser

namespace {

struct SExpr {
  std::string atom;
  bool quoted = false;
  bool is_list = false;
  std::vector<SExpr> items;
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : s_(text) {}

  SExpr read() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end of query");
    if (s_[i_] == '(') {
      ++i_;
      SExpr list;
      list.is_list = true;
      while (true) {
        skip();
        if (i_ >= s_.size()) fail("missing ')'");
        if (s_[i_] == ')') {
          ++i_;
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (s_[i_] == ')') fail("unexpected ')'");
    SExpr atom;
    if (s_[i_] == '"') {
      atom.quoted = true;
      ++i_;
      while (i_ < s_.size() && s_[i_] != '"') atom.atom.push_back(s_[i_++]);
      if (i_ >= s_.size()) fail("unterminated string");
      ++i_;
      return atom;
    }
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) &&
           s_[i_] != '(' && s_[i_] != ')') {
      atom.atom.push_back(s_[i_++]);
    }
    return atom;
  }

  bool at_end() {
    skip();
    return i_ >= s_.size();
  }

  [[noreturn]] static void fail(const std::string& msg) {
    throw ValidationError("query: " + msg);
  }

 private:
  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      } else if (s_[i_] == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

const std::string& head(const SExpr& e) {
  if (!e.is_list || e.items.empty() || e.items[0].is_list) {
    SExprReader::fail("expected a non-empty list");
  }
  return e.items[0].atom;
}

void arity(const SExpr& e, std::size_t n) {
  if (e.items.size() != n + 1) {
    SExprReader::fail("'" + head(e) + "' expects " + std::to_string(n) + " arguments");
  }
}

Operand to_operand(const SExpr& e) {
  if (e.is_list) SExprReader::fail("expected a term");
  if (e.quoted) return Value{e.atom};
  if (looks_like_integer(e.atom)) {
    std::int64_t v = 0;
    std::from_chars(e.atom.data(), e.atom.data() + e.atom.size(), v);
    return Value{v};
  }
  return ColumnRef{e.atom};
}

Predicate to_predicate(const SExpr& e) {
  if (!e.is_list) {
    if (e.atom == "true") return Predicate::always();
    if (e.atom == "false") return Predicate::never();
    SExprReader::fail("expected a predicate, got '" + e.atom + "'");
  }
  const auto& h = head(e);
  if (h == "and" || h == "or") {
    std::vector<Predicate> parts;
    for (std::size_t i = 1; i < e.items.size(); ++i) parts.push_back(to_predicate(e.items[i]));
    return h == "and" ? Predicate::all_of(std::move(parts)) : Predicate::any_of(std::move(parts));
  }
  if (h == "not") {
    arity(e, 1);
    return Predicate::negate(to_predicate(e.items[1]));
  }
  static const std::map<std::string, CmpOp> ops = {
      {"=", CmpOp::Eq}, {"!=", CmpOp::Ne}, {"<", CmpOp::Lt},
      {"<=", CmpOp::Le}, {">", CmpOp::Gt}, {">=", CmpOp::Ge}};
  auto it = ops.find(h);
  if (it == ops.end()) SExprReader::fail("unknown predicate '" + h + "'");
  arity(e, 2);
  return Predicate::compare(to_operand(e.items[1]), it->second, to_operand(e.items[2]));
}

Query to_query(const SExpr& e) {
  const auto& h = head(e);
  if (h == "scan") {
    arity(e, 1);
    if (e.items[1].is_list) SExprReader::fail("scan expects a relation name");
    return Query::scan(e.items[1].atom);
  }
  if (h == "select") {
    arity(e, 2);
    return Query::select(to_query(e.items[1]), to_predicate(e.items[2]));
  }
  if (h == "project") {
    arity(e, 2);
    if (!e.items[1].is_list) SExprReader::fail("project expects a column list");
    std::vector<std::string> cols;
    for (const auto& c : e.items[1].items) cols.push_back(c.atom);
    return Query::project(to_query(e.items[2]), std::move(cols));
  }
  if (h == "join") {
    arity(e, 3);
    return Query::join(to_query(e.items[1]), to_query(e.items[2]), to_predicate(e.items[3]),
                       {"1.", "2."});
  }
  if (h == "union") {
    arity(e, 2);
    return Query::unite(to_query(e.items[1]), to_query(e.items[2]));
  }
  SExprReader::fail("unknown operator '" + h + "'");
}

}  // namespace

BooleanQuery parse_boolean_query(std::string_view text) {
  SExprReader reader(text);
  SExpr top = reader.read();
  if (!reader.at_end()) SExprReader::fail("trailing input after query");
  if (head(top) == "not") {
    arity(top, 1);
    return BooleanQuery{to_query(top.items[1]), true};
  }
  return BooleanQuery{to_query(top), false};
}

}  // namespace wscond
