#include "tvx/scenario.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace tvx {

namespace {

constexpr std::size_t kDefaultCount = 21;

// ---------------------------------------------------------------------------
// Built-in scenarios

constexpr std::string_view kExample1 = R"(# F(x, a) = 0 with Z = {0}: every point lies in W(F, Z).
name = example1

[dims]
n = 1
m = 1
ell = 1
r = inf

[family]
F1 = 0

[z]
kind = slice
zeroed = 1

[plan]
seed = 7
mode = grid
x1 = [-1, 1]
a1 = [-1, 1]
x_count = 101
a_count = 101

[backend]
kind = exact
)";

constexpr std::string_view kExample2 = R"(# F(x, a) = a^2 x^2 with Z = {0}: W(F, Z) = {ax = 0}, not a manifold.
name = example2

[dims]
n = 1
m = 1
ell = 1
r = inf

[family]
F1 = a1^2 * x1^2

[z]
kind = slice
zeroed = 1

[plan]
seed = 7
mode = grid
x1 = [-1, 1]
a1 = [-1, 1]
x_count = 101
a_count = 101

[backend]
kind = exact
)";

constexpr std::string_view kExample3 = R"(# F(x, a) = (x, a, 0) with Z = {(t, 0, 0) : 0 < t < 1}.
# W(F, Z) is empty; the defect set (0,1) x {0} is not closed.
name = example3

[dims]
n = 1
m = 1
ell = 3
r = inf

[family]
F1 = x1
F2 = a1
F3 = 0

[z]
kind = slice
zeroed = 2, 3
constraint = y1
constraint = 1 - y1

[plan]
seed = 7
mode = grid
x1 = [-1, 1]
a1 = [-1, 1]
x_count = 101
# an even count keeps the a-grid off the exceptional parameter a = 0
a_count = 100

[backend]
kind = exact
)";

constexpr std::string_view kParabola = R"(# F(x, a) = x^2 - a with Z = {0}: F is transverse to Z and a = 0 is the
# only critical value of the projection F^-1(Z) -> A.
name = parabola

[dims]
n = 1
m = 1
ell = 1
r = inf

[family]
F1 = x1^2 - a1

[z]
kind = slice
zeroed = 1

[plan]
seed = 7
mode = grid
x1 = [-1, 1]
a1 = [-1, 1]
x_count = 101
a_count = 100

[backend]
kind = exact
)";

const std::map<std::string, std::string_view, std::less<>>& builtin_table() {
  static const std::map<std::string, std::string_view, std::less<>> table{
      {"example1", kExample1}, {"example2", kExample2}, {"example3", kExample3}, {"parabola", kParabola}};
  return table;
}

// ---------------------------------------------------------------------------
// Lexical helpers

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

struct Document {
  std::string origin;
  std::vector<Entry> top;
  std::map<std::string, std::vector<Entry>> sections;
};

const std::vector<std::string> kSections = {"dims", "family", "domain", "z", "plan", "backend"};

Document tokenize(std::string_view text, std::string_view origin) {
  Document doc;
  doc.origin = std::string(origin);
  std::vector<Entry>* current = &doc.top;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::string where = doc.origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where, "unterminated section header");
      const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), name) == kSections.end()) {
        throw ValidationError(where, "unknown section [" + name + "]");
      }
      if (doc.sections.count(name) != 0) throw ValidationError(where, "duplicate section [" + name + "]");
      current = &doc.sections[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(where, "expected 'key = value'");
    Entry e{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), line_no};
    if (e.key.empty()) throw ValidationError(where, "empty key");
    current->push_back(std::move(e));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Field readers

class Section {
 public:
  Section(const Document& doc, std::string name) : doc_(doc), name_(std::move(name)) {
    if (auto it = doc.sections.find(name_); it != doc.sections.end()) entries_ = &it->second;
  }

  std::string field(std::string_view key) const { return name_ + "." + std::string(key); }

  std::optional<Entry> single(std::string_view key) const {
    std::optional<Entry> found;
    for (const auto& e : all()) {
      if (e.key != key) continue;
      if (found) {
        throw ValidationError(field(key), "given twice (" + doc_.origin + ":" + std::to_string(e.line) + ")");
      }
      found = e;
    }
    return found;
  }

  std::vector<Entry> repeated(std::string_view key) const {
    std::vector<Entry> out;
    for (const auto& e : all()) {
      if (e.key == key) out.push_back(e);
    }
    return out;
  }

  const std::vector<Entry>& all() const {
    static const std::vector<Entry> empty;
    return entries_ ? *entries_ : empty;
  }

  void reject_unknown(const std::vector<std::string>& allowed,
                      bool (*pattern)(std::string_view) = nullptr) const {
    for (const auto& e : all()) {
      const bool ok = std::find(allowed.begin(), allowed.end(), e.key) != allowed.end() ||
                      (pattern != nullptr && pattern(e.key));
      if (!ok) throw ValidationError(field(e.key), "unknown key (" + doc_.origin + ":" + std::to_string(e.line) + ")");
    }
  }

 private:
  const Document& doc_;
  std::string name_;
  const std::vector<Entry>* entries_ = nullptr;
};

std::size_t parse_count(const std::string& value, const std::string& field) {
  std::size_t out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ValidationError(field, "expected a non-negative integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& value, const std::string& field) {
  double out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ValidationError(field, "expected a number, got '" + value + "'");
  return out;
}

Rational parse_value(const std::string& value, const std::string& field) {
  try {
    return parse_rational(value);
  } catch (const ParseError&) {
    throw ValidationError(field, "malformed number '" + value + "'");
  }
}

Expr parse_field_expr(const std::string& value, const std::string& field) {
  try {
    return parse_expr(value);
  } catch (const ParseError& e) {
    throw ValidationError(field, e.what());
  }
}

std::optional<Rational> parse_bound(const std::string& text, bool lower, const std::string& field) {
  if (text == (lower ? "-inf" : "inf") || (!lower && text == "+inf")) return std::nullopt;
  return parse_value(text, field);
}

std::pair<std::string, std::string> parse_pair(const std::string& value, char open, char close,
                                               const std::string& field) {
  if (value.size() < 2 || value.front() != open || value.back() != close) {
    throw ValidationError(field, std::string("expected ") + open + "lo, hi" + close + ", got '" + value + "'");
  }
  auto parts = split_list(std::string_view(value).substr(1, value.size() - 2));
  if (parts.size() != 2) throw ValidationError(field, "expected exactly two bounds");
  return {parts[0], parts[1]};
}

bool is_coordinate_key(std::string_view key) {
  if (key.size() < 2 || (key[0] != 'x' && key[0] != 'a')) return false;
  return std::all_of(key.begin() + 1, key.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_component_key(std::string_view key) {
  if (key.size() < 2 || key[0] != 'F') return false;
  return std::all_of(key.begin() + 1, key.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string coordinate(char cls, std::size_t i) { return std::string(1, cls) + std::to_string(i + 1); }

// ---------------------------------------------------------------------------
// Formatting

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_bound(const std::optional<Rational>& b, bool lower) {
  return b ? to_string(*b) : (lower ? "-inf" : "inf");
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view origin) {
  const Document doc = tokenize(text, origin);

  std::string name;
  for (const auto& e : doc.top) {
    if (e.key != "name") throw ValidationError(e.key, "unknown top-level key (" + doc.origin + ":" + std::to_string(e.line) + ")");
    name = e.value;
  }
  if (name.empty()) throw ValidationError("name", "missing scenario name");
  if (name.find_first_of(" \t") != std::string::npos) throw ValidationError("name", "must not contain whitespace");

  // [dims]
  const Section dims(doc, "dims");
  dims.reject_unknown({"n", "m", "ell", "r"});
  auto required_count = [&](std::string_view key) {
    auto e = dims.single(key);
    if (!e) throw ValidationError(dims.field(key), "missing");
    return parse_count(e->value, dims.field(key));
  };
  const std::size_t n = required_count("n");
  const std::size_t m = required_count("m");
  const std::size_t ell = required_count("ell");
  std::optional<unsigned> r;
  if (auto e = dims.single("r"); e && e->value != "inf") {
    r = static_cast<unsigned>(parse_count(e->value, dims.field("r")));
  }
  if (ell == 0) throw ValidationError("dims.ell", "must be at least 1");

  // [family]
  const Section family(doc, "family");
  family.reject_unknown({}, is_component_key);
  std::vector<Expr> components;
  for (std::size_t i = 1; i <= ell; ++i) {
    const std::string key = "F" + std::to_string(i);
    auto e = family.single(key);
    if (!e) throw ValidationError(family.field(key), "missing component");
    components.push_back(parse_field_expr(e->value, family.field(key)));
  }
  if (family.all().size() != ell) {
    throw ValidationError("family", "expected exactly " + std::to_string(ell) + " components F1..F" + std::to_string(ell));
  }

  // [domain]
  const Section domain_sec(doc, "domain");
  domain_sec.reject_unknown({"predicate"}, is_coordinate_key);
  DomainSpec domain;
  domain.x_box.resize(n);
  domain.a_box.resize(m);
  for (const auto& e : domain_sec.all()) {
    if (e.key == "predicate") {
      domain.predicates.push_back(parse_field_expr(e.value, domain_sec.field("predicate")));
      continue;
    }
    const std::string field = domain_sec.field(e.key);
    const std::size_t idx = parse_count(e.key.substr(1), field);
    auto& box = e.key[0] == 'x' ? domain.x_box : domain.a_box;
    if (idx == 0 || idx > box.size()) throw ValidationError(field, "coordinate out of range");
    auto [lo, hi] = parse_pair(e.value, '(', ')', field);
    box[idx - 1] = OpenInterval{parse_bound(lo, true, field), parse_bound(hi, false, field)};
  }

  ParamFamily fam(n, m, std::move(components), std::move(domain), r);

  // [z]
  const Section zsec(doc, "z");
  zsec.reject_unknown({"kind", "zeroed", "g", "constraint"});
  std::vector<Expr> constraints;
  for (const auto& e : zsec.repeated("constraint")) constraints.push_back(parse_field_expr(e.value, zsec.field("constraint")));
  const auto kind = zsec.single("kind");
  if (!kind) throw ValidationError("z.kind", "missing (slice or levelset)");
  std::optional<SubmanifoldSpec> z;
  if (kind->value == "slice") {
    if (!zsec.repeated("g").empty()) throw ValidationError("z.g", "only valid for kind = levelset");
    std::vector<std::size_t> zeroed;
    if (auto e = zsec.single("zeroed")) {
      for (const auto& item : split_list(e->value)) zeroed.push_back(parse_count(item, "z.zeroed"));
    }
    z = SubmanifoldSpec::slice(ell, std::move(zeroed), std::move(constraints));
  } else if (kind->value == "levelset") {
    if (zsec.single("zeroed")) throw ValidationError("z.zeroed", "only valid for kind = slice");
    std::vector<Expr> equations;
    for (const auto& e : zsec.repeated("g")) equations.push_back(parse_field_expr(e.value, zsec.field("g")));
    z = SubmanifoldSpec::level_set(ell, std::move(equations), std::move(constraints));
  } else {
    throw ValidationError("z.kind", "expected slice or levelset, got '" + kind->value + "'");
  }

  // [plan]
  const Section plan_sec(doc, "plan");
  plan_sec.reject_unknown({"seed", "mode", "x_count", "a_count", "eps_alpha", "eps_beta"}, is_coordinate_key);
  SamplingPlan plan;
  plan.x_count = kDefaultCount;
  plan.a_count = kDefaultCount;
  if (auto e = plan_sec.single("seed")) plan.seed = parse_count(e->value, "plan.seed");
  if (auto e = plan_sec.single("mode")) {
    if (e->value == "grid") {
      plan.mode = SamplingMode::Grid;
    } else if (e->value == "monte_carlo") {
      plan.mode = SamplingMode::MonteCarlo;
    } else {
      throw ValidationError("plan.mode", "expected grid or monte_carlo, got '" + e->value + "'");
    }
  }
  if (auto e = plan_sec.single("x_count")) plan.x_count = parse_count(e->value, "plan.x_count");
  if (auto e = plan_sec.single("a_count")) plan.a_count = parse_count(e->value, "plan.a_count");
  if (auto e = plan_sec.single("eps_alpha")) plan.eps_alpha = parse_value(e->value, "plan.eps_alpha");
  if (auto e = plan_sec.single("eps_beta")) plan.eps_beta = parse_value(e->value, "plan.eps_beta");
  std::vector<std::optional<ClosedInterval>> xb(n), ab(m);
  for (const auto& e : plan_sec.all()) {
    if (!is_coordinate_key(e.key)) continue;
    const std::string field = plan_sec.field(e.key);
    const std::size_t idx = parse_count(e.key.substr(1), field);
    auto& box = e.key[0] == 'x' ? xb : ab;
    if (idx == 0 || idx > box.size()) throw ValidationError(field, "coordinate out of range");
    if (box[idx - 1]) throw ValidationError(field, "given twice");
    auto [lo, hi] = parse_pair(e.value, '[', ']', field);
    box[idx - 1] = ClosedInterval{parse_value(lo, field), parse_value(hi, field)};
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!xb[i]) throw ValidationError("plan." + coordinate('x', i), "missing sampling interval");
    plan.x_box.push_back(*xb[i]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!ab[j]) throw ValidationError("plan." + coordinate('a', j), "missing sampling interval");
    plan.a_box.push_back(*ab[j]);
  }
  validate_plan(plan, fam.domain());

  // [backend]
  const Section be(doc, "backend");
  be.reject_unknown({"kind", "rank_tol", "mem_tol"});
  ScalarBackend backend = ScalarBackend::exact();
  const auto bkind = be.single("kind");
  const auto rank_tol = be.single("rank_tol");
  const auto mem_tol = be.single("mem_tol");
  if (!bkind || bkind->value == "exact") {
    if (rank_tol || mem_tol) throw ValidationError("backend", "the exact backend takes no tolerances");
    if (fam.uses_functions() || z->uses_functions()) {
      throw ValidationError("backend.kind", "sin/cos/exp/log need the float backend");
    }
  } else if (bkind->value == "float") {
    FloatTolerances tol;
    if (rank_tol) tol.rank_rel = parse_double(rank_tol->value, "backend.rank_tol");
    if (mem_tol) tol.membership = parse_double(mem_tol->value, "backend.mem_tol");
    backend = ScalarBackend::floating(tol);
  } else {
    throw ValidationError("backend.kind", "expected exact or float, got '" + bkind->value + "'");
  }

  return Scenario{std::move(name), std::move(fam), std::move(*z), std::move(plan), backend};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string serialize(const Scenario& s) {
  std::ostringstream out;
  const auto& f = s.family;
  out << "name = " << s.name << "\n\n";
  out << "[dims]\n";
  out << "n = " << f.n() << "\nm = " << f.m() << "\nell = " << f.ell() << "\n";
  out << "r = " << (f.declared_r() ? std::to_string(*f.declared_r()) : "inf") << "\n\n";

  out << "[family]\n";
  for (std::size_t i = 0; i < f.ell(); ++i) out << "F" << i + 1 << " = " << to_string(f.components()[i]) << "\n";

  out << "\n[domain]\n";
  for (std::size_t i = 0; i < f.n(); ++i) {
    const auto& iv = f.domain().x_box[i];
    out << coordinate('x', i) << " = (" << format_bound(iv.lower, true) << ", " << format_bound(iv.upper, false) << ")\n";
  }
  for (std::size_t j = 0; j < f.m(); ++j) {
    const auto& iv = f.domain().a_box[j];
    out << coordinate('a', j) << " = (" << format_bound(iv.lower, true) << ", " << format_bound(iv.upper, false) << ")\n";
  }
  for (const auto& p : f.domain().predicates) out << "predicate = " << to_string(p) << "\n";

  out << "\n[z]\n";
  if (s.z.is_slice()) {
    out << "kind = slice\nzeroed =";
    for (std::size_t k = 0; k < s.z.zeroed().size(); ++k) out << (k == 0 ? " " : ", ") << s.z.zeroed()[k];
    out << "\n";
  } else {
    out << "kind = levelset\n";
    for (const auto& g : s.z.equations()) out << "g = " << to_string(g) << "\n";
  }
  for (const auto& c : s.z.constraints()) out << "constraint = " << to_string(c) << "\n";

  const auto& p = s.plan;
  out << "\n[plan]\n";
  out << "seed = " << p.seed << "\n";
  out << "mode = " << (p.mode == SamplingMode::Grid ? "grid" : "monte_carlo") << "\n";
  for (std::size_t i = 0; i < p.x_box.size(); ++i) {
    out << coordinate('x', i) << " = [" << to_string(p.x_box[i].lower) << ", " << to_string(p.x_box[i].upper) << "]\n";
  }
  for (std::size_t j = 0; j < p.a_box.size(); ++j) {
    out << coordinate('a', j) << " = [" << to_string(p.a_box[j].lower) << ", " << to_string(p.a_box[j].upper) << "]\n";
  }
  out << "x_count = " << p.x_count << "\na_count = " << p.a_count << "\n";
  out << "eps_alpha = " << to_string(p.eps_alpha) << "\neps_beta = " << to_string(p.eps_beta) << "\n";

  out << "\n[backend]\n";
  out << "kind = " << s.backend.name() << "\n";
  if (!s.backend.is_exact()) {
    out << "rank_tol = " << format_double(s.backend.tolerances().rank_rel) << "\n";
    out << "mem_tol = " << format_double(s.backend.tolerances().membership) << "\n";
  }
  return out.str();
}

std::string content_hash(const Scenario& s) {
  const std::string canonical = serialize(s);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(canonical.data()), canonical.size(), digest);
  std::string hex = "sha256:";
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : builtin_table()) out.push_back(k);
    return out;
  }();
  return names;
}

std::string_view builtin_source(std::string_view name) {
  const auto& table = builtin_table();
  const auto it = table.find(name);
  if (it == table.end()) throw ValidationError("builtin", "unknown built-in scenario '" + std::string(name) + "'");
  return it->second;
}

Scenario builtin(std::string_view name) {
  return parse_scenario(builtin_source(name), "builtin:" + std::string(name));
}

}  // namespace tvx
