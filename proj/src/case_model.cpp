#include "solarlr/case_model.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <fmt/core.h>

namespace solarlr {

CaseSyntaxError::CaseSyntaxError(const std::string& what, int line, int column)
    : std::runtime_error(fmt::format("line {}, column {}: {}", line, column, what)),
      line_(line),
      column_(column) {}

namespace {

// MATPOWER column positions (0-based).
namespace col {
constexpr std::size_t bus_i = 0, bus_type = 1, pd = 2;
constexpr std::size_t gen_bus = 0, gen_status = 7, pmax = 8, pmin = 9;
constexpr std::size_t f_bus = 0, t_bus = 1, br_x = 3, rate_a = 5, br_status = 10;
constexpr std::size_t cost_model = 0, ncost = 3, cost_first = 4;
}  // namespace col

constexpr int kRefBusType = 3;

struct Matrix {
  std::vector<std::vector<double>> rows;
  int line = 0;
  int column = 0;
};

class CaseLexer {
 public:
  explicit CaseLexer(std::string_view text) : text_(text) {}

  void parse() {
    while (true) {
      skip_blank_and_comments(true);
      if (at_end()) break;
      statement();
    }
  }

  std::optional<double> base_mva;
  std::map<std::string, Matrix> matrices;

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const { throw CaseSyntaxError(what, line_, col_); }
  [[noreturn]] static void fail_at(const std::string& what, int line, int column) {
    throw CaseSyntaxError(what, line, column);
  }

  void skip_to_eol() {
    while (!at_end() && peek() != '\n') advance();
  }

  void skip_blank_and_comments(bool newlines) {
    while (!at_end()) {
      char c = peek();
      if (c == '%') {
        skip_to_eol();
      } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string identifier() {
    std::string name;
    while (!at_end()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
        name.push_back(c);
        advance();
      } else {
        break;
      }
    }
    return name;
  }

  void statement() {
    int line = line_, column = col_;
    if (!std::isalpha(static_cast<unsigned char>(peek()))) fail(fmt::format("unexpected character '{}'", peek()));
    std::string name = identifier();
    if (name == "function") {
      skip_to_eol();
      return;
    }
    if (name.rfind("mpc.", 0) != 0) fail_at(fmt::format("unsupported statement '{}'", name), line, column);
    skip_blank_and_comments(false);
    if (peek() != '=') fail(fmt::format("expected '=' after '{}'", name));
    advance();
    skip_blank_and_comments(false);

    const std::string field = name.substr(4);
    if (field == "bus" || field == "gen" || field == "branch" || field == "gencost") {
      if (peek() != '[') fail(fmt::format("expected '[' to open mpc.{}", field));
      matrices[field] = matrix();
    } else if (field == "baseMVA") {
      base_mva = scalar();
    } else {
      skip_value();
    }
    skip_blank_and_comments(false);
    if (peek() == ';') advance();
    skip_blank_and_comments(false);
    if (!at_end() && peek() != '\n') fail("expected end of statement");
  }

  std::optional<double> number_token() {
    std::size_t start = pos_;
    while (!at_end()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-') {
        advance();
      } else {
        break;
      }
    }
    std::string_view tok = text_.substr(start, pos_ - start);
    if (tok.empty()) return std::nullopt;
    bool negative = tok.front() == '-';
    std::string_view body = (tok.front() == '-' || tok.front() == '+') ? tok.substr(1) : tok;
    if (body == "Inf" || body == "inf") {
      return negative ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    }
    if (body == "NaN" || body == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr != body.data() + body.size()) return std::nullopt;
    return negative ? -value : value;
  }

  double scalar() {
    int line = line_, column = col_;
    auto v = number_token();
    if (!v) fail_at("expected a number", line, column);
    return *v;
  }

  Matrix matrix() {
    Matrix m;
    m.line = line_;
    m.column = col_;
    advance();  // '['
    std::vector<double> row;
    int row_line = line_, row_col = col_;
    auto end_row = [&] {
      if (row.empty()) return;
      if (!m.rows.empty() && row.size() != m.rows.front().size()) {
        fail_at(fmt::format("row has {} columns, expected {}", row.size(), m.rows.front().size()), row_line,
                row_col);
      }
      m.rows.push_back(std::move(row));
      row.clear();
    };
    while (true) {
      if (at_end()) fail_at("unterminated matrix", m.line, m.column);
      char c = peek();
      if (c == ']') {
        end_row();
        advance();
        return m;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == ',') {
        advance();
      } else if (c == '%') {
        skip_to_eol();
      } else if (c == ';' || c == '\n') {
        end_row();
        advance();
      } else if (c == '.' && peek(1) == '.' && peek(2) == '.') {
        skip_to_eol();
        if (!at_end()) advance();
      } else {
        if (row.empty()) {
          row_line = line_;
          row_col = col_;
        }
        int line = line_, column = col_;
        auto v = number_token();
        if (!v) fail_at("malformed number", line, column);
        row.push_back(*v);
      }
    }
  }

  void skip_value() {
    char open = peek();
    if (open == '[' || open == '{') {
      char close = open == '[' ? ']' : '}';
      int line = line_, column = col_;
      int depth = 0;
      while (true) {
        if (at_end()) fail_at("unterminated value", line, column);
        char c = peek();
        if (c == '\'') {
          skip_string();
          continue;
        }
        if (c == '%') {
          skip_to_eol();
          continue;
        }
        if (c == open) ++depth;
        if (c == close) --depth;
        advance();
        if (depth == 0) return;
      }
    }
    if (open == '\'') {
      skip_string();
      return;
    }
    while (!at_end() && peek() != ';' && peek() != '\n' && peek() != '%') advance();
  }

  void skip_string() {
    int line = line_, column = col_;
    advance();
    while (true) {
      if (at_end() || peek() == '\n') fail_at("unterminated string", line, column);
      if (peek() == '\'') {
        advance();
        if (peek() == '\'') {
          advance();
          continue;
        }
        return;
      }
      advance();
    }
  }
};

const Matrix& require_matrix(const CaseLexer& lex, const std::string& name, std::size_t min_columns) {
  auto it = lex.matrices.find(name);
  if (it == lex.matrices.end()) throw CaseSyntaxError(fmt::format("missing mpc.{}", name), 1, 1);
  const Matrix& m = it->second;
  if (m.rows.empty()) throw CaseSyntaxError(fmt::format("mpc.{} is empty", name), m.line, m.column);
  if (m.rows.front().size() < min_columns) {
    throw CaseSyntaxError(
        fmt::format("mpc.{} needs at least {} columns, found {}", name, min_columns, m.rows.front().size()), m.line,
        m.column);
  }
  return m;
}

int as_id(double v, const char* what) {
  if (!std::isfinite(v) || v != std::floor(v)) throw CaseSemanticError(fmt::format("{} {} is not an integer", what, v));
  return static_cast<int>(v);
}

double linearize_cost(const std::vector<double>& row, const Generator& g, CostLinearization mode, int gen_id) {
  const int model = static_cast<int>(row[col::cost_model]);
  const int n = static_cast<int>(row[col::ncost]);
  if (n < 1) throw CaseSemanticError(fmt::format("gencost row of generator {} has NCOST {}", gen_id, n));
  if (model == 2) {
    if (row.size() < col::cost_first + static_cast<std::size_t>(n)) {
      throw CaseSemanticError(fmt::format("gencost row of generator {} is short", gen_id));
    }
    // Coefficients are stored highest order first: c_{n-1} ... c1 c0.
    auto coef = [&](int order) {
      return order < n ? row[col::cost_first + static_cast<std::size_t>(n - 1 - order)] : 0.0;
    };
    const double c1 = coef(1);
    const double c2 = coef(2);
    if (mode == CostLinearization::linear) return c1;
    return c1 + c2 * (g.p_min + g.p_max);
  }
  if (model == 1) {
    // Piecewise linear: slope between the first and last breakpoints.
    if (n < 2 || row.size() < col::cost_first + 2 * static_cast<std::size_t>(n)) {
      throw CaseSemanticError(fmt::format("piecewise gencost row of generator {} is malformed", gen_id));
    }
    const double p0 = row[col::cost_first], f0 = row[col::cost_first + 1];
    const double p1 = row[col::cost_first + 2 * (n - 1)], f1 = row[col::cost_first + 2 * (n - 1) + 1];
    if (p1 == p0) throw CaseSemanticError(fmt::format("degenerate piecewise cost for generator {}", gen_id));
    return (f1 - f0) / (p1 - p0);
  }
  throw CaseSemanticError(fmt::format("unknown gencost model {} for generator {}", model, gen_id));
}

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::size_t NetworkCase::bus_index(int bus_id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == bus_id) return i;
  }
  throw std::out_of_range(fmt::format("bus {} not in case", bus_id));
}

std::size_t NetworkCase::generator_index(int generator_id) const {
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].id == generator_id) return i;
  }
  throw std::out_of_range(fmt::format("generator {} not in case", generator_id));
}

int NetworkCase::slack_bus() const {
  for (const auto& b : buses) {
    if (b.is_slack) return b.id;
  }
  throw CaseSemanticError("case has no slack bus");
}

std::vector<std::size_t> NetworkCase::conventional_units() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].kind == GeneratorKind::conventional) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> NetworkCase::solar_units() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].kind == GeneratorKind::solar) out.push_back(i);
  }
  return out;
}

std::vector<double> NetworkCase::demand_vector() const {
  std::vector<double> d;
  d.reserve(loads.size());
  for (const auto& l : loads) d.push_back(l.demand);
  return d;
}

void NetworkCase::validate() const {
  if (buses.empty()) throw CaseSemanticError("case has no buses");
  std::map<int, std::size_t> index;
  int slacks = 0;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (!index.emplace(buses[i].id, i).second) throw CaseSemanticError(fmt::format("duplicate bus id {}", buses[i].id));
    slacks += buses[i].is_slack ? 1 : 0;
  }
  if (slacks != 1) throw CaseSemanticError(fmt::format("case must have exactly one slack bus, found {}", slacks));

  auto require_bus = [&](int id, const std::string& who) {
    if (!index.count(id)) throw CaseSemanticError(fmt::format("{} references unknown bus {}", who, id));
  };
  for (const auto& br : branches) {
    const std::string who = fmt::format("branch {}", br.id);
    require_bus(br.from_bus, who);
    require_bus(br.to_bus, who);
    if (br.from_bus == br.to_bus) throw CaseSemanticError(who + " connects a bus to itself");
    if (!(br.reactance > 0.0)) throw CaseSemanticError(fmt::format("{} has non-positive reactance {}", who, br.reactance));
    if (br.flow_limit < 0.0) throw CaseSemanticError(who + " has a negative flow limit");
  }
  for (const auto& g : generators) {
    const std::string who = fmt::format("generator {}", g.id);
    require_bus(g.bus, who);
    if (!(g.p_min >= 0.0 && g.p_min <= g.p_max)) {
      throw CaseSemanticError(fmt::format("{} violates 0 <= p_min <= p_max ({}, {})", who, g.p_min, g.p_max));
    }
    if (!(g.marginal_cost >= 0.0)) throw CaseSemanticError(who + " has a negative marginal cost");
  }
  for (const auto& l : loads) {
    const std::string who = fmt::format("load {}", l.id);
    require_bus(l.bus, who);
    if (!(l.demand >= 0.0)) throw CaseSemanticError(who + " has negative demand");
    if (!(l.shed_cost >= 0.0)) throw CaseSemanticError(who + " has a negative shed cost");
  }

  // Single island.
  std::vector<std::vector<std::size_t>> adj(buses.size());
  for (const auto& br : branches) {
    auto a = index.at(br.from_bus), b = index.at(br.to_bus);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(buses.size(), 0);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  if (reached != buses.size()) {
    auto it = std::find(seen.begin(), seen.end(), 0);
    throw CaseSemanticError(fmt::format("network is disconnected: bus {} is not reachable from bus {}",
                                        buses[static_cast<std::size_t>(it - seen.begin())].id, buses[0].id));
  }
}

NetworkCase parse_case(std::string_view text, const CaseOptions& options) {
  CaseLexer lex(text);
  lex.parse();

  const Matrix& bus = require_matrix(lex, "bus", 3);
  const Matrix& gen = require_matrix(lex, "gen", 10);
  const Matrix& branch = require_matrix(lex, "branch", 6);
  const Matrix& gencost = require_matrix(lex, "gencost", 5);

  NetworkCase nc;
  nc.base_mva = lex.base_mva.value_or(100.0);

  for (const auto& row : bus.rows) {
    Bus b;
    b.id = as_id(row[col::bus_i], "bus id");
    b.is_slack = static_cast<int>(row[col::bus_type]) == kRefBusType;
    nc.buses.push_back(b);
    if (row[col::pd] > 0.0) {
      LoadPoint l;
      l.id = static_cast<int>(nc.loads.size()) + 1;
      l.bus = b.id;
      l.demand = row[col::pd];
      nc.loads.push_back(l);
    }
  }

  for (std::size_t i = 0; i < branch.rows.size(); ++i) {
    const auto& row = branch.rows[i];
    if (row.size() > col::br_status && row[col::br_status] <= 0.0) continue;
    Branch br;
    br.id = static_cast<int>(i) + 1;
    br.from_bus = as_id(row[col::f_bus], "branch from-bus");
    br.to_bus = as_id(row[col::t_bus], "branch to-bus");
    br.reactance = row[col::br_x];
    br.flow_limit = row[col::rate_a];
    nc.branches.push_back(br);
  }

  if (gencost.rows.size() < gen.rows.size()) {
    throw CaseSemanticError(
        fmt::format("mpc.gencost has {} rows for {} generators", gencost.rows.size(), gen.rows.size()));
  }
  for (std::size_t i = 0; i < gen.rows.size(); ++i) {
    const auto& row = gen.rows[i];
    if (row[col::gen_status] <= 0.0) continue;
    Generator g;
    g.id = static_cast<int>(i) + 1;
    g.bus = as_id(row[col::gen_bus], "generator bus");
    g.p_max = row[col::pmax];
    g.p_min = row[col::pmin];
    g.marginal_cost = linearize_cost(gencost.rows[i], g, options.linearization, g.id);
    nc.generators.push_back(g);
  }

  double shed_cost = 0.0;
  if (options.shed_cost) {
    shed_cost = *options.shed_cost;
  } else {
    double max_cost = 0.0;
    for (const auto& g : nc.generators) max_cost = std::max(max_cost, g.marginal_cost);
    shed_cost = options.shed_cost_multiplier * max_cost;
  }
  for (auto& l : nc.loads) l.shed_cost = shed_cost;

  nc.validate();
  return nc;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NetworkCase load_case_file(const std::string& path, const CaseOptions& options) {
  const std::string text = read_text_file(path);
  try {
    return parse_case(text, options);
  } catch (const CaseSyntaxError& e) {
    throw CaseSyntaxError(fmt::format("{}: {}", path, e.what()), e.line(), e.column());
  } catch (const CaseSemanticError& e) {
    throw CaseSemanticError(fmt::format("{}: {}", path, e.what()));
  }
}

NetworkCase designate_solar(const NetworkCase& network, const std::vector<int>& generator_ids) {
  NetworkCase out = network;
  std::set<int> seen;
  for (int id : generator_ids) {
    if (!seen.insert(id).second) throw std::invalid_argument(fmt::format("generator {} selected twice", id));
    std::size_t idx = 0;
    try {
      idx = out.generator_index(id);
    } catch (const std::out_of_range&) {
      throw std::invalid_argument(fmt::format("unknown generator id {} in solar selection", id));
    }
    auto& g = out.generators[idx];
    g.kind = GeneratorKind::solar;
    g.rated_capacity = g.p_max;
  }
  return out;
}

std::vector<int> parse_solar_selection(std::string_view text) {
  std::vector<int> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string_view tok(line.data() + first, last - first + 1);
    int id = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw std::invalid_argument(fmt::format("solar selection line {}: '{}' is not a generator id", lineno, tok));
    }
    ids.push_back(id);
  }
  return ids;
}

std::vector<int> load_solar_selection_file(const std::string& path) {
  return parse_solar_selection(read_text_file(path));
}

std::vector<int> default_solar_selection(const NetworkCase& network, std::size_t count, double total_mw) {
  std::vector<int> ids;
  if (count == 0) return ids;
  const double unit = total_mw / static_cast<double>(count);
  std::vector<const Generator*> gens;
  for (const auto& g : network.generators) gens.push_back(&g);
  std::sort(gens.begin(), gens.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const auto* g : gens) {
    if (std::abs(g->p_max - unit) <= 1e-9 * std::max(1.0, unit)) ids.push_back(g->id);
    if (ids.size() == count) return ids;
  }
  throw std::invalid_argument(
      fmt::format("case has only {} generators with p_max = {} MW, {} requested", ids.size(), unit, count));
}

CaseSummary case_summary(const NetworkCase& network) {
  CaseSummary s;
  s.bus_count = network.buses.size();
  s.branch_count = network.branches.size();
  s.limited_branch_count = static_cast<std::size_t>(
      std::count_if(network.branches.begin(), network.branches.end(), [](const Branch& b) { return !b.unlimited(); }));
  s.generator_count = network.generators.size();
  s.load_count = network.loads.size();
  for (const auto& l : network.loads) s.total_demand += l.demand;
  for (const auto& g : network.generators) {
    if (g.kind == GeneratorKind::solar) {
      ++s.solar_count;
      s.solar_capacity += g.rated_capacity;
    } else {
      s.conventional_capacity += g.p_max;
    }
  }
  s.total_capacity = s.conventional_capacity + s.solar_capacity;
  return s;
}

std::uint64_t case_fingerprint(const NetworkCase& network) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix_d = [&](double v) { h = fnv_mix(h, std::bit_cast<std::uint64_t>(v)); };
  auto mix_i = [&](long long v) { h = fnv_mix(h, static_cast<std::uint64_t>(v)); };
  mix_d(network.base_mva);
  for (const auto& b : network.buses) {
    mix_i(b.id);
    mix_i(b.is_slack);
  }
  for (const auto& br : network.branches) {
    mix_i(br.id);
    mix_i(br.from_bus);
    mix_i(br.to_bus);
    mix_d(br.reactance);
    mix_d(br.flow_limit);
  }
  for (const auto& g : network.generators) {
    mix_i(g.id);
    mix_i(g.bus);
    mix_d(g.p_min);
    mix_d(g.p_max);
    mix_d(g.marginal_cost);
    mix_i(static_cast<int>(g.kind));
    mix_d(g.rated_capacity);
  }
  for (const auto& l : network.loads) {
    mix_i(l.id);
    mix_i(l.bus);
    mix_d(l.demand);
    mix_d(l.shed_cost);
  }
  return h;
}

}  // namespace solarlr
