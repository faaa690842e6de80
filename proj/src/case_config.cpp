#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "pbe_djm/cli_reports.hpp"
#include "pbe_djm/error.hpp"

namespace pbe {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_top_level(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == sep && depth == 0) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(s.substr(start)));
  return parts;
}

// Recursive-descent parser for initial data.
class InitialParser {
 public:
  explicit InitialParser(std::string_view text) {
    for (char ch : text)
      if (!std::isspace(static_cast<unsigned char>(ch))) src_.push_back(ch);
  }

  Expr parse() {
    std::vector<Term> raw;
    bool negate = false;
    if (accept('+')) {
    } else if (accept('-')) {
      negate = true;
    }
    raw.push_back(term(negate));
    while (pos_ < src_.size()) {
      if (accept('+'))
        raw.push_back(term(false));
      else if (accept('-'))
        raw.push_back(term(true));
      else
        fail("expected '+' or '-'");
    }
    return normalize(std::move(raw));
  }

 private:
  Term term(bool negate) {
    Term t{Rational(negate ? -1 : 1), 0, 0, 0, Rational(0), DistFactor::One};
    factor(t);
    while (accept('*')) factor(t);
    return t;
  }

  void factor(Term& t) {
    if (consume("exp(-")) {
      Rational rate = 1;
      if (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
        rate = number();
        accept('*');
      }
      if (!consume("u)")) fail("expected 'u)' closing exp(");
      t.exp_rate += rate;
    } else if (consume("delta(u-r)")) {
      set_dist(t, DistFactor::DiracAtR);
    } else if (consume("theta(r-u)")) {
      set_dist(t, DistFactor::ThetaBelowR);
    } else if (accept('u')) {
      t.u_pow += power();
    } else if (accept('r')) {
      t.r_pow += power();
    } else if (accept('-')) {
      t.coeff *= -number();
    } else {
      t.coeff *= number();
    }
  }

  void set_dist(Term& t, DistFactor d) {
    if (t.dist != DistFactor::One) fail("more than one distributional factor");
    t.dist = d;
  }

  unsigned power() {
    if (!accept('^')) return 1;
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail("expected exponent");
    return static_cast<unsigned>(std::stoul(src_.substr(start, pos_ - start)));
  }

  Rational number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' || src_[pos_] == '/'))
      ++pos_;
    if (start == pos_) fail("unexpected token");
    return parse_rational(src_.substr(start, pos_ - start));
  }

  bool accept(char ch) {
    if (pos_ < src_.size() && src_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool consume(std::string_view word) {
    if (src_.compare(pos_, word.size(), word) == 0) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::InvalidConfig, "initial data '" + src_ + "' at offset " + std::to_string(pos_) + ": " + why);
  }

  std::string src_;
  std::size_t pos_ = 0;
};

[[noreturn]] void config_error(std::size_t line, std::string_view key, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig,
              "line " + std::to_string(line) + ", key '" + std::string(key) + "': " + why);
}

void parse_problem(CaseConfig& config, std::string_view value, std::size_t line) {
  if (value.substr(0, 7) == "custom(" && value.back() == ')') {
    config.example_id = 0;
    bool have_initial = false;
    for (auto part : split_top_level(value.substr(7, value.size() - 8), ',')) {
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) config_error(line, "problem", "expected name=value in custom(...)");
      const auto name = trim(part.substr(0, eq));
      const auto v = trim(part.substr(eq + 1));
      if (name == "k") {
        try {
          config.selection_power = static_cast<unsigned>(std::stoul(std::string(v)));
        } catch (const std::exception&) {
          config_error(line, "problem", "k must be a positive integer");
        }
      } else if (name == "aggregation") {
        if (v == "none")
          config.aggregation = Aggregation::None;
        else if (v == "constant")
          config.aggregation = Aggregation::ConstantUnit;
        else
          config_error(line, "problem", "aggregation must be none or constant");
      } else if (name == "initial") {
        config.initial = parse_initial(v);
        have_initial = true;
      } else {
        config_error(line, "problem", "unknown field '" + std::string(name) + "'");
      }
    }
    if (!have_initial) config_error(line, "problem", "custom problem needs initial=...");
    return;
  }
  int id = 0;
  try {
    id = std::stoi(std::string(value));
  } catch (const std::exception&) {
    config_error(line, "problem", "expected 1..6 or custom(...)");
  }
  if (id < 1 || id > 6) config_error(line, "problem", "reference problems are 1..6");
  config.example_id = id;
}

Rational parse_value(std::string_view value, std::size_t line, std::string_view key) {
  try {
    return parse_rational(value);
  } catch (const Error& e) {
    config_error(line, key, e.what());
  }
}

}  // namespace

std::string_view to_string(OutputKind kind) {
  switch (kind) {
    case OutputKind::Density: return "density";
    case OutputKind::ErrorTable: return "error_table";
    case OutputKind::Moments: return "moments";
    case OutputKind::OracleCompare: return "oracle_compare";
  }
  return "?";
}

std::optional<OutputKind> parse_output_kind(std::string_view text) {
  for (auto k : {OutputKind::Density, OutputKind::ErrorTable, OutputKind::Moments, OutputKind::OracleCompare})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

Expr parse_initial(std::string_view text) { return InitialParser(text).parse(); }

std::string format_initial(const Expr& e) { return e.to_string(); }

ProblemSpec CaseConfig::problem() const {
  if (example_id != 0) return example_problem(example_id);
  return make_problem(selection_power, aggregation, initial);
}

std::vector<Rational> CaseConfig::u_grid() const {
  std::vector<Rational> grid;
  if (u_step <= 0) return grid;
  for (Rational u = u_min; u <= u_max; u += u_step) grid.push_back(u);
  return grid;
}

unsigned CaseConfig::max_terms() const {
  unsigned m = 0;
  for (unsigned n : n_terms) m = std::max(m, n);
  return m;
}

CaseConfig parse_config(std::string_view text) {
  CaseConfig config;
  config.n_terms.clear();
  std::set<std::string> seen;
  bool have_problem = false;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(line_no, line, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) config_error(line_no, key, "empty value");

    const bool list_key = key == "n_terms" || key == "t_values" || key == "outputs";
    if (!list_key && !seen.insert(key).second) config_error(line_no, key, "repeated scalar key");

    if (key == "case_name") {
      config.case_name = std::string(value);
    } else if (key == "problem") {
      parse_problem(config, value, line_no);
      have_problem = true;
    } else if (key == "n_terms") {
      for (auto item : split_top_level(value, ',')) {
        const Rational q = parse_value(item, line_no, key);
        if (q.get_den() != 1 || q < 0) config_error(line_no, key, "expected a nonnegative integer");
        config.n_terms.push_back(static_cast<unsigned>(q.get_num().get_ui()));
      }
    } else if (key == "t_values") {
      for (auto item : split_top_level(value, ',')) {
        const Rational q = parse_value(item, line_no, key);
        if (q < 0) config_error(line_no, key, "times must be nonnegative");
        config.t_values.push_back(q);
      }
    } else if (key == "outputs") {
      for (auto item : split_top_level(value, ',')) {
        auto kind = parse_output_kind(item);
        if (!kind) config_error(line_no, key, "unknown output '" + std::string(item) + "'");
        config.outputs.push_back(*kind);
      }
    } else if (key == "u_min") {
      config.u_min = parse_value(value, line_no, key);
    } else if (key == "u_max") {
      config.u_max = parse_value(value, line_no, key);
    } else if (key == "u_step") {
      config.u_step = parse_value(value, line_no, key);
      if (config.u_step <= 0) config_error(line_no, key, "step must be positive");
    } else if (key == "r_value") {
      config.r_value = parse_value(value, line_no, key);
      if (*config.r_value <= 0) config_error(line_no, key, "radius must be positive");
    } else if (key == "oracle_u_max") {
      config.oracle_u_max = parse_value(value, line_no, key);
    } else if (key == "oracle_cells") {
      const Rational q = parse_value(value, line_no, key);
      if (q.get_den() != 1 || q <= 0) config_error(line_no, key, "expected a positive integer");
      config.oracle_cells = static_cast<unsigned>(q.get_num().get_ui());
    } else if (key == "oracle_dt") {
      config.oracle_dt = parse_value(value, line_no, key);
    } else {
      config_error(line_no, key, "unknown key");
    }
    if (end == text.size()) break;
  }

  if (!have_problem) config_error(line_no, "problem", "missing");
  if (config.n_terms.empty()) config_error(line_no, "n_terms", "missing");
  if (config.u_min > config.u_max) config_error(line_no, "u_min", "exceeds u_max");
  const ProblemSpec spec = config.problem();
  if (spec.has_radius != config.r_value.has_value())
    config_error(line_no, "r_value", spec.has_radius ? "required for delta initial data" : "not used by this problem");
  if (spec.has_radius && config.u_min <= 0) config_error(line_no, "u_min", "must be positive with delta initial data");
  return config;
}

CaseConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string emit_config(const CaseConfig& config) {
  std::ostringstream os;
  os << "case_name = " << config.case_name << '\n';
  if (config.example_id != 0) {
    os << "problem = " << config.example_id << '\n';
  } else {
    os << "problem = custom(k=" << config.selection_power
       << ", aggregation=" << (config.aggregation == Aggregation::None ? "none" : "constant")
       << ", initial=" << format_initial(config.initial) << ")\n";
  }
  for (unsigned n : config.n_terms) os << "n_terms = " << n << '\n';
  for (const auto& t : config.t_values) os << "t_values = " << format_rational(t) << '\n';
  os << "u_min = " << format_rational(config.u_min) << '\n';
  os << "u_max = " << format_rational(config.u_max) << '\n';
  os << "u_step = " << format_rational(config.u_step) << '\n';
  if (config.r_value) os << "r_value = " << format_rational(*config.r_value) << '\n';
  for (auto kind : config.outputs) os << "outputs = " << to_string(kind) << '\n';
  os << "oracle_u_max = " << format_rational(config.oracle_u_max) << '\n';
  os << "oracle_cells = " << config.oracle_cells << '\n';
  os << "oracle_dt = " << format_rational(config.oracle_dt) << '\n';
  return os.str();
}

CaseConfig canonical_config(int example_id) {
  CaseConfig c;
  c.case_name = "example" + std::to_string(example_id);
  c.example_id = example_id;
  auto times = [](std::initializer_list<const char*> values) {
    std::vector<Rational> out;
    for (const char* v : values) out.push_back(parse_rational(v));
    return out;
  };
  switch (example_id) {
    case 1:
      c.n_terms = {10, 15, 20, 25, 100};
      c.t_values = times({"0.4", "0.8", "0.9", "1.2", "1.6"});
      c.outputs = {OutputKind::Density, OutputKind::ErrorTable, OutputKind::Moments};
      break;
    case 2:
      c.n_terms = {10, 15, 20, 25};
      c.t_values = times({"0.01", "0.04", "0.07", "0.1"});
      c.outputs = {OutputKind::Density, OutputKind::ErrorTable, OutputKind::Moments};
      break;
    case 3:
    case 4:
      c.n_terms = {5, 10, 15, 20};
      c.t_values = example_id == 3 ? times({"0.1", "0.3", "0.5", "1"}) : times({"0.05", "0.1", "0.3", "0.5"});
      c.u_max = 2;
      c.r_value = Rational(1);
      c.outputs = {OutputKind::Density, OutputKind::ErrorTable, OutputKind::Moments};
      break;
    case 5:
      c.n_terms = {4, 5};
      c.t_values = times({"0", "0.1", "0.2", "0.4"});
      c.outputs = {OutputKind::Density, OutputKind::Moments, OutputKind::OracleCompare};
      break;
    case 6:
      c.n_terms = {3, 4};
      c.t_values = times({"0", "0.2", "0.4"});
      c.outputs = {OutputKind::Density, OutputKind::Moments, OutputKind::OracleCompare};
      break;
    default:
      throw Error(ErrorCode::UnknownExample, "no reference problem " + std::to_string(example_id));
  }
  return c;
}

}  // namespace pbe
