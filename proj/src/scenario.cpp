#include "uncertainty/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "uncertainty/error.hpp"
#include "uncertainty/format.hpp"

namespace uncertainty {

std::string_view to_string(OutputFormat f) noexcept { return f == OutputFormat::Csv ? "csv" : "jsonl"; }

std::string_view task_kind_name(const TaskKind& task) noexcept {
  switch (task.index()) {
    case 0: return "stats";
    case 1: return "classify";
    case 2: return "fluctuation_sample";
    case 3: return "clt_study";
    default: return "time_window";
  }
}

bool is_stochastic(const TaskKind& task) noexcept {
  return std::holds_alternative<FluctuationSampleTask>(task) || std::holds_alternative<CltStudyTask>(task);
}

const StateDecl* Scenario::find_state(std::string_view name) const noexcept {
  for (const auto& s : states) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const EnsembleDecl* Scenario::find_ensemble(std::string_view name) const noexcept {
  for (const auto& e : ensembles) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

Grid make_scenario_grid(const Scenario& s) { return make_grid(s.grid.x_min, s.grid.x_max, s.grid.n_points); }

Ensemble build_declared_ensemble(const Scenario& s, const EnsembleDecl& decl, const Grid& grid, const UnitSystem& units) {
  std::vector<GroupSpec> groups;
  const bool counted = !decl.groups.empty() && !decl.groups.front().counts.empty();
  EnsembleCounts counts;
  for (const auto& g : decl.groups) {
    GroupSpec spec;
    spec.weight = g.weight;
    std::uint64_t group_total = 0;
    for (std::size_t c = 0; c < g.states.size(); ++c) {
      const StateDecl* state = s.find_state(g.states[c]);
      if (state == nullptr) throw Error(ErrorCode::UnknownReference, g.states[c]);
      ComponentSpec component{build_state(state->recipe, grid, units), std::nullopt, 0};
      if (!g.weights.empty()) component.weight = g.weights.at(c);
      spec.components.push_back(std::move(component));
    }
    if (counted) {
      for (std::uint64_t n : g.counts) group_total += n;
      counts.group_totals.push_back(group_total);
      counts.component_counts.push_back(g.counts);
      counts.total += group_total;
    }
    groups.push_back(std::move(spec));
  }
  if (!counted) return build_ensemble(std::move(groups), units);
  if (decl.total) counts.total = *decl.total;
  return build_ensemble(std::move(groups), units, counts);
}

namespace {

// ---------------------------------------------------------------------------
// lexical layer

struct Item {
  std::string text;
  bool quoted = false;
  int column = 0;
};

struct Entry {
  std::string key;
  std::vector<Item> items;
  int line = 0;
  int column = 0;
};

struct Section {
  std::string kind;
  std::string arg;
  int line = 0;
  std::vector<Entry> entries;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

bool is_valid_name(std::string_view s) { return !s.empty() && std::all_of(s.begin(), s.end(), is_name_char); }

bool is_valid_key(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

// Column numbers are 1-based byte offsets.
std::vector<Item> split_value(std::string_view value, int line, int first_column) {
  std::vector<Item> items;
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < value.size() && (value[pos] == ' ' || value[pos] == '\t')) ++pos;
  };
  while (true) {
    skip_space();
    Item item;
    item.column = first_column + static_cast<int>(pos);
    if (pos < value.size() && value[pos] == '"') {
      item.quoted = true;
      ++pos;
      bool closed = false;
      while (pos < value.size()) {
        const char c = value[pos++];
        if (c == '\\' && pos < value.size()) {
          item.text += value[pos++];
        } else if (c == '"') {
          closed = true;
          break;
        } else {
          item.text += c;
        }
      }
      if (!closed) throw ParseError(line, item.column, "unterminated string");
      skip_space();
    } else {
      const std::size_t start = pos;
      while (pos < value.size() && value[pos] != ',') ++pos;
      std::string_view raw = value.substr(start, pos - start);
      while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t')) raw.remove_suffix(1);
      if (raw.empty()) throw ParseError(line, item.column, "empty list element");
      if (raw.find('"') != std::string_view::npos) throw ParseError(line, item.column, "stray quote in value");
      item.text = std::string(raw);
    }
    items.push_back(std::move(item));
    if (pos >= value.size()) break;
    if (value[pos] != ',') throw ParseError(line, first_column + static_cast<int>(pos), "expected ',' between values");
    ++pos;
  }
  return items;
}

std::vector<Section> lex(std::string_view text) {
  std::vector<Section> sections;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    const bool last = end == text.size();
    start = end + 1;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    // strip comment outside quotes
    bool in_quote = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '\\' && in_quote) {
        ++k;
      } else if (line[k] == '"') {
        in_quote = !in_quote;
      } else if (line[k] == '#' && !in_quote) {
        line = line.substr(0, k);
        break;
      }
    }
    std::size_t first = 0;
    while (first < line.size() && (line[first] == ' ' || line[first] == '\t')) ++first;
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    if (first >= line.size()) {
      if (last) break;
      continue;
    }
    const int column = static_cast<int>(first) + 1;

    if (line[first] == '[') {
      if (line.back() != ']') throw ParseError(line_no, static_cast<int>(line.size()), "section header must end with ']'");
      std::istringstream words(std::string(line.substr(first + 1, line.size() - first - 2)));
      Section section;
      section.line = line_no;
      words >> section.kind >> section.arg;
      std::string extra;
      if (words >> extra) throw ParseError(line_no, column, "section header takes at most one argument");
      if (section.kind.empty()) throw ParseError(line_no, column, "empty section header");
      sections.push_back(std::move(section));
    } else {
      const std::size_t eq = line.find('=', first);
      if (eq == std::string_view::npos) throw ParseError(line_no, column, "expected 'key = value'");
      std::string_view key = line.substr(first, eq - first);
      while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.remove_suffix(1);
      if (!is_valid_key(key)) throw ParseError(line_no, column, "invalid key '" + std::string(key) + "'");
      std::size_t value_start = eq + 1;
      while (value_start < line.size() && (line[value_start] == ' ' || line[value_start] == '\t')) ++value_start;
      if (value_start >= line.size()) throw ParseError(line_no, static_cast<int>(eq) + 2, "missing value");
      if (sections.empty()) throw ParseError(line_no, column, "key outside of any section");
      Entry entry{std::string(key), split_value(line.substr(value_start), line_no, static_cast<int>(value_start) + 1),
                  line_no, column};
      for (const auto& existing : sections.back().entries) {
        if (existing.key == entry.key) throw ParseError(line_no, column, "duplicate key '" + entry.key + "'");
      }
      sections.back().entries.push_back(std::move(entry));
    }
    if (last) break;
  }
  return sections;
}

// ---------------------------------------------------------------------------
// typed access to a section's entries

class SectionReader {
 public:
  explicit SectionReader(const Section& s) : section_(s) {}

  const Section& section() const { return section_; }

  const Entry* find(const std::string& key) {
    for (const auto& e : section_.entries) {
      if (e.key == key) {
        used_.insert(key);
        return &e;
      }
    }
    return nullptr;
  }

  const Entry& require(const std::string& key) {
    const Entry* e = find(key);
    if (e == nullptr) {
      throw ParseError(section_.line, 1, "section [" + header() + "] is missing key '" + key + "'");
    }
    return *e;
  }

  void mark_used(const std::string& key) { used_.insert(key); }

  void reject_unknown() const {
    for (const auto& e : section_.entries) {
      if (!used_.count(e.key)) throw ParseError(e.line, e.column, "unknown key '" + e.key + "' in [" + header() + "]");
    }
  }

  std::string header() const { return section_.arg.empty() ? section_.kind : section_.kind + " " + section_.arg; }

 private:
  const Section& section_;
  std::set<std::string> used_;
};

const Item& single(const Entry& e) {
  if (e.items.size() != 1) throw ParseError(e.line, e.column, "key '" + e.key + "' takes a single value");
  return e.items.front();
}

double to_real(const Entry& e, const Item& item) {
  if (item.quoted) throw ParseError(e.line, item.column, "expected a number, got a string");
  double value = 0.0;
  const char* begin = item.text.data();
  const char* end = begin + item.text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError(e.line, item.column, "invalid number '" + item.text + "'");
  }
  return value;
}

std::uint64_t to_unsigned(const Entry& e, const Item& item) {
  if (item.quoted) throw ParseError(e.line, item.column, "expected an integer, got a string");
  std::uint64_t value = 0;
  const char* begin = item.text.data();
  const char* end = begin + item.text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(e.line, item.column, "invalid non-negative integer '" + item.text + "'");
  return value;
}

std::int64_t to_signed(const Entry& e, const Item& item) {
  if (item.quoted) throw ParseError(e.line, item.column, "expected an integer, got a string");
  std::int64_t value = 0;
  const char* begin = item.text.data();
  const char* end = begin + item.text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(e.line, item.column, "invalid integer '" + item.text + "'");
  return value;
}

double real_value(const Entry& e) { return to_real(e, single(e)); }
std::uint64_t unsigned_value(const Entry& e) { return to_unsigned(e, single(e)); }

int int_value(const Entry& e) {
  const std::int64_t v = to_signed(e, single(e));
  if (v < INT32_MIN || v > INT32_MAX) throw ParseError(e.line, e.items.front().column, "integer out of range");
  return static_cast<int>(v);
}

std::string word_value(const Entry& e) { return single(e).text; }

std::string name_value(const Entry& e) {
  const Item& item = single(e);
  if (!is_valid_name(item.text)) throw ParseError(e.line, item.column, "invalid name '" + item.text + "'");
  return item.text;
}

std::vector<double> real_list(const Entry& e) {
  std::vector<double> out;
  for (const auto& item : e.items) out.push_back(to_real(e, item));
  return out;
}

std::vector<std::uint64_t> unsigned_list(const Entry& e) {
  std::vector<std::uint64_t> out;
  for (const auto& item : e.items) out.push_back(to_unsigned(e, item));
  return out;
}

std::vector<std::string> name_list(const Entry& e) {
  std::vector<std::string> out;
  for (const auto& item : e.items) {
    if (!is_valid_name(item.text)) throw ParseError(e.line, item.column, "invalid name '" + item.text + "'");
    out.push_back(item.text);
  }
  return out;
}

double real_or(SectionReader& r, const std::string& key, double fallback) {
  const Entry* e = r.find(key);
  return e ? real_value(*e) : fallback;
}

// ---------------------------------------------------------------------------
// section interpreters

class Interpreter {
 public:
  Scenario run(const std::vector<Section>& sections) {
    for (const auto& section : sections) dispatch(section);
    if (!saw_grid_) throw ParseError(1, 1, "scenario has no [grid] section");
    validate();
    return std::move(scenario_);
  }

 private:
  void dispatch(const Section& section) {
    const std::string& kind = section.kind;
    auto require_arg = [&](bool wanted) {
      if (wanted && section.arg.empty()) throw ParseError(section.line, 1, "[" + kind + "] needs a name");
      if (!wanted && !section.arg.empty()) throw ParseError(section.line, 1, "[" + kind + "] takes no argument");
      if (!section.arg.empty() && !is_valid_name(section.arg)) {
        throw ParseError(section.line, 1, "invalid name '" + section.arg + "'");
      }
    };
    auto once = [&](bool& seen) {
      if (seen) throw ParseError(section.line, 1, "duplicate [" + kind + "] section");
      seen = true;
    };
    if (kind == "scenario") {
      once(saw_scenario_);
      if (!section.arg.empty()) require_arg(true);
      scenario_section(section);
    } else if (kind == "grid") {
      require_arg(false);
      once(saw_grid_);
      grid_section(section);
    } else if (kind == "units") {
      require_arg(false);
      once(saw_units_);
      units_section(section);
    } else if (kind == "state") {
      require_arg(true);
      declare(section);
      state_section(section);
    } else if (kind == "ensemble") {
      require_arg(true);
      declare(section);
      ensemble_section(section);
    } else if (kind == "task") {
      if (!section.arg.empty()) require_arg(true);
      task_section(section);
    } else {
      throw ParseError(section.line, 2, "unknown section kind '" + kind + "'");
    }
  }

  void declare(const Section& section) {
    if (!names_.insert(section.arg).second) {
      throw ParseError(section.line, 1, "name '" + section.arg + "' is declared twice");
    }
  }

  void scenario_section(const Section& section) {
    SectionReader r(section);
    if (!section.arg.empty()) scenario_.name = section.arg;
    if (const Entry* e = r.find("format")) {
      const std::string f = word_value(*e);
      if (f == "csv") {
        scenario_.format = OutputFormat::Csv;
      } else if (f == "jsonl") {
        scenario_.format = OutputFormat::JsonLines;
      } else {
        throw ParseError(e->line, e->items.front().column, "format must be csv or jsonl");
      }
    }
    r.reject_unknown();
  }

  void grid_section(const Section& section) {
    SectionReader r(section);
    scenario_.grid.x_min = real_value(r.require("x_min"));
    scenario_.grid.x_max = real_value(r.require("x_max"));
    scenario_.grid.n_points = unsigned_value(r.require("n_points"));
    r.reject_unknown();
    grid_line_ = section.line;
  }

  void units_section(const Section& section) {
    SectionReader r(section);
    scenario_.hbar = real_value(r.require("hbar"));
    r.reject_unknown();
    units_line_ = section.line;
  }

  void state_section(const Section& section) {
    SectionReader r(section);
    StateDecl decl;
    decl.name = section.arg;
    const Entry& kind_entry = r.require("kind");
    const std::string kind = word_value(kind_entry);
    if (kind == "gaussian") {
      GaussianPacket g;
      g.x0 = real_or(r, "x0", 0.0);
      g.p0 = real_or(r, "p0", 0.0);
      g.sigma = real_value(r.require("sigma"));
      decl.recipe.variant = g;
    } else if (kind == "harmonic") {
      HarmonicEigenstate h;
      h.n = int_value(r.require("n"));
      h.mass = real_or(r, "mass", 1.0);
      h.omega = real_or(r, "omega", 1.0);
      decl.recipe.variant = h;
    } else if (kind == "superposition") {
      const Entry& terms = r.require("terms");
      decl.term_names = name_list(terms);
      Superposition sp;
      for (std::size_t t = 0; t < decl.term_names.size(); ++t) {
        const StateDecl* ref = scenario_.find_state(decl.term_names[t]);
        if (ref == nullptr) {
          throw Error(ErrorCode::UnknownReference, "'" + decl.term_names[t] + "' (line " + std::to_string(terms.line) +
                                                       "; superposition terms must name earlier states)");
        }
        sp.terms.push_back(ref->recipe);
      }
      std::vector<double> re(decl.term_names.size(), 1.0);
      std::vector<double> im(decl.term_names.size(), 0.0);
      if (const Entry* e = r.find("coefficients")) re = real_list(*e);
      if (const Entry* e = r.find("coefficients_imag")) im = real_list(*e);
      if (re.size() != decl.term_names.size() || im.size() != decl.term_names.size()) {
        throw ParseError(terms.line, terms.column, "coefficient lists must match the number of terms");
      }
      for (std::size_t t = 0; t < re.size(); ++t) sp.coefficients.emplace_back(re[t], im[t]);
      decl.recipe.variant = std::move(sp);
    } else {
      throw ParseError(kind_entry.line, kind_entry.items.front().column, "unknown state kind '" + kind + "'");
    }
    r.reject_unknown();
    scenario_.states.push_back(std::move(decl));
    lines_[section.arg] = section.line;
  }

  void ensemble_section(const Section& section) {
    SectionReader r(section);
    EnsembleDecl decl;
    decl.name = section.arg;
    std::map<int, GroupDecl> groups;
    std::map<int, const Entry*> states_entries;
    for (const auto& e : section.entries) {
      if (e.key == "total") {
        decl.total = unsigned_value(e);
        r.mark_used(e.key);
        continue;
      }
      const std::string prefix = "group";
      const std::size_t dot = e.key.find('.');
      if (e.key.rfind(prefix, 0) != 0 || dot == std::string::npos || dot == prefix.size()) continue;
      const std::string index_text = e.key.substr(prefix.size(), dot - prefix.size());
      if (!std::all_of(index_text.begin(), index_text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
          index_text.size() > 6) {
        continue;
      }
      const int index = std::stoi(index_text);
      const std::string field = e.key.substr(dot + 1);
      GroupDecl& g = groups[index];
      if (field == "weight") {
        g.weight = real_value(e);
      } else if (field == "states") {
        g.states = name_list(e);
        states_entries[index] = &e;
      } else if (field == "weights") {
        g.weights = real_list(e);
      } else if (field == "counts") {
        g.counts = unsigned_list(e);
      } else {
        continue;
      }
      r.mark_used(e.key);
    }
    r.reject_unknown();
    if (groups.empty()) throw ParseError(section.line, 1, "ensemble '" + decl.name + "' declares no groups");

    int expected = 1;
    std::size_t counted = 0;
    for (auto& [index, g] : groups) {
      if (index != expected) {
        throw ParseError(section.line, 1, "ensemble groups must be numbered 1, 2, ... without gaps");
      }
      ++expected;
      const std::string label = "group" + std::to_string(index);
      if (g.states.empty()) throw ParseError(section.line, 1, label + " has no states");
      const Entry& se = *states_entries.at(index);
      for (const auto& name : g.states) {
        if (scenario_.find_state(name) == nullptr) {
          throw Error(ErrorCode::UnknownReference, "'" + name + "' (line " + std::to_string(se.line) + ")");
        }
      }
      if (!g.weights.empty() && g.weights.size() != g.states.size()) {
        throw ParseError(se.line, 1, label + ".weights must have one entry per state");
      }
      if (!g.counts.empty() && g.counts.size() != g.states.size()) {
        throw ParseError(se.line, 1, label + ".counts must have one entry per state");
      }
      if (g.weights.empty() && g.counts.empty()) {
        if (g.states.size() == 1) {
          g.weights = {1.0};
        } else {
          throw ParseError(se.line, 1, label + " needs weights or counts");
        }
      }
      if (!g.counts.empty()) ++counted;
      decl.groups.push_back(std::move(g));
    }
    if (counted != 0 && counted != decl.groups.size()) {
      throw ParseError(section.line, 1, "either every group carries counts or none does");
    }
    if (counted == 0 && decl.total) throw ParseError(section.line, 1, "'total' requires group counts");
    scenario_.ensembles.push_back(std::move(decl));
    lines_[section.arg] = section.line;
  }

  std::string reference(SectionReader& r, const std::string& key, bool allow_ensemble) {
    const Entry& e = r.require(key);
    const std::string name = name_value(e);
    const bool is_state = scenario_.find_state(name) != nullptr;
    const bool is_ensemble = scenario_.find_ensemble(name) != nullptr;
    if (!is_state && !(allow_ensemble && is_ensemble)) {
      if (is_ensemble) throw ParseError(e.line, e.items.front().column, "'" + name + "' is an ensemble; a state is required");
      throw Error(ErrorCode::UnknownReference, "'" + name + "' (line " + std::to_string(e.line) + ")");
    }
    return name;
  }

  void task_section(const Section& section) {
    SectionReader r(section);
    TaskDecl decl;
    decl.id = section.arg.empty() ? "task" + std::to_string(scenario_.tasks.size() + 1) : section.arg;
    for (const auto& t : scenario_.tasks) {
      if (t.id == decl.id) throw ParseError(section.line, 1, "duplicate task id '" + decl.id + "'");
    }
    const Entry& kind_entry = r.require("kind");
    const std::string kind = word_value(kind_entry);
    if (kind == "stats") {
      decl.task = StatsTask{reference(r, "state", false)};
    } else if (kind == "classify") {
      ClassifyTask t{reference(r, "target", true), real_or(r, "rel_tol", kDefaultClassifyTolerance)};
      if (!(t.rel_tol > 0.0)) throw ParseError(section.line, 1, "rel_tol must be positive");
      decl.task = t;
    } else if (kind == "fluctuation_sample") {
      FluctuationSampleTask t;
      t.source = reference(r, "source", false);
      const Entry& n = r.require("n");
      t.n = unsigned_value(n);
      if (t.n < 2) throw ParseError(n.line, n.items.front().column, "n must be at least 2");
      t.seed = unsigned_value(r.require("seed"));
      if (const Entry* e = r.find("samples")) t.samples_path = word_value(*e);
      decl.task = t;
    } else if (kind == "clt_study") {
      CltStudyTask t;
      const Entry& micro = r.require("micro");
      const std::string m = word_value(micro);
      if (m == "uniform") {
        t.micro = UniformMicro{real_value(r.require("a")), real_value(r.require("b"))};
      } else if (m == "two_point") {
        t.micro = TwoPointMicro{real_value(r.require("v1")), real_value(r.require("v2"))};
      } else if (m == "exponential") {
        t.micro = ExponentialMicro{real_value(r.require("lambda"))};
      } else {
        throw ParseError(micro.line, micro.items.front().column, "unknown micro-distribution '" + m + "'");
      }
      const Entry& ml = r.require("m_list");
      for (const auto& item : ml.items) {
        const std::int64_t v = to_signed(ml, item);
        if (v < 1 || v > INT32_MAX) throw ParseError(ml.line, item.column, "m_list entries must be positive");
        t.m_list.push_back(static_cast<int>(v));
      }
      const Entry& n = r.require("n");
      t.n = unsigned_value(n);
      if (t.n < 4) throw ParseError(n.line, n.items.front().column, "n must be at least 4");
      t.seed = unsigned_value(r.require("seed"));
      decl.task = t;
    } else if (kind == "time_window") {
      TimeWindowTask t;
      t.target = reference(r, "target", true);
      const Entry& pe = r.require("potential");
      const std::string p = word_value(pe);
      if (p == "harmonic") {
        t.potential = HarmonicPotential{real_or(r, "mass", 1.0), real_or(r, "omega", 1.0)};
      } else if (p == "free") {
        t.potential = FreeParticle{real_or(r, "mass", 1.0)};
      } else if (p == "tabulated") {
        t.potential = TabulatedPotential{real_list(r.require("values")), real_or(r, "mass", 1.0)};
      } else {
        throw ParseError(pe.line, pe.items.front().column, "unknown potential '" + p + "'");
      }
      decl.task = std::move(t);
    } else {
      throw ParseError(kind_entry.line, kind_entry.items.front().column, "unknown task kind '" + kind + "'");
    }
    r.reject_unknown();
    task_lines_.push_back(section.line);
    scenario_.tasks.push_back(std::move(decl));
  }

  template <class F>
  void at_line(int line, F&& f) {
    try {
      f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line) + ": " + e.message());
    }
  }

  void validate() {
    std::optional<Grid> grid;
    std::optional<UnitSystem> units;
    at_line(grid_line_, [&] { grid = make_scenario_grid(scenario_); });
    at_line(units_line_, [&] { units = UnitSystem(scenario_.hbar); });
    for (const auto& s : scenario_.states) {
      at_line(lines_.at(s.name), [&] { build_state(s.recipe, *grid, *units); });
    }
    for (const auto& e : scenario_.ensembles) {
      at_line(lines_.at(e.name), [&] { build_declared_ensemble(scenario_, e, *grid, *units); });
    }
    for (std::size_t t = 0; t < scenario_.tasks.size(); ++t) {
      if (const auto* tw = std::get_if<TimeWindowTask>(&scenario_.tasks[t].task)) {
        if (const auto* tab = std::get_if<TabulatedPotential>(&tw->potential); tab && tab->values.size() != grid->size()) {
          throw Error(ErrorCode::GridMismatch,
                      "line " + std::to_string(task_lines_[t]) + ": tabulated potential length differs from grid");
        }
      }
    }
  }

  Scenario scenario_;
  std::set<std::string> names_;
  std::map<std::string, int> lines_;
  std::vector<int> task_lines_;
  int grid_line_ = 1;
  int units_line_ = 1;
  bool saw_scenario_ = false;
  bool saw_grid_ = false;
  bool saw_units_ = false;
};

// ---------------------------------------------------------------------------
// writer

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

template <class T, class F>
std::string join(const std::vector<T>& values, F&& fmt) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ", ";
    out += fmt(values[k]);
  }
  return out;
}

std::string join_names(const std::vector<std::string>& names) {
  return join(names, [](const std::string& s) { return s; });
}

std::string join_reals(const std::vector<double>& values) { return join(values, format_real); }

template <class T>
std::string join_ints(const std::vector<T>& values) {
  return join(values, [](T v) { return std::to_string(v); });
}

}  // namespace

Scenario parse_scenario(std::string_view text) { return Interpreter().run(lex(text)); }

std::string to_text(const Scenario& s) {
  std::ostringstream out;
  out << "[scenario " << s.name << "]\n";
  out << "format = " << to_string(s.format) << "\n\n";
  out << "[grid]\n";
  out << "x_min = " << format_real(s.grid.x_min) << "\n";
  out << "x_max = " << format_real(s.grid.x_max) << "\n";
  out << "n_points = " << s.grid.n_points << "\n\n";
  out << "[units]\n";
  out << "hbar = " << format_real(s.hbar) << "\n";

  for (const auto& st : s.states) {
    out << "\n[state " << st.name << "]\n";
    if (const auto* g = std::get_if<GaussianPacket>(&st.recipe.variant)) {
      out << "kind = gaussian\n";
      out << "x0 = " << format_real(g->x0) << "\n";
      out << "p0 = " << format_real(g->p0) << "\n";
      out << "sigma = " << format_real(g->sigma) << "\n";
    } else if (const auto* h = std::get_if<HarmonicEigenstate>(&st.recipe.variant)) {
      out << "kind = harmonic\n";
      out << "n = " << h->n << "\n";
      out << "mass = " << format_real(h->mass) << "\n";
      out << "omega = " << format_real(h->omega) << "\n";
    } else {
      const auto& sp = std::get<Superposition>(st.recipe.variant);
      std::vector<double> re;
      std::vector<double> im;
      for (const auto& c : sp.coefficients) {
        re.push_back(c.real());
        im.push_back(c.imag());
      }
      out << "kind = superposition\n";
      out << "terms = " << join_names(st.term_names) << "\n";
      out << "coefficients = " << join_reals(re) << "\n";
      if (std::any_of(im.begin(), im.end(), [](double v) { return v != 0.0; })) {
        out << "coefficients_imag = " << join_reals(im) << "\n";
      }
    }
  }

  for (const auto& e : s.ensembles) {
    out << "\n[ensemble " << e.name << "]\n";
    if (e.total) out << "total = " << *e.total << "\n";
    for (std::size_t g = 0; g < e.groups.size(); ++g) {
      const GroupDecl& gd = e.groups[g];
      const std::string p = "group" + std::to_string(g + 1) + ".";
      if (gd.weight) out << p << "weight = " << format_real(*gd.weight) << "\n";
      out << p << "states = " << join_names(gd.states) << "\n";
      if (!gd.weights.empty()) out << p << "weights = " << join_reals(gd.weights) << "\n";
      if (!gd.counts.empty()) out << p << "counts = " << join_ints(gd.counts) << "\n";
    }
  }

  for (const auto& t : s.tasks) {
    out << "\n[task " << t.id << "]\n";
    out << "kind = " << task_kind_name(t.task) << "\n";
    if (const auto* st = std::get_if<StatsTask>(&t.task)) {
      out << "state = " << st->state << "\n";
    } else if (const auto* c = std::get_if<ClassifyTask>(&t.task)) {
      out << "target = " << c->target << "\n";
      out << "rel_tol = " << format_real(c->rel_tol) << "\n";
    } else if (const auto* f = std::get_if<FluctuationSampleTask>(&t.task)) {
      out << "source = " << f->source << "\n";
      out << "n = " << f->n << "\n";
      out << "seed = " << f->seed << "\n";
      if (f->samples_path) out << "samples = " << quote(*f->samples_path) << "\n";
    } else if (const auto* c = std::get_if<CltStudyTask>(&t.task)) {
      if (const auto* u = std::get_if<UniformMicro>(&c->micro)) {
        out << "micro = uniform\na = " << format_real(u->a) << "\nb = " << format_real(u->b) << "\n";
      } else if (const auto* tp = std::get_if<TwoPointMicro>(&c->micro)) {
        out << "micro = two_point\nv1 = " << format_real(tp->v1) << "\nv2 = " << format_real(tp->v2) << "\n";
      } else {
        out << "micro = exponential\nlambda = " << format_real(std::get<ExponentialMicro>(c->micro).lambda) << "\n";
      }
      out << "m_list = " << join_ints(c->m_list) << "\n";
      out << "n = " << c->n << "\n";
      out << "seed = " << c->seed << "\n";
    } else {
      const auto& tw = std::get<TimeWindowTask>(t.task);
      out << "target = " << tw.target << "\n";
      if (const auto* h = std::get_if<HarmonicPotential>(&tw.potential)) {
        out << "potential = harmonic\nmass = " << format_real(h->mass) << "\nomega = " << format_real(h->omega) << "\n";
      } else if (const auto* fp = std::get_if<FreeParticle>(&tw.potential)) {
        out << "potential = free\nmass = " << format_real(fp->mass) << "\n";
      } else {
        const auto& tab = std::get<TabulatedPotential>(tw.potential);
        out << "potential = tabulated\nmass = " << format_real(tab.mass) << "\n";
        out << "values = " << join_reals(tab.values) << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace uncertainty
