// gomc: check signatures, normalize terms, run matches and the BV prover.
//
// Exit status: 0 success, 1 negative result, 2 input error,
// 3 normalization divergence, 4 search bound reached.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gom/bv_prover.hpp"
#include "gom/corpus.hpp"
#include "gom/factory.hpp"
#include "gom/parser.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kDivergence = 3, kBound = 4 };

struct InputError {
  int status;
};

struct Source {
  std::string display;  // used as the file part of diagnostics
  std::string text;
  fs::path dir;         // imports are searched here first
};

std::optional<Source> read_source(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) {
    std::ifstream in(arg, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return Source{arg, buf.str(), fs::absolute(arg).parent_path()};
  }
  if (auto text = gom::corpus::builtin_module(arg)) return Source{arg, std::string(*text), {}};
  return std::nullopt;
}

void report(const std::string& file, gom::SourcePos pos, std::string_view code, const std::string& message) {
  std::cerr << file << ':' << pos.line << ':' << pos.column << ": " << code << ": " << message << '\n';
}

gom::SignatureModule parse_or_exit(const Source& src) {
  try {
    return gom::parse_module(src.text);
  } catch (const gom::SyntaxError& e) {
    report(src.display, e.pos(), "SyntaxError", e.detail());
    throw InputError{kInput};
  }
}

// Transitively loads the modules named in imports: `<dir>/<Name>.gom`, then
// `<dir>/<name>.gom`, then the embedded corpus.
std::vector<gom::SignatureModule> load_imports(const gom::SignatureModule& root, const Source& src) {
  std::vector<gom::SignatureModule> out;
  std::set<std::string> seen{root.name};
  std::vector<std::string> pending(root.imports.begin(), root.imports.end());
  while (!pending.empty()) {
    const std::string name = pending.back();
    pending.pop_back();
    if (!seen.insert(name).second) continue;
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::optional<Source> found;
    for (const auto& candidate : {src.dir / (name + ".gom"), src.dir / (lower + ".gom")}) {
      std::error_code ec;
      if (!src.dir.empty() && fs::is_regular_file(candidate, ec)) {
        found = read_source(candidate.string());
        break;
      }
    }
    if (!found) {
      if (auto text = gom::corpus::builtin_module(name)) found = Source{name, std::string(*text), {}};
    }
    if (!found) continue;  // resolve_imports reports it
    gom::SignatureModule m = parse_or_exit(*found);
    pending.insert(pending.end(), m.imports.begin(), m.imports.end());
    out.push_back(std::move(m));
  }
  return out;
}

struct Loaded {
  std::shared_ptr<const gom::SignatureModule> module;
  gom::ValidationReport report;
};

Loaded load(const std::string& arg) {
  auto src = read_source(arg);
  if (!src) {
    std::cerr << arg << ": cannot read module\n";
    throw InputError{kInput};
  }
  gom::SignatureModule parsed = parse_or_exit(*src);
  const auto available = load_imports(parsed, *src);
  try {
    auto resolved = std::make_shared<const gom::SignatureModule>(gom::resolve_imports(parsed, available));
    auto rep = gom::validate(*resolved);
    for (const auto& d : rep.diagnostics) report(src->display, d.pos, d.code, d.message);
    return {std::move(resolved), std::move(rep)};
  } catch (const gom::Error& e) {
    report(src->display, parsed.pos, gom::to_string(e.code()), e.what());
    throw InputError{kNegative};
  }
}

struct Session {
  std::shared_ptr<const gom::SignatureModule> module;
  std::unique_ptr<gom::TermStore> store;
  std::unique_ptr<gom::Factory> factory;
};

Session open(const std::string& arg) {
  Loaded l = load(arg);
  if (!l.report.accepted()) throw InputError{kNegative};
  Session s;
  s.module = l.module;
  s.store = std::make_unique<gom::TermStore>(std::make_shared<const gom::Signature>(*s.module));
  s.factory = std::make_unique<gom::Factory>(s.module, *s.store);
  return s;
}

// Builds a term, mapping failures to exit statuses.
gom::NodeRef build_term(const gom::Factory& f, const std::string& text, int error_status) {
  try {
    return f.parse(text);
  } catch (const gom::SyntaxError& e) {
    report("<expr>", e.pos(), "SyntaxError", e.detail());
    throw InputError{kInput};
  } catch (const gom::Error& e) {
    if (e.code() == gom::ErrorCode::RecursionBudgetExceeded) {
      std::cerr << "error: " << gom::to_string(e.code()) << ": " << e.what() << '\n';
      throw InputError{kDivergence};
    }
    std::cerr << "error: " << gom::to_string(e.code()) << ": " << e.what() << '\n';
    throw InputError{error_status};
  }
}

int cmd_check(const std::string& module) {
  return load(module).report.accepted() ? kOk : kNegative;
}

int cmd_norm(const std::string& module, const std::string& expr) {
  Session s = open(module);
  const gom::NodeRef t = build_term(*s.factory, expr, kNegative);
  std::cout << s.store->print_term(t) << '\n';
  return kOk;
}

int cmd_match(const std::string& module, const std::string& pattern_text, const std::string& expr, bool all) {
  Session s = open(module);
  std::optional<gom::Pattern> pattern;
  try {
    pattern = gom::parse_pattern(pattern_text, s.factory->signature());
  } catch (const gom::SyntaxError& e) {
    report("<pattern>", e.pos(), "SyntaxError", e.detail());
    return kInput;
  } catch (const gom::Error& e) {
    std::cerr << "error: " << gom::to_string(e.code()) << ": " << e.what() << '\n';
    return kInput;
  }
  const gom::NodeRef subject = build_term(*s.factory, expr, kNegative);

  if (!all) {
    auto first = gom::match_one(*s.store, *pattern, subject);
    if (!first) {
      std::cout << "no match\n";
      return kNegative;
    }
    std::cout << first->to_string(*s.store) << '\n';
    return kOk;
  }
  std::size_t count = 0;
  gom::for_each_match(*s.store, *pattern, subject, {}, [&](const gom::Substitution& sub) {
    std::cout << sub.to_string(*s.store) << '\n';
    ++count;
    return true;
  });
  std::cout << "solutions: " << count << '\n';
  return count > 0 ? kOk : kNegative;
}

int cmd_prove(const std::string& expr, const gom::bv::SearchConfig& cfg) {
  Session s = open("struct");
  const gom::NodeRef goal = build_term(*s.factory, expr, kInput);
  const gom::bv::Prover prover(*s.factory);
  gom::bv::ProofTrace trace;
  try {
    trace = prover.prove(goal, cfg);
  } catch (const gom::Error& e) {
    std::cerr << "error: " << gom::to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == gom::ErrorCode::RecursionBudgetExceeded ? kDivergence : kInput;
  }
  std::cout << prover.format_trace(trace);
  switch (trace.status) {
    case gom::bv::ProofStatus::Proved: return kOk;
    case gom::bv::ProofStatus::RefutedByExhaustion: return kNegative;
    case gom::bv::ProofStatus::NotProvedWithinBounds: return kBound;
  }
  return kBound;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algebraic signatures with normalizing hooks, list matching and a BV prover"};
  app.require_subcommand(1);

  std::string module, expr, pattern;
  bool all = false;
  gom::bv::SearchConfig cfg;
  bool no_pruning = false, dfs = false;

  auto* check = app.add_subcommand("check", "Validate a module (path or builtin name)");
  check->add_option("module", module, "Module file or builtin name")->required();

  auto* norm = app.add_subcommand("norm", "Print the canonical form of a term");
  norm->add_option("module", module, "Module file or builtin name")->required();
  norm->add_option("--expr", expr, "Term to normalize")->required();

  auto* match = app.add_subcommand("match", "Match a pattern against a term");
  match->add_option("module", module, "Module file or builtin name")->required();
  match->add_option("--pattern", pattern, "Pattern")->required();
  match->add_option("--expr", expr, "Subject term")->required();
  match->add_flag("--all", all, "Print every solution and a count");

  auto* prove = app.add_subcommand("prove", "Search a BV proof of a Struct term");
  prove->add_option("--expr", expr, "Goal structure")->required();
  prove->add_option("--depth", cfg.max_depth, "Maximum derivation length")->check(CLI::PositiveNumber);
  prove->add_option("--frontier", cfg.max_frontier, "Maximum number of states")->check(CLI::PositiveNumber);
  prove->add_flag("--no-pruning", no_pruning, "Disable the can-react restriction");
  prove->add_flag("--dfs", dfs, "Depth-first instead of breadth-first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? kOk : kInput;
  }

  try {
    if (*check) return cmd_check(module);
    if (*norm) return cmd_norm(module, expr);
    if (*match) return cmd_match(module, pattern, expr, all);
    if (*prove) {
      cfg.can_react_pruning = !no_pruning;
      cfg.order = dfs ? gom::bv::SearchOrder::DepthFirst : gom::bv::SearchOrder::BreadthFirst;
      return cmd_prove(expr, cfg);
    }
  } catch (const InputError& e) {
    return e.status;
  }
  return kInput;
}
