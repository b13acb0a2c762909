#include "cli.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "fairck/checkers.hpp"
#include "fairck/report.hpp"
#include "fairck/sweep.hpp"
#include "fairck/syntax.hpp"
#include "fairck/witness.hpp"

namespace fairck::cli {

namespace {

using nlohmann::ordered_json;

enum class Kind { Term, Comp, Sub };

struct Check {
  Kind kind = Kind::Term;
  std::string file;
  std::string first;   // type, client or subtype
  std::string second;  // server or supertype
  std::string mode = "fair";
  bool explain = false;
  bool synth = false;
  std::size_t budget = 64;
  std::size_t max_candidates = 200000;
};

struct Flags {
  bool json = false;
  bool timing = false;
};

std::string join(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) out += (out.empty() ? "" : " ") + a;
  return out;
}

void add_output_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_flag("--json", flags.json, "Print the report as JSON");
  cmd->add_flag("--timing", flags.timing, "Measure and report the elapsed time");
}

// The three checking subcommands, shared by the top level and batch lines.
struct CheckCommands {
  Check term, comp, sub;
  CLI::App* term_cmd = nullptr;
  CLI::App* comp_cmd = nullptr;
  CLI::App* sub_cmd = nullptr;

  void install(CLI::App& app, Flags* flags) {
    term.kind = Kind::Term;
    comp.kind = Kind::Comp;
    sub.kind = Kind::Sub;
    term_cmd = app.add_subcommand("term", "Fair termination of a type");
    term_cmd->add_option("file", term.file, "Session type file")->required();
    term_cmd->add_option("-t,--type", term.first, "Type name")->required();
    term_cmd->add_flag("--explain", term.explain, "Attach a derivation or counterexample");

    comp_cmd = app.add_subcommand("comp", "Compliance of a client with a server");
    comp_cmd->add_option("file", comp.file, "Session type file")->required();
    comp_cmd->add_option("-c,--client", comp.first, "Client type name")->required();
    comp_cmd->add_option("-s,--server", comp.second, "Server type name")->required();
    comp_cmd->add_option("--mode", comp.mode, "safety or fair")
        ->required()
        ->check(CLI::IsMember({"safety", "fair"}));
    comp_cmd->add_flag("--explain", comp.explain, "Attach a derivation or counterexample");

    sub_cmd = app.add_subcommand("sub", "Subtyping of two types");
    sub_cmd->add_option("file", sub.file, "Session type file")->required();
    sub_cmd->add_option("-t,--subtype", sub.first, "Subtype name")->required();
    sub_cmd->add_option("-s,--supertype", sub.second, "Supertype name")->required();
    sub_cmd->add_option("--mode", sub.mode, "safety or fair")->required()->check(CLI::IsMember({"safety", "fair"}));
    sub_cmd->add_flag("--explain", sub.explain, "Attach a derivation or counterexample");
    sub_cmd->add_flag("--synth-client", sub.synth,
                      "When subtyping holds but fair subtyping fails, search for a discriminating client");
    sub_cmd->add_option("--budget", sub.budget, "Largest client tried by --synth-client")->capture_default_str();
    sub_cmd->add_option("--max-candidates", sub.max_candidates, "Candidates examined by --synth-client")
        ->capture_default_str();
    if (flags)
      for (CLI::App* c : {term_cmd, comp_cmd, sub_cmd}) add_output_flags(c, *flags);
  }

  const Check* chosen() const {
    if (term_cmd->parsed()) return &term;
    if (comp_cmd->parsed()) return &comp;
    if (sub_cmd->parsed()) return &sub;
    return nullptr;
  }
};

void validate(const Check& c) {
  if (c.synth && c.mode != "fair") throw CLI::ValidationError("--synth-client", "requires --mode fair");
}

Report evaluate(const Check& c, const SessionSystem& sys, const std::string& command, bool timing) {
  Report r;
  r.command = command;
  r.mode = c.mode;
  const StateRef a = sys.resolve(c.first);
  const StateRef b = c.kind == Kind::Term ? StateRef{} : sys.resolve(c.second);
  const bool fair = c.mode == "fair";
  auto start = std::chrono::steady_clock::now();
  Verdict v;
  switch (c.kind) {
    case Kind::Term:
      r.judgment = "✓ " + c.first;
      v = c.explain ? explain_fair_termination(sys, a) : Verdict{fair_termination(sys, a), {}};
      break;
    case Kind::Comp: {
      r.judgment = c.first + " ⊣ " + c.second;
      Config cfg{a, b};
      if (c.explain)
        v = fair ? explain_fair_compliance(sys, cfg) : explain_compliance(sys, cfg);
      else
        v.holds = fair ? fair_compliance(sys, cfg) : compliance(sys, cfg);
      break;
    }
    case Kind::Sub:
      r.judgment = c.first + " ⊑ " + c.second;
      if (c.explain)
        v = fair ? explain_fair_subtyping(sys, a, b) : explain_subtyping(sys, a, b);
      else
        v.holds = fair ? fair_subtyping(sys, a, b) : subtyping(sys, a, b);
      if (c.synth && !v.holds) {
        SynthOptions opt;
        opt.budget = c.budget;
        opt.max_candidates = c.max_candidates;
        v.witness = synth_discriminating_client(sys, a, b, opt);
      }
      break;
  }
  r.holds = v.holds;
  if (v.witness) attach(r, *v.witness);
  if (timing)
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void emit(const Report& r, const Flags& flags, std::ostream& out, bool color) {
  if (flags.json)
    out << to_json(r).dump(2) << "\n";
  else
    out << to_text(r, color, flags.timing);
}

void warn(const std::string& file, const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "fairck: warning: " << file << ": " << w << "\n";
}

int error(std::ostream& err, const std::string& where, const std::exception& e) {
  err << "fairck: error: " << (where.empty() ? "" : where + ": ") << e.what() << "\n";
  return 2;
}

int cmd_parse(const std::string& file, const Flags& flags, const std::string& command, std::ostream& out,
              std::ostream& err) {
  std::vector<std::string> warnings;
  SessionSystem sys = syntax::load_file(file, &warnings);
  warn(file, warnings, err);
  if (!flags.json) {
    out << syntax::print_system(sys);
    return 0;
  }
  ordered_json types = ordered_json::object();
  for (const auto& n : sys.names()) types[n.name] = syntax::print_term(sys, n.state);
  out << ordered_json{{"version", kVersion},
                      {"command", command},
                      {"alphabet", sys.alphabet().labels()},
                      {"types", std::move(types)}}
             .dump(2)
      << "\n";
  return 0;
}

struct SelftestArgs {
  SelftestOptions options;
  bool serial = false;
  bool fault = false;
};

int cmd_selftest(const SelftestArgs& a, const Flags& flags, const std::string& command, std::ostream& out) {
  SelftestOptions opt = a.options;
  opt.parallel = !a.serial;
  opt.fault = a.fault ? Fault::DropSyncCorules : Fault::None;
  auto start = std::chrono::steady_clock::now();
  SelftestReport rep = run_selftest(opt);
  Report r;
  r.command = command;
  r.judgment = "checkers agree with the semantic oracles";
  r.mode = "fair";
  r.holds = rep.passed();
  const SystemTally& t = rep.tally;
  r.witness = {{"kind", "selftest"},
               {"exhaustive_systems", rep.exhaustive_systems},
               {"random_systems", rep.random_systems},
               {"states", t.states},
               {"configs", t.configs},
               {"termination_mismatches", t.termination_mismatches},
               {"compliance_mismatches", t.compliance_mismatches},
               {"fair_compliance_mismatches", t.fair_compliance_mismatches},
               {"fair_not_safe", t.fair_not_safe},
               {"inclusion_violations", t.inclusion_violations},
               {"counterexample", rep.counterexample ? ordered_json(*rep.counterexample) : ordered_json(nullptr)}};
  std::ostringstream os;
  os << "  " << rep.exhaustive_systems << " exhaustive and " << rep.random_systems << " random systems, "
     << t.states << " states, " << t.configs << " sessions\n";
  os << "  mismatches: termination " << t.termination_mismatches << ", compliance " << t.compliance_mismatches
     << ", fair compliance " << t.fair_compliance_mismatches << "; fair but unsafe " << t.fair_not_safe
     << "; inclusion violations " << t.inclusion_violations << "\n";
  if (rep.counterexample) {
    std::istringstream lines(*rep.counterexample);
    for (std::string line; std::getline(lines, line);) os << "    " << line << "\n";
  }
  r.detail = os.str();
  if (flags.timing)
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(r, flags, out, false);
  return r.holds ? 0 : 1;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

struct Job {
  std::string command;
  Check check;
  bool timing = false;
  std::string problem;  // set when the line could not be run
  Report report;
  int code = 2;
};

// Each non-empty line not starting with '#' is a term, comp or sub command.
// Files are relative to the manifest.
int cmd_batch(const std::string& manifest, const Flags& flags, std::ostream& out, std::ostream& err, bool color) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest '" + manifest + "'");
  const std::filesystem::path base = std::filesystem::path(manifest).parent_path();
  std::vector<Job> jobs;
  std::map<std::string, std::shared_ptr<const SessionSystem>> systems;
  std::map<std::string, std::string> load_errors;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto words = split(line);
    if (words.empty() || words.front().front() == '#') continue;
    Job job;
    job.command = join(words);
    CLI::App app{"batch line"};
    CheckCommands cmds;
    cmds.install(app, nullptr);
    app.add_flag("--timing", job.timing);
    app.require_subcommand(1);
    std::vector<std::string> rev(words.rbegin(), words.rend());
    try {
      app.parse(rev);
      job.check = *cmds.chosen();
      validate(job.check);
      std::filesystem::path p(job.check.file);
      if (p.is_relative()) job.check.file = (base / p).string();
      if (!systems.contains(job.check.file) && !load_errors.contains(job.check.file)) {
        try {
          std::vector<std::string> warnings;
          systems[job.check.file] =
              std::make_shared<const SessionSystem>(syntax::load_file(job.check.file, &warnings));
          warn(job.check.file, warnings, err);
        } catch (const Error& e) {
          load_errors[job.check.file] = e.what();
        }
      }
      if (auto it = load_errors.find(job.check.file); it != load_errors.end()) job.problem = it->second;
    } catch (const CLI::Error& e) {
      job.problem = e.what();
    }
    if (!job.problem.empty()) job.problem = manifest + ":" + std::to_string(line_no) + ": " + job.problem;
    jobs.push_back(std::move(job));
  }

  const std::int64_t n = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    Job& job = jobs[static_cast<std::size_t>(i)];
    if (!job.problem.empty()) continue;
    try {
      job.report = evaluate(job.check, *systems.at(job.check.file), job.command, flags.timing || job.timing);
      job.code = job.report.holds ? 0 : 1;
    } catch (const std::exception& e) {
      job.problem = job.command + ": " + e.what();
    }
  }

  int code = 0;
  ordered_json all = ordered_json::array();
  for (const Job& job : jobs) {
    if (!job.problem.empty()) {
      err << "fairck: error: " << job.problem << "\n";
      code = 2;
      if (flags.json) all.push_back(nullptr);
      continue;
    }
    if (job.code == 1 && code == 0) code = 1;
    if (flags.json)
      all.push_back(to_json(job.report));
    else
      out << to_text(job.report, color, flags.timing || job.timing);
  }
  if (flags.json) out << all.dump(2) << "\n";
  return code;
}

}  // namespace

bool color_from_env(std::ostream& err) {
  const char* v = std::getenv("FAIRCK_COLOR");
  std::string mode = v ? v : "auto";
  if (mode == "always") return true;
  if (mode == "never") return false;
  if (mode != "auto") err << "fairck: warning: FAIRCK_COLOR must be auto, always or never; using auto\n";
  return isatty(fileno(stdout)) != 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color) {
  CLI::App app{"Fair termination, compliance and subtyping of session types", "fairck"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Flags flags;
  CheckCommands checks;
  checks.install(app, &flags);

  std::string parse_file;
  CLI::App* parse_cmd = app.add_subcommand("parse", "Validate a file and print it normalized");
  parse_cmd->add_option("file", parse_file, "Session type file")->required();
  parse_cmd->add_flag("--json", flags.json, "Print the definitions as JSON");

  SelftestArgs st;
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "Compare the checkers with the semantic oracles");
  selftest_cmd->add_option("--seed", st.options.seed, "Seed of the random systems")->capture_default_str();
  selftest_cmd->add_option("--max-states", st.options.max_states, "Exhaustive systems up to this many states, nil included")
      ->capture_default_str();
  selftest_cmd->add_option("--alphabet", st.options.labels, "Labels of the exhaustive systems")
      ->capture_default_str()
      ->check(CLI::Range(1, 4));
  selftest_cmd->add_option("--random-count", st.options.random_count, "Random systems")->capture_default_str();
  selftest_cmd->add_option("--random-max-states", st.options.random_max_states, "States of the random systems")
      ->capture_default_str();
  selftest_cmd->add_option("--random-alphabet", st.options.random_labels, "Labels of the random systems")
      ->capture_default_str()
      ->check(CLI::Range(1, 8));
  selftest_cmd->add_flag("--serial", st.serial, "Use the serial reference sweep");
  selftest_cmd->add_flag("--inject-fault", st.fault)->group("");
  add_output_flags(selftest_cmd, flags);

  std::string manifest;
  CLI::App* batch_cmd = app.add_subcommand("batch", "Run the term, comp and sub commands listed in a manifest");
  batch_cmd->add_option("--all", manifest, "Manifest, one command per line")->required();
  add_output_flags(batch_cmd, flags);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
    if (const Check* c = checks.chosen()) validate(*c);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "fairck: error: " << e.what() << "\n";
    return 2;
  }

  const std::string command = join(args);
  std::string where;
  try {
    if (const Check* c = checks.chosen()) {
      where = c->file;
      std::vector<std::string> warnings;
      SessionSystem sys = syntax::load_file(c->file, &warnings);
      warn(c->file, warnings, err);
      Report r = evaluate(*c, sys, command, flags.timing);
      emit(r, flags, out, color);
      return r.holds ? 0 : 1;
    }
    if (parse_cmd->parsed()) {
      where = parse_file;
      return cmd_parse(parse_file, flags, command, out, err);
    }
    if (selftest_cmd->parsed()) return cmd_selftest(st, flags, command, out);
    if (batch_cmd->parsed()) {
      where = manifest;
      return cmd_batch(manifest, flags, out, err, color);
    }
  } catch (const Error& e) {
    return error(err, e.line() > 0 || e.kind() == ErrorKind::UnknownTypeName ? where : "", e);
  } catch (const std::exception& e) {
    return error(err, "internal error", e);
  }
  return 2;
}

}  // namespace fairck::cli
