// Command-line front end: one subcommand per task, flags override the config file.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "motifauto/job.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> alphabet, prob, mode, dot_out, format;
  std::vector<std::string> patterns, rules, marks;
  std::optional<unsigned> n, nmax;
  std::optional<unsigned long long> cap_states, cap_texts, seed;
  bool timing = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON job file; flags override its fields");
  sub->add_option("--alphabet", f.alphabet, "alphabet symbols, e.g. ab or ACGU");
  sub->add_option("--prob", f.prob, "comma-separated a/b probabilities in symbol order");
  sub->add_option("--pattern", f.patterns, "pattern (repeat for several patterns)");
  sub->add_option("--rule", f.rules, "correlation rule as id:name, e.g. 1:rna-wobble");
  sub->add_option("--mark", f.marks, "class label to count (repeatable)");
  sub->add_option("--mode", f.mode, "overlap or renewal");
  sub->add_option("--n", f.n, "text length");
  sub->add_option("--nmax", f.nmax, "largest n for sooner-time laws and asymptotics");
  sub->add_option("--cap-states", f.cap_states, "largest chain handled by generating functions");
  sub->add_option("--cap-texts", f.cap_texts, "enumeration budget of the oracle");
  sub->add_option("--seed", f.seed, "sampler seed");
  sub->add_option("--dot-out", f.dot_out, "write the automaton in DOT format to this file");
  sub->add_option("--format", f.format, "structured (JSON) or plain");
  sub->add_flag("--timing", f.timing, "add elapsed time to the report");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using motifauto::Json;
  CLI::App app{"Exact occurrence statistics of patterns in random texts"};
  app.require_subcommand(0, 1);
  Flags f;
  add_flags(&app, f);
  for (const auto& task : motifauto::kTasks) add_flags(app.add_subcommand(task, "run the " + task + " task"), f);
  CLI11_PARSE(app, argc, argv);

  Json doc = Json::object();
  auto fail = [](const std::string& field, const std::string& msg) {
    Json err = {{"error", {{"kind", "bad-config"}, {"field", field}, {"message", field + ": " + msg}}}};
    std::cout << err.dump(2) << "\n";
    return motifauto::kExitBadConfig;
  };
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) return fail("config", "cannot read '" + f.config + "'");
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      return fail("config", e.what());
    }
    if (!doc.is_object()) return fail("config", "expected a JSON object");
  }
  if (!app.get_subcommands().empty()) {
    doc["task"] = app.get_subcommands().front()->get_name();
  } else if (f.config.empty()) {
    return fail("task", "give a subcommand or a config file with a task field");
  }
  if (f.alphabet) doc["alphabet"]["symbols"] = *f.alphabet;
  if (f.prob) doc["alphabet"]["probs"] = split(*f.prob, ',');
  if (f.patterns.size() == 1) {
    doc.erase("patterns");
    doc["pattern"] = f.patterns.front();
  } else if (f.patterns.size() > 1) {
    doc.erase("pattern");
    doc["patterns"] = f.patterns;
  }
  for (const auto& r : f.rules) {
    const auto colon = r.find(':');
    if (colon == std::string::npos) return fail("rule", "expected id:name, got '" + r + "'");
    doc["rules"][r.substr(0, colon)] = r.substr(colon + 1);
  }
  if (!f.marks.empty()) doc["marks"] = f.marks;
  if (f.mode) doc["mode"] = *f.mode;
  if (f.n) doc["n"] = *f.n;
  if (f.nmax) doc["n_max"] = *f.nmax;
  if (f.cap_states) doc["cap_states"] = *f.cap_states;
  if (f.cap_texts) doc["cap_texts"] = *f.cap_texts;
  if (f.seed) doc["seed"] = *f.seed;
  if (f.dot_out) doc["dot_out"] = *f.dot_out;
  if (f.format) doc["format"] = *f.format;
  if (f.timing) doc["timing"] = true;

  const std::string format = doc.contains("format") && doc["format"].is_string() ? doc["format"].get<std::string>()
                                                                                  : "structured";
  const auto report = motifauto::execute(doc);
  std::cout << motifauto::render_report(report.doc, format == "plain" ? "plain" : "structured");
  return report.exit_code;
}
