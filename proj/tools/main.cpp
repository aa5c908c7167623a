// main.cpp -- the amalgam command-line frontend: loads system descriptions,
// runs the budgeted analyses, and emits verdicts, certificates, and automata
// in text or JSON form.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "amalgam/analyses.hpp"
#include "amalgam/counter.hpp"
#include "amalgam/grammar.hpp"
#include "amalgam/nfa.hpp"
#include "amalgam/sbo.hpp"
#include "amalgam/transducer.hpp"
#include "amalgam/valence.hpp"
#include "amalgam/vass.hpp"

namespace {

using namespace amalgam;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Loads a system description, dispatching on the file extension:
/// .nfa, .vass, .cfg (C-grammar), .cext (counter-extension descriptor).
/// `@file` references inside grammars and descriptors resolve relative to
/// the referencing file.
SystemPtr load_system(const std::string& path) {
  std::filesystem::path p(path);
  std::string ext = p.extension().string();
  std::string stem = p.stem().string();
  auto loader = [&p](const std::string& ref) {
    return load_system((p.parent_path() / ref).string());
  };
  std::string text = read_file(path);
  if (ext == ".nfa")
    return std::make_shared<NfaSystem>(parse_nfa(text), stem);
  if (ext == ".vass")
    return std::make_shared<VassSystem>(parse_vass(text), stem);
  if (ext == ".cfg")
    return std::make_shared<GrammarSystem>(parse_cgrammar(text, loader), stem);
  if (ext == ".cext") {
    CounterDescriptor d = parse_counter_descriptor(text, loader);
    return build_counter_extension(d.base, d.eta, d.alpha, stem);
  }
  throw std::invalid_argument("unknown system extension '" + ext +
                              "' (expected .nfa, .vass, .cfg, or .cext)");
}

/// A word in the certificate/flag notation: letters joined by the middle
/// dot when any letter is longer than one character, plain otherwise.
Word parse_word(const std::string& s) {
  Word w;
  const std::string dot = "\xc2\xb7";
  if (s.find(dot) != std::string::npos) {
    std::size_t pos = 0;
    while (pos <= s.size()) {
      std::size_t next = s.find(dot, pos);
      if (next == std::string::npos) next = s.size();
      if (next > pos) w.push_back(s.substr(pos, next - pos));
      pos = next + dot.size();
    }
  } else {
    for (char c : s) w.push_back(std::string(1, c));
  }
  return w;
}

std::vector<Letter> split_commas(const std::string& s) {
  std::vector<Letter> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    if (next > pos) out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

struct Options {
  Budget budget;
  std::string format = "text";
  std::string output;
};

/// Writes the result and maps the verdict to the exit code
/// (0 decided, 2 budget exhausted).
int finish(const Options& opt, const std::string& command, const Verdict& v,
           json extras = json::object()) {
  std::ostringstream os;
  if (opt.format == "json") {
    json out;
    out["schema"] = 1;
    out["command"] = command;
    out["verdict"] = verdict_name(v.value);
    out["certificate"] = v.certificate;
    out["steps_used"] = v.steps_used;
    for (auto& [k, val] : extras.items()) out[k] = val;
    os << out.dump(2) << '\n';
  } else {
    os << "verdict: " << verdict_name(v.value) << '\n';
    os << "steps_used: " << v.steps_used << '\n';
    if (!v.certificate.is_null())
      os << "certificate: " << v.certificate.dump() << '\n';
    for (auto& [k, val] : extras.items()) {
      if (val.is_string() && val.get<std::string>().find('\n') != std::string::npos)
        os << k << ":\n" << val.get<std::string>();
      else if (val.is_array()) {
        for (auto& item : val) os << k << ": " << item.get<std::string>() << '\n';
      } else if (val.is_string())
        os << k << ": " << val.get<std::string>() << '\n';
      else
        os << k << ": " << val.dump() << '\n';
    }
  }
  if (opt.output.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(opt.output, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + opt.output + "'");
    f << os.str();
  }
  return v.decided() ? 0 : 2;
}

json certificate_of(const std::string& path) {
  json j = json::parse(read_file(path));
  if (j.is_object() && j.contains("certificate")) return j["certificate"];
  return j;
}

/// Re-validates a certificate without re-running the search.
Verdict verify_certificate(const std::string& kind, const SystemPtr& s,
                           const json& cert, const std::vector<Letter>& letters,
                           const Budget& budget) {
  auto reject = [](const std::string& why) {
    return Verdict::neg({{"reason", why}});
  };
  if (kind == "emptiness") {
    if (!cert.contains("run")) return reject("missing run witness");
    Run r = s->parse_run(cert["run"].get<std::string>());
    return Verdict::pos({{"checked", "run parses and is accepted"},
                         {"run", r->serialize()}});
  }
  if (kind == "sup") {
    if (!cert.contains("rho") || !cert.contains("sigma"))
      return reject("missing rho/sigma");
    if (letters.empty()) throw std::invalid_argument("--letters required for sup");
    Run rho = s->parse_run(cert["rho"].get<std::string>());
    Run sigma = s->parse_run(cert["sigma"].get<std::string>());
    if (s->admissible_embeddings(rho, sigma).empty())
      return reject("rho does not embed into sigma");
    std::vector<std::size_t> pr = parikh(s->yield_of(rho), letters);
    std::vector<std::size_t> ps = parikh(s->yield_of(sigma), letters);
    for (std::size_t i = 0; i < letters.size(); ++i)
      if (ps[i] <= pr[i])
        return reject("letter '" + letters[i] + "' does not strictly increase");
    return Verdict::pos({{"checked", "embedding exists, all counts increase"}});
  }
  if (kind == "bounded") {
    if (cert.contains("expression")) {
      std::vector<Word> words;
      for (auto& wstr : cert["expression"])
        words.push_back(parse_word(wstr.get<std::string>()));
      Verdict inc = bounded_expression_inclusion(s, words, budget);
      if (inc.positive())
        return Verdict::pos({{"checked", "expression inclusion re-established"}},
                            inc.steps_used);
      return reject("expression inclusion did not re-verify");
    }
    if (cert.contains("rho0")) {
      Run rho0 = s->parse_run(cert["rho0"].get<std::string>());
      Run rho1 = s->parse_run(cert["rho1"].get<std::string>());
      Run rho2 = s->parse_run(cert["rho2"].get<std::string>());
      MonotoneMap f{cert["f"].get<std::vector<std::size_t>>(),
                    s->canon(rho1).size()};
      MonotoneMap g{cert["g"].get<std::vector<std::size_t>>(),
                    s->canon(rho2).size()};
      auto contains = [](const std::vector<MonotoneMap>& v, const MonotoneMap& m) {
        return std::find(v.begin(), v.end(), m) != v.end();
      };
      if (!contains(s->admissible_embeddings(rho0, rho1), f))
        return reject("f is not an admissible embedding rho0 -> rho1");
      if (!contains(s->admissible_embeddings(rho0, rho2), g))
        return reject("g is not an admissible embedding rho0 -> rho2");
      std::size_t i = cert["gap"].get<std::size_t>();
      Word u = gap_words(*s, rho0, rho1, f).gaps.at(i);
      Word v = gap_words(*s, rho0, rho2, g).gaps.at(i);
      if (word_str(u) != cert["gap_f"].get<std::string>() ||
          word_str(v) != cert["gap_g"].get<std::string>())
        return reject("recomputed gap words differ from the certificate");
      std::size_t n = std::min(u.size(), v.size());
      if (std::equal(u.begin(), u.begin() + n, v.begin()))
        return reject("gap words are prefix-comparable");
      return Verdict::pos({{"checked", "embeddings and incomparable gaps"}});
    }
    return reject("unrecognized bounded certificate shape");
  }
  throw std::invalid_argument("unsupported certificate kind '" + kind +
                              "' (expected emptiness, sup, or bounded)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analyses over concatenative amalgamation systems"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  if (const char* env = std::getenv("AMALGAM_MAX_STEPS"))
    opt.budget.max_steps = std::strtoull(env, nullptr, 10);
  app.add_option("--max-steps", opt.budget.max_steps, "scheduler step limit");
  app.add_option("--max-run-size", opt.budget.max_run_size,
                 "run enumeration size cap");
  app.add_option("--counter-bound", opt.budget.counter_bound,
                 "VASS forward-search counter cap");
  app.add_option("--max-run-length", opt.budget.max_run_length,
                 "VASS forward-search length cap");
  app.add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("-o,--output", opt.output, "write the result to a file");

  std::string sys_path, aux_path, letters_flag, kind;
  std::size_t priorities = 1;

  CLI::App* c_empty = app.add_subcommand("emptiness", "language emptiness");
  c_empty->add_option("system", sys_path)->required();

  CLI::App* c_sup = app.add_subcommand("sup", "simultaneous unboundedness");
  c_sup->add_option("system", sys_path)->required();
  c_sup->add_option("--letters", letters_flag, "designated letters a1,...,an")
      ->required();

  CLI::App* c_bounded = app.add_subcommand("bounded", "language boundedness");
  c_bounded->add_option("system", sys_path)->required();

  CLI::App* c_unary = app.add_subcommand("unary-regular",
                                         "effective regularity of unary languages");
  c_unary->add_option("system", sys_path)->required();

  CLI::App* c_dc = app.add_subcommand("dc", "subword downward closure");
  c_dc->add_option("system", sys_path)->required();

  CLI::App* c_sbo = app.add_subcommand("sbo-dc",
                                       "simple-block-order downward closure");
  c_sbo->add_option("system", sys_path)->required();
  c_sbo->add_option("--priorities", priorities, "highest priority d");

  CLI::App* c_axioms = app.add_subcommand("check-axioms",
                                          "amalgamation axiom sweep");
  c_axioms->add_option("system", sys_path)->required();

  CLI::App* c_trans = app.add_subcommand("transduce",
                                         "apply a transducer to a system");
  c_trans->add_option("system", sys_path)->required();
  c_trans->add_option("transducer", aux_path)->required();

  CLI::App* c_cext = app.add_subcommand("counter-extend",
                                        "build a counter extension");
  c_cext->add_option("descriptor", sys_path)->required();

  CLI::App* c_val = app.add_subcommand("valence", "valence-automaton tools");
  c_val->require_subcommand(1);
  CLI::App* c_vcomp = c_val->add_subcommand("compile",
                                            "compile a valence automaton");
  c_vcomp->add_option("automaton", sys_path)->required();
  c_vcomp->add_option("graph", aux_path)->required();
  CLI::App* c_vdet = c_val->add_subcommand("detect",
                                           "Turing-pattern detection");
  c_vdet->add_option("graph", sys_path)->required();

  CLI::App* c_verify = app.add_subcommand("verify-certificate",
                                          "re-validate a certificate");
  c_verify->add_option("kind", kind, "emptiness | sup | bounded")->required();
  c_verify->add_option("system", sys_path)->required();
  c_verify->add_option("certificate", aux_path, "JSON file")->required();
  c_verify->add_option("--letters", letters_flag, "letters for sup certificates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    // Normalize: any usage or parse problem is exit 1, --help stays 0.
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_empty->parsed())
      return finish(opt, "emptiness", load_system(sys_path)->emptiness(opt.budget));
    if (c_sup->parsed())
      return finish(opt, "sup",
                    decide_sup(load_system(sys_path), split_commas(letters_flag),
                               opt.budget));
    if (c_bounded->parsed())
      return finish(opt, "bounded",
                    decide_boundedness(load_system(sys_path), opt.budget));
    if (c_unary->parsed()) {
      RegularResult r = compute_unary_regular(load_system(sys_path), opt.budget);
      return finish(opt, "unary-regular", r.verdict,
                    {{"nfa", serialize_nfa(r.nfa)}});
    }
    if (c_dc->parsed()) {
      DcResult r = compute_downward_closure(load_system(sys_path), opt.budget);
      json ideals = json::array();
      for (const SubwordIdeal& i : r.ideals) ideals.push_back(i.str());
      return finish(opt, "dc", r.verdict,
                    {{"ideal", ideals}, {"nfa", serialize_nfa(r.nfa)}});
    }
    if (c_sbo->parsed()) {
      SboDcResult r = compute_sbo_dc(load_system(sys_path), priorities, opt.budget);
      json ideals = json::array();
      for (const SboIdeal& i : r.ideals) ideals.push_back(i.str());
      return finish(opt, "sbo-dc", r.verdict,
                    {{"ideal", ideals}, {"nfa", serialize_nfa(r.nfa)}});
    }
    if (c_axioms->parsed()) {
      AxiomReport rep = check_amalgamation_axioms(*load_system(sys_path),
                                                  opt.budget);
      Verdict v = rep.ok() ? Verdict::pos({{"pairs", rep.pairs_checked},
                                           {"triples", rep.triples_checked}})
                           : Verdict::neg({{"violations", rep.violations}});
      return finish(opt, "check-axioms", v);
    }
    if (c_trans->parsed()) {
      Transducer t = parse_transducer(read_file(aux_path));
      if (std::filesystem::path(sys_path).extension() == ".nfa") {
        Nfa out = apply_to_nfa(parse_nfa(read_file(sys_path)), t);
        return finish(opt, "transduce", Verdict::pos(nullptr),
                      {{"nfa", serialize_nfa(out)}});
      }
      SystemPtr s = load_system(sys_path)->transduce(t);
      Verdict v = s->emptiness(opt.budget);
      return finish(opt, "transduce", v, {{"system", s->id()}});
    }
    if (c_cext->parsed()) {
      SystemPtr s = load_system(sys_path);
      Verdict v = s->emptiness(opt.budget);
      return finish(opt, "counter-extend", v, {{"system", s->id()}});
    }
    if (c_vcomp->parsed()) {
      ValenceAutomaton a = parse_valence_automaton(read_file(sys_path));
      StorageGraph g = parse_storage_graph(read_file(aux_path));
      HierarchyExpr expr = decompose_pd(g);
      SystemPtr s = compile_valence(a, g);
      Verdict v = s->emptiness(opt.budget);
      return finish(opt, "valence compile", v,
                    {{"decomposition", expr.str()}, {"system", s->id()}});
    }
    if (c_vdet->parsed()) {
      StorageGraph g = parse_storage_graph(read_file(sys_path));
      bool turing = has_turing_pattern(g);
      Verdict v = turing
                      ? Verdict::pos({{"pattern", "induced P4 or C4 present"}})
                      : Verdict::neg({{"pattern", "none"}});
      json extras{{"turing_pattern", turing}};
      if (!turing) extras["decomposition"] = decompose_pd(g).str();
      return finish(opt, "valence detect", v, extras);
    }
    if (c_verify->parsed()) {
      SystemPtr s = load_system(sys_path);
      Verdict v = verify_certificate(kind, s, certificate_of(aux_path),
                                     split_commas(letters_flag), opt.budget);
      return finish(opt, "verify-certificate", v);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 1;
}
