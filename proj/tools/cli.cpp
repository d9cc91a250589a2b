// mellglue: proof-structures, Taylor expansion, gluability and inhabitation
// from the command line. Batch tool: JSON in, verdicts and witnesses out.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mellglue/decide.hpp"
#include "mellglue/io.hpp"

using namespace mellglue;
using nlohmann::json;

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUsage = 2;

struct Report {
  std::string command;
  std::string verdict;
  json details = json::object();
  std::optional<std::string> witness_scheduling;
  std::optional<json> witness_net;
  long nodes_explored = 0;
  long wall_ms = 0;
};

bool g_json = false;

void emit(const Report& r) {
  if (g_json) {
    json doc;
    doc["version"] = "1";
    doc["command"] = r.command;
    doc["verdict"] = r.verdict;
    if (!r.details.empty()) doc["details"] = r.details;
    if (r.witness_scheduling) doc["witness_scheduling"] = *r.witness_scheduling;
    if (r.witness_net) doc["witness_net"] = *r.witness_net;
    doc["stats"] = {{"nodes_explored", r.nodes_explored}, {"wall_ms", r.wall_ms}};
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::cout << r.verdict << "\n";
  for (auto it = r.details.begin(); it != r.details.end(); ++it)
    std::cout << "  " << it.key() << ": " << it.value().dump() << "\n";
  if (r.witness_scheduling) std::cout << "witness: " << *r.witness_scheduling << "\n";
  if (r.witness_net) std::cout << r.witness_net->dump(2) << "\n";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// the inhabitation commands take a list of formulas, optionally wrapped in
// parentheses as printed in the reports
std::vector<FormulaPtr> parse_formula_list(std::string text) {
  size_t b = text.find_first_not_of(" \t");
  size_t e = text.find_last_not_of(" \t");
  if (b != std::string::npos && text[b] == '(' && text[e] == ')') {
    // strip the wrapper only when it is not a formula's own parenthesis
    try {
      TypeList inner = parse_type_list(text.substr(b + 1, e - b - 1));
      if (inner.size() == 1) return inner[0];
    } catch (const Error&) {
      // fall through: the parentheses belong to a formula
    }
  }
  TypeList g = parse_type_list(text);
  if (g.size() != 1) throw Error("expected a single list of formulas");
  return g[0];
}

json set_to_json(const NetSet& s) { return json::parse(encode_net_set(s)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MELL proof-structures: Taylor expansion, gluability, inhabitation"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "emit a JSON report on stdout");

  std::string net_path, set_path, rho_path, r_path, sched_text, type_text, gamma_text;
  int bound = 2, budget = 64, suffix_budget = 64;
  bool cut_free = false, filled = false, show_boxes = true, show_tree = false;

  auto* validate_cmd = app.add_subcommand("validate", "check a net document");
  validate_cmd->add_option("net", net_path)->required();

  auto* classify_cmd = app.add_subcommand("classify", "MELL/DiLL0/cut-free/empty flags");
  classify_cmd->add_option("net", net_path)->required();

  auto* taylor_cmd = app.add_subcommand("taylor", "Taylor expansion up to a copy bound");
  taylor_cmd->add_option("net", net_path)->required();
  taylor_cmd->add_option("--bound", bound, "per-box copy bound")->required();

  auto* filled_cmd = app.add_subcommand("filled", "filled Taylor expansion up to a copy bound");
  filled_cmd->add_option("net", net_path)->required();
  filled_cmd->add_option("--bound", bound, "per-box copy bound")->required();

  auto* member_cmd = app.add_subcommand("member", "membership in the (filled) Taylor expansion");
  member_cmd->add_option("rho", rho_path)->required();
  member_cmd->add_option("net", r_path)->required();
  member_cmd->add_flag("--filled", filled, "test the filled expansion");

  auto* glue_cmd = app.add_subcommand("glue", "decide gluability of a set");
  glue_cmd->add_option("set", set_path)->required();
  glue_cmd->add_flag("--cut-free", cut_free, "restrict to cut-free schedulings");
  glue_cmd->add_option("--budget", suffix_budget,
                       "budget for the cut-free daimon-elimination suffix");

  auto* invert_cmd = app.add_subcommand("invert", "inverse Taylor expansion");
  invert_cmd->add_option("set", set_path)->required();
  invert_cmd->add_flag("--cut-free", cut_free, "look for a cut-free antecedent");
  invert_cmd->add_option("--budget", suffix_budget,
                         "budget for the cut-free daimon-elimination suffix");

  auto* inhabit_cmd = app.add_subcommand("inhabit", "cut-free inhabitation (procedure with budget)");
  inhabit_cmd->add_option("formulas", gamma_text)->required();
  inhabit_cmd->add_option("--budget", budget, "maximum number of non-exchange steps")->required();

  auto* ncc_cmd = app.add_subcommand("inhabit-ncc",
                                     "inhabitation without strict contractions (complete)");
  ncc_cmd->add_option("formulas", gamma_text)->required();

  auto* normalize_cmd = app.add_subcommand("normalize", "unwind a MELL structure to empty");
  normalize_cmd->add_option("net", net_path)->required();

  auto* build_cmd = app.add_subcommand("build", "build the structure of a scheduling");
  build_cmd->add_option("--type", type_text, "source type list")->required();
  build_cmd->add_option("--sched", sched_text, "scheduling tokens")->required();

  auto* replay_cmd = app.add_subcommand("replay", "replay a scheduling on a set");
  replay_cmd->add_option("set", set_path)->required();
  replay_cmd->add_option("--sched", sched_text, "scheduling tokens")->required();

  auto* dot_cmd = app.add_subcommand("dot", "DOT rendering");
  dot_cmd->add_option("net", net_path)->required();
  dot_cmd->add_flag("--boxes,!--no-boxes", show_boxes, "cluster per box");
  dot_cmd->add_flag("--box-tree", show_tree, "include the box-trees");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  auto t0 = std::chrono::steady_clock::now();
  auto wall = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
  };

  try {
    if (*validate_cmd) {
      Report rep{"validate"};
      QuasiProofStructure q = decode_net(slurp(net_path), false);
      auto err = validate(q);
      rep.verdict = err ? "invalid" : "valid";
      if (err) rep.details["violation"] = *err;
      rep.wall_ms = wall();
      emit(rep);
      return err ? kExitNo : kExitYes;
    }

    if (*classify_cmd) {
      Report rep{"classify"};
      QuasiProofStructure q = decode_net(slurp(net_path));
      Classification c = classify(q);
      rep.verdict = "classified";
      rep.details["is_mell"] = c.is_mell;
      rep.details["is_dill0"] = c.is_dill0;
      rep.details["is_cut_free"] = c.is_cut_free;
      rep.details["is_empty"] = c.is_empty;
      rep.details["type"] = to_string(type_of(q));
      rep.details["depth"] = depth(q);
      rep.wall_ms = wall();
      emit(rep);
      return kExitYes;
    }

    if (*taylor_cmd || *filled_cmd) {
      Report rep{*taylor_cmd ? "taylor" : "filled"};
      QuasiProofStructure q = decode_net(slurp(net_path));
      NetSet out = *taylor_cmd ? taylor_set(q, bound) : filled_taylor_set(q, bound);
      rep.verdict = "expanded";
      rep.details["elements"] = out.elems.size();
      rep.details["set"] = set_to_json(out);
      rep.wall_ms = wall();
      emit(rep);
      return kExitYes;
    }

    if (*member_cmd) {
      Report rep{"member"};
      QuasiProofStructure rho = decode_net(slurp(rho_path));
      QuasiProofStructure r = decode_net(slurp(r_path));
      auto w = member(rho, r, filled);
      rep.verdict = w ? "member" : "not-member";
      if (w) {
        json trees = json::array();
        for (const auto& t : w->subforest.trees)
          trees.push_back({{"parents", t.tree.parent}, {"to_target", t.to_target}});
        rep.details["subforest"] = trees;
        rep.details["emptied_components"] = w->emptied;
      }
      rep.wall_ms = wall();
      emit(rep);
      return w ? kExitYes : kExitNo;
    }

    if (*glue_cmd || *invert_cmd) {
      Report rep{*glue_cmd ? "glue" : "invert"};
      NetSet pi = decode_net_set(slurp(set_path));
      GlueStats stats;
      GlueOptions opt;
      opt.cut_free = cut_free;
      opt.suffix_budget = suffix_budget;
      opt.stats_out = &stats;
      auto res = *glue_cmd ? glueable(pi, opt) : invert_taylor(pi, opt);
      rep.nodes_explored = stats.states_explored;
      rep.wall_ms = wall();
      if (!res) {
        rep.verdict = cut_free ? "not-cut-free-gluable" : "not-gluable";
        emit(rep);
        return kExitNo;
      }
      rep.verdict = cut_free ? "cut-free-gluable" : "gluable";
      rep.witness_scheduling = to_string(res->witness);
      if (res->built) rep.witness_net = json::parse(encode_net(*res->built));
      emit(rep);
      return kExitYes;
    }

    if (*inhabit_cmd || *ncc_cmd) {
      Report rep{*inhabit_cmd ? "inhabit" : "inhabit-ncc"};
      auto gamma = parse_formula_list(gamma_text);
      long explored = 0;
      auto res = *inhabit_cmd ? inhabit_p1(gamma, budget, &explored)
                              : inhabit_p2(gamma, &explored);
      rep.nodes_explored = explored;
      rep.wall_ms = wall();
      if (!res) {
        rep.verdict = *inhabit_cmd ? "not-found-within-budget" : "not-inhabited";
        emit(rep);
        return kExitNo;
      }
      rep.verdict = "inhabited";
      rep.witness_scheduling = to_string(res->witness);
      rep.witness_net = json::parse(encode_net(res->structure));
      emit(rep);
      return kExitYes;
    }

    if (*normalize_cmd) {
      Report rep{"normalize"};
      QuasiProofStructure q = decode_net(slurp(net_path));
      if (!classify(q).is_mell) throw Error("normalize expects a MELL structure");
      Scheduling nu = normalize(q);
      rep.verdict = "normalized";
      rep.witness_scheduling = to_string(nu);
      rep.details["length"] = nu.size();
      rep.wall_ms = wall();
      emit(rep);
      return kExitYes;
    }

    if (*build_cmd) {
      Report rep{"build"};
      TypeList source = parse_type_list(type_text);
      Scheduling nu = parse_scheduling(sched_text);
      QuasiProofStructure r = build(nu, source);
      rep.verdict = "built";
      rep.witness_net = json::parse(encode_net(r));
      rep.wall_ms = wall();
      emit(rep);
      return kExitYes;
    }

    if (*replay_cmd) {
      Report rep{"replay"};
      NetSet pi = decode_net_set(slurp(set_path));
      Scheduling nu = parse_scheduling(sched_text);
      TypeList target = pi.type;
      for (const auto& s : nu) target = step_type(target, s);
      bool empty_target = true;
      for (const auto& comp : target) empty_target = empty_target && comp.empty();
      NetSet goal;
      if (empty_target)
        goal = make_net_set({empty_qps(static_cast<int>(target.size()))});
      bool ok = empty_target && set_replays_to(pi, nu, goal);
      rep.verdict = ok ? "replays-to-empty" : "does-not-replay";
      rep.wall_ms = wall();
      emit(rep);
      return ok ? kExitYes : kExitNo;
    }

    if (*dot_cmd) {
      QuasiProofStructure q = decode_net(slurp(net_path));
      std::cout << to_dot(q, DotOptions{show_boxes, show_tree});
      return kExitYes;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
