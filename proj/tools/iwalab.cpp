// iwalab: batch front end for exact computations with truncated Iwasawa
// algebras, finite Gamma-modules and Gamma-systems.
//
// Exit codes: 0 all checks pass, 1 a check failed (with witness), 2 input
// error (malformed document, violated precondition, budget exceeded).

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "iwalab/io.hpp"

using namespace iwalab;

namespace {

struct GlobalFlags {
  long budget = 729;
  int jobs = 1;
  bool json = false;
  bool timing = false;
  std::optional<int> precision;
  std::string out_path;
};

Json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open input file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw input_error("malformed document " + path + ": " + e.what());
  }
  return j;
}

Config header_of(const Json& doc, const GlobalFlags& g) {
  if (!doc.is_object() || !doc.contains("header"))
    throw input_error("at $.header: missing (expected {p, d, precision})");
  Config cfg = config_from_json(doc.at("header"));
  if (g.precision) {
    cfg.precision = *g.precision;
    cfg.check();
  }
  return cfg;
}

EnumerationOptions enum_options(const GlobalFlags& g) {
  EnumerationOptions opts;
  opts.budget = g.budget;
  opts.jobs = g.jobs;
  return opts;
}

AlgebraElement element_of(const Config& cfg, const Json& doc) {
  if (!doc.contains("xi")) throw input_error("at $.xi: missing");
  return element_from_json(cfg, doc.at("xi"), "$.xi");
}

ElementaryModule elementary_of(const Config& cfg, const Json& doc) {
  if (!doc.contains("factors")) throw input_error("at $.factors: missing");
  return elementary_from_json(cfg, doc.at("factors"), "$.factors");
}

void emit(const GlobalFlags& g, const Json& as_json, const std::string& as_text,
          double seconds) {
  if (g.json) {
    Json out = as_json;
    if (g.timing) out["timing_seconds"] = seconds;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << as_text;
    if (g.timing) std::cout << "timing: " << seconds << " s\n";
  }
}

void write_output(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iwalab: exact arithmetic for truncated Iwasawa algebras and Gamma-systems"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  if (const char* env = std::getenv("IWALAB_BUDGET")) {
    g.budget = std::strtol(env, nullptr, 10);
    if (g.budget <= 0) g.budget = 729;
  }
  app.add_option("--budget", g.budget, "character enumeration budget (default 729)");
  app.add_option("--jobs", g.jobs, "worker threads for character sweeps (output-invariant)");
  app.add_flag("--json", g.json, "emit machine-readable JSON reports");
  app.add_flag("--timing", g.timing, "append wall-clock timing to the report");
  int precision_opt = 0;
  auto* prec = app.add_option("--precision", precision_opt, "override the header precision M");

  std::string file;
  int level = 1;
  int levels = 1;
  bool flats = false;
  std::string mode = "full";
  std::string by = "simple";
  std::string phi_arg;
  int samples = 100;

  auto* c_validate = app.add_subcommand("validate", "check the Gamma-system axioms");
  c_validate->add_option("file", file)->required();

  auto* c_synth = app.add_subcommand("synthesize", "build a system from an elementary module");
  c_synth->add_option("file", file)->required();
  c_synth->add_option("--levels", levels, "maximal level N")->required();
  c_synth->add_option("--mode", mode, "full | torsion");
  c_synth->add_option("--out", g.out_path, "write the system document here");

  auto* c_chi = app.add_subcommand("char-ideal", "characteristic ideal bookkeeping");
  c_chi->add_option("file", file)->required();

  auto* c_zero = app.add_subcommand("zero-set", "character zeros of an element");
  c_zero->add_option("file", file)->required();
  c_zero->add_option("--level", level, "level n")->required();
  c_zero->add_flag("--flats", flats, "also report the greedy flat cover");

  auto* c_ns = app.add_subcommand("ns-check", "no-simple-divisor hypothesis at a level");
  c_ns->add_option("file", file)->required();
  c_ns->add_option("--level", level, "level n")->required();

  auto* c_funeq = app.add_subcommand("funeq", "functional-equation shadow");
  c_funeq->add_option("file", file)->required();

  auto* c_fourier = app.add_subcommand("fourier-check", "round trip and compatibility");
  c_fourier->add_option("file", file)->required();
  c_fourier->add_option("--samples", samples, "random homomorphism samples");

  auto* c_twist = app.add_subcommand("twist", "twist a system by a unit character");
  c_twist->add_option("file", file)->required();
  c_twist->add_option("--phi", phi_arg, "unit values u1,...,ud")->required();
  c_twist->add_option("--out", g.out_path, "write the twisted system here");

  auto* c_split = app.add_subcommand("split", "split an elementary module");
  c_split->add_option("file", file)->required();
  c_split->add_option("--by", by, "simple | p");

  auto* c_growth = app.add_subcommand("growth", "free-rank growth profile");
  c_growth->add_option("file", file)->required();
  c_growth->add_option("--levels", levels, "levels 0..N")->required();

  CLI11_PARSE(app, argc, argv);
  if (prec->count()) g.precision = precision_opt;

  auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  try {
    if (c_validate->parsed()) {
      GammaSystem sys = system_from_json(load_document(file));
      SystemReport rep = validate(sys);
      emit(g, report_to_json(rep), report_to_text(rep), elapsed());
      return rep.all_pass() ? 0 : 1;
    }
    if (c_synth->parsed()) {
      Json doc = load_document(file);
      Config cfg = header_of(doc, g);
      ElementaryModule m = elementary_of(cfg, doc);
      SynthMode sm;
      if (mode == "full")
        sm = SynthMode::Full;
      else if (mode == "torsion")
        sm = SynthMode::Torsion;
      else
        throw input_error("--mode must be full or torsion");
      GammaSystem sys = from_torsion_module(cfg, m, levels, sm, enum_options(g));
      SystemReport rep = validate(sys);
      if (!g.out_path.empty()) write_output(g.out_path, system_to_json(sys));
      emit(g, report_to_json(rep), report_to_text(rep), elapsed());
      return rep.all_pass() ? 0 : 1;
    }
    if (c_chi->parsed()) {
      Json doc = load_document(file);
      Config cfg = header_of(doc, g);
      ElementaryModule m = elementary_of(cfg, doc);
      IdealDescriptor ideal = chi(cfg, m);
      IdealDescriptor sharped = sharp_ideal(cfg, ideal);
      Json out;
      out["chi"] = ideal_to_json(cfg, ideal);
      out["chi_sharp"] = ideal_to_json(cfg, sharped);
      out["unit_ideal"] = ideal.is_unit();
      std::ostringstream text;
      text << "chi(M) " << (ideal.is_unit() ? "= (1): the module is pseudo-null" : "=") << "\n";
      for (const auto& [xi, r] : ideal.factors)
        text << "  (" << element_to_text(cfg, xi) << ")^" << r << "\n";
      text << "chi(M)^sharp =\n";
      for (const auto& [xi, r] : sharped.factors)
        text << "  (" << element_to_text(cfg, xi) << ")^" << r << "\n";
      emit(g, out, text.str(), elapsed());
      return 0;
    }
    if (c_zero->parsed()) {
      Json doc = load_document(file);
      Config cfg = header_of(doc, g);
      AlgebraElement xi = element_of(cfg, doc);
      auto zeros = zero_set_level(cfg, xi, level, enum_options(g));
      ZeroSetReport rep;
      if (flats) {
        rep = detect_flats(cfg, zeros, level, enum_options(g));
      } else {
        rep.level = level;
        rep.zeros = zeros;
      }
      emit(g, zeroset_to_json(rep), zeroset_to_text(rep), elapsed());
      return 0;
    }
    if (c_ns->parsed()) {
      Json doc = load_document(file);
      Config cfg = header_of(doc, g);
      AlgebraElement xi = element_of(cfg, doc);
      NsReport rep = ns_hypothesis_level(cfg, xi, level, enum_options(g));
      emit(g, ns_to_json(rep), ns_to_text(rep), elapsed());
      return rep.verdict == NsVerdict::Holds ? 0 : 1;
    }
    if (c_funeq->parsed()) {
      GammaSystem sys = system_from_json(load_document(file));
      FuneqReport rep = funeq_check(sys);
      emit(g, funeq_to_json(rep), funeq_to_text(rep), elapsed());
      return rep.verdict == FuneqVerdict::Pass ? 0 : 1;
    }
    if (c_fourier->parsed()) {
      GammaSystem sys = system_from_json(load_document(file));
      FourierCheck rep = fourier_check(sys, samples, 0x1a71u);
      emit(g, fourier_to_json(rep), fourier_to_text(rep), elapsed());
      return rep.round_trip_ok && rep.compatibility_ok ? 0 : 1;
    }
    if (c_twist->parsed()) {
      GammaSystem sys = system_from_json(load_document(file));
      UnitCharacter phi;
      std::stringstream ss(phi_arg);
      std::string tok;
      while (std::getline(ss, tok, ',')) phi.units.emplace_back(tok);
      if (static_cast<int>(phi.units.size()) != sys.cfg.d)
        throw input_error("--phi needs d = " + std::to_string(sys.cfg.d) + " unit values");
      GammaSystem tw = twist_system(sys, phi);
      SystemReport rep = validate(tw);
      if (!g.out_path.empty()) write_output(g.out_path, system_to_json(tw));
      emit(g, report_to_json(rep), report_to_text(rep), elapsed());
      return rep.all_pass() ? 0 : 1;
    }
    if (c_split->parsed()) {
      Json doc = load_document(file);
      Config cfg = header_of(doc, g);
      ElementaryModule m = elementary_of(cfg, doc);
      SplitResult rep;
      if (by == "simple")
        rep = split_simple(cfg, m);
      else if (by == "p")
        rep = split_p(cfg, m);
      else
        throw input_error("--by must be simple or p");
      emit(g, split_to_json(cfg, rep), split_to_text(cfg, rep), elapsed());
      return 0;
    }
    if (c_growth->parsed()) {
      Json doc = load_document(file);
      Config cfg = header_of(doc, g);
      AlgebraElement xi = element_of(cfg, doc);
      GrowthProfile rep = growth_profile(cfg, xi, levels, enum_options(g));
      emit(g, growth_to_json(rep), growth_to_text(rep), elapsed());
      return rep.bound_holds ? 0 : 1;
    }
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
