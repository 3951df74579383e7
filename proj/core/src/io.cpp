#include "iwalab/io.hpp"

#include <sstream>

namespace iwalab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw input_error("at " + path + ": " + what);
}

Int int_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Int(static_cast<long>(j.get<long long>()));
  if (j.is_string()) {
    try {
      return Int(j.get<std::string>());
    } catch (const std::invalid_argument&) {
      fail(path, "not a decimal integer string");
    }
  }
  fail(path, "expected an integer or a decimal string");
}

Json int_to_json(const Int& x) {
  if (x.fits_slong_p()) return Json(x.get_si());
  return Json(x.get_str());
}

long long_from_json(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

Json matrix_to_json(const IntMat& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(int_to_json(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

IntMat matrix_from_json(const Json& j, const std::string& path, std::size_t rows,
                        std::size_t cols, bool fixed_cols = true) {
  if (!j.is_array()) fail(path, "expected a matrix (array of rows)");
  if (j.size() != rows) fail(path, "expected " + std::to_string(rows) + " rows");
  std::size_t c = cols;
  if (!fixed_cols) c = j.empty() ? 0 : j[0].size();
  IntMat m(rows, c);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != c)
      fail(path + "[" + std::to_string(i) + "]", "row of length " + std::to_string(c) +
                                                     " expected");
    for (std::size_t k = 0; k < c; ++k)
      m.at(i, k) = int_from_json(j[i][k], path + "[" + std::to_string(i) + "][" +
                                              std::to_string(k) + "]");
  }
  return m;
}

Rat rat_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rat(Int(static_cast<long>(j.get<long long>())));
  if (!j.is_string()) fail(path, "expected a rational \"num/den\" string");
  std::string s = j.get<std::string>();
  try {
    Rat r(s);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    fail(path, "not a rational number");
  }
}

std::string rat_to_string(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace

Json config_to_json(const Config& cfg) {
  Json j;
  j["p"] = cfg.p;
  j["d"] = cfg.d;
  j["precision"] = cfg.precision;
  return j;
}

Config config_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected the header object {p, d, precision}");
  Config cfg;
  if (!j.contains("p")) fail(path + ".p", "missing");
  cfg.p = long_from_json(j.at("p"), path + ".p");
  if (!j.contains("d")) fail(path + ".d", "missing");
  cfg.d = static_cast<int>(long_from_json(j.at("d"), path + ".d"));
  if (!j.contains("precision")) fail(path + ".precision", "missing");
  cfg.precision = static_cast<int>(long_from_json(j.at("precision"), path + ".precision"));
  try {
    cfg.check();
  } catch (const input_error& e) {
    fail(path, e.what());
  }
  return cfg;
}

Json element_to_json(const Config& cfg, const AlgebraElement& x) {
  AlgebraElement n = normalized(cfg, x);
  Json terms = Json::array();
  for (const auto& [v, c] : n.terms) {
    Json coeff;
    Cyclotomic cc = c.reduced_order();
    if (cc.order_exponent() == 0) {
      coeff = Json(cc.integer_value().get_str());
    } else {
      Json coords = Json::array();
      for (const Int& e : cc.coords()) coords.push_back(e.get_str());
      coeff = Json::array({Json(cc.order_exponent()), coords});
    }
    Json exps = Json::array();
    for (long e : v) exps.push_back(e);
    terms.push_back(Json::array({coeff, exps}));
  }
  if (n.ring == CoeffRing::ExactInt && n.denom == 1) return terms;
  Json j;
  j["ring"] = n.ring == CoeffRing::ExactInt ? "int" : n.ring == CoeffRing::ModPM ? "mod" : "cyc";
  j["denom"] = n.denom.get_str();
  j["terms"] = std::move(terms);
  return j;
}

AlgebraElement element_from_json(const Config& cfg, const Json& j, const std::string& path) {
  AlgebraElement x;
  const Json* terms = &j;
  if (j.is_object()) {
    if (!j.contains("terms")) fail(path + ".terms", "missing");
    terms = &j.at("terms");
    if (j.contains("ring")) {
      std::string r = j.at("ring").get<std::string>();
      if (r == "int")
        x.ring = CoeffRing::ExactInt;
      else if (r == "mod")
        x.ring = CoeffRing::ModPM;
      else if (r == "cyc")
        x.ring = CoeffRing::Cyclotomic;
      else
        fail(path + ".ring", "expected one of int|mod|cyc");
    }
    if (j.contains("denom")) x.denom = int_from_json(j.at("denom"), path + ".denom");
    if (x.denom <= 0 || (x.denom != 1 && !is_p_power(x.denom, cfg.p)))
      fail(path + ".denom", "denominator must be a positive power of p");
  }
  if (!terms->is_array()) fail(path, "expected a list of [coefficient, exponent-vector] pairs");
  for (std::size_t t = 0; t < terms->size(); ++t) {
    const Json& pair = (*terms)[t];
    std::string tp = path + "[" + std::to_string(t) + "]";
    if (!pair.is_array() || pair.size() != 2) fail(tp, "expected [coefficient, exponents]");
    const Json& ce = pair[0];
    Cyclotomic coeff;
    if (ce.is_array()) {
      if (ce.size() != 2 || !ce[0].is_number_integer())
        fail(tp + "[0]", "cyclotomic coefficient is [l, coords]");
      unsigned l = ce[0].get<unsigned>();
      if (!ce[1].is_array()) fail(tp + "[0][1]", "expected the coordinate list");
      std::vector<Int> coords;
      for (std::size_t i = 0; i < ce[1].size(); ++i)
        coords.push_back(int_from_json(ce[1][i], tp + "[0][1]"));
      if (coords.size() != static_cast<std::size_t>(Cyclotomic::degree(cfg.p, l)))
        fail(tp + "[0][1]", "expected " + std::to_string(Cyclotomic::degree(cfg.p, l)) +
                                " coordinates for order exponent " + std::to_string(l));
      coeff = Cyclotomic(cfg.p, l, std::move(coords));
    } else {
      coeff = Cyclotomic::integer(cfg.p, int_from_json(ce, tp + "[0]"));
    }
    const Json& ev = pair[1];
    if (!ev.is_array() || ev.size() != static_cast<std::size_t>(cfg.d))
      fail(tp + "[1]", "expected an exponent vector of length d = " + std::to_string(cfg.d));
    ExpVec v(cfg.d);
    for (int i = 0; i < cfg.d; ++i)
      v[i] = long_from_json(ev[i], tp + "[1][" + std::to_string(i) + "]");
    if (coeff.order_exponent() > 0 && x.ring != CoeffRing::Cyclotomic)
      fail(tp, "cyclotomic coefficient in a non-cyclotomic element");
    auto [it, fresh] = x.terms.emplace(std::move(v), std::move(coeff));
    if (!fresh) fail(tp + "[1]", "duplicate exponent vector");
  }
  return normalized(cfg, x);
}

Json module_to_json(const FiniteModule& m) {
  Json j;
  j["rank"] = m.rank();
  IntMat rel(m.rank(), m.rank());
  for (std::size_t i = 0; i < m.rank(); ++i) rel.at(i, i) = m.divisors[i];
  j["relations"] = matrix_to_json(rel);
  Json acts = Json::array();
  for (const auto& a : m.actions) acts.push_back(matrix_to_json(a));
  j["actions"] = std::move(acts);
  j["level"] = m.level;
  return j;
}

FiniteModule module_from_json(const Config& cfg, const Json& j, const std::string& path,
                              bool strict) {
  if (!j.is_object()) fail(path, "expected a module object {rank, relations, actions, level}");
  if (!j.contains("rank")) fail(path + ".rank", "missing");
  long rank = long_from_json(j.at("rank"), path + ".rank");
  if (rank < 0) fail(path + ".rank", "negative rank");
  if (!j.contains("level")) fail(path + ".level", "missing");
  int level = static_cast<int>(long_from_json(j.at("level"), path + ".level"));
  if (!j.contains("relations")) fail(path + ".relations", "missing");
  IntMat rel = matrix_from_json(j.at("relations"), path + ".relations",
                                static_cast<std::size_t>(rank), 0, false);
  if (!j.contains("actions")) fail(path + ".actions", "missing");
  const Json& ja = j.at("actions");
  if (!ja.is_array() || ja.size() != static_cast<std::size_t>(cfg.d))
    fail(path + ".actions", "expected d = " + std::to_string(cfg.d) + " action matrices");
  std::vector<IntMat> actions;
  for (std::size_t k = 0; k < ja.size(); ++k)
    actions.push_back(matrix_from_json(ja[k], path + ".actions[" + std::to_string(k) + "]",
                                       static_cast<std::size_t>(rank),
                                       static_cast<std::size_t>(rank)));
  try {
    return presented_module(cfg, level, static_cast<std::size_t>(rank), rel, actions,
                            TorsionPolicy::RequireFinite, strict);
  } catch (const input_error& e) {
    fail(path, e.what());
  }
}

Json system_to_json(const GammaSystem& sys) {
  Json j;
  j["header"] = config_to_json(sys.cfg);
  j["max_level"] = sys.max_level;
  Json levels = Json::array();
  for (int n = 0; n <= sys.max_level; ++n) {
    const SystemLevel& L = sys.level(n);
    Json lv;
    lv["level"] = n;
    lv["a"] = module_to_json(L.a);
    lv["b"] = module_to_json(L.b);
    Json rows = Json::array();
    for (std::size_t i = 0; i < L.a.rank(); ++i) {
      Json row = Json::array();
      for (std::size_t k = 0; k < L.b.rank(); ++k) row.push_back(rat_to_string(L.pairing.vals[i][k]));
      rows.push_back(std::move(row));
    }
    lv["pairing"] = std::move(rows);
    levels.push_back(std::move(lv));
  }
  j["levels"] = std::move(levels);
  Json maps = Json::array();
  for (const auto& [key, t] : sys.maps) {
    Json tm;
    tm["m"] = key.first;
    tm["n"] = key.second;
    tm["r_a"] = matrix_to_json(t.r_a.mat);
    tm["r_b"] = matrix_to_json(t.r_b.mat);
    tm["k_a"] = matrix_to_json(t.k_a.mat);
    tm["k_b"] = matrix_to_json(t.k_b.mat);
    maps.push_back(std::move(tm));
  }
  j["maps"] = std::move(maps);
  return j;
}

GammaSystem system_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a system document");
  if (!j.contains("header")) fail(path + ".header", "missing");
  Config cfg = config_from_json(j.at("header"), path + ".header");
  GammaSystem sys;
  sys.cfg = cfg;
  if (!j.contains("max_level")) fail(path + ".max_level", "missing");
  sys.max_level = static_cast<int>(long_from_json(j.at("max_level"), path + ".max_level"));
  if (sys.max_level < 0) fail(path + ".max_level", "negative");
  if (!j.contains("levels")) fail(path + ".levels", "missing");
  const Json& jl = j.at("levels");
  if (!jl.is_array() || jl.size() != static_cast<std::size_t>(sys.max_level + 1))
    fail(path + ".levels", "expected " + std::to_string(sys.max_level + 1) + " level blocks");

  // the file's matrices refer to the presentations as given; normalization
  // transports them through coords/section
  std::vector<FiniteModule> as, bs;
  for (int n = 0; n <= sys.max_level; ++n) {
    std::string lp = path + ".levels[" + std::to_string(n) + "]";
    const Json& lv = jl[static_cast<std::size_t>(n)];
    if (!lv.is_object()) fail(lp, "expected a level object");
    if (lv.contains("level") &&
        long_from_json(lv.at("level"), lp + ".level") != static_cast<long>(n))
      fail(lp + ".level", "levels must appear in order 0..N");
    if (!lv.contains("a")) fail(lp + ".a", "missing");
    if (!lv.contains("b")) fail(lp + ".b", "missing");
    FiniteModule a = module_from_json(cfg, lv.at("a"), lp + ".a");
    FiniteModule b = module_from_json(cfg, lv.at("b"), lp + ".b");
    if (a.level != n || b.level != n) fail(lp, "module level does not match the block level");
    if (!lv.contains("pairing")) fail(lp + ".pairing", "missing");
    const Json& jp = lv.at("pairing");
    if (!jp.is_array() || jp.size() != a.ambient_rank)
      fail(lp + ".pairing", "expected one row per a-generator of the given presentation");
    std::vector<std::vector<Rat>> file_vals(a.ambient_rank,
                                            std::vector<Rat>(b.ambient_rank, Rat(0)));
    for (std::size_t i = 0; i < a.ambient_rank; ++i) {
      if (!jp[i].is_array() || jp[i].size() != b.ambient_rank)
        fail(lp + ".pairing[" + std::to_string(i) + "]", "row length mismatch");
      for (std::size_t k = 0; k < b.ambient_rank; ++k)
        file_vals[i][k] = rat_from_json(jp[i][k], lp + ".pairing[" + std::to_string(i) + "][" +
                                                      std::to_string(k) + "]");
    }
    std::vector<std::vector<Rat>> vals(a.rank(), std::vector<Rat>(b.rank(), Rat(0)));
    for (std::size_t i = 0; i < a.rank(); ++i)
      for (std::size_t k = 0; k < b.rank(); ++k) {
        Rat acc(0);
        for (std::size_t ii = 0; ii < a.ambient_rank; ++ii)
          for (std::size_t kk = 0; kk < b.ambient_rank; ++kk)
            if (a.section.at(ii, i) != 0 && b.section.at(kk, k) != 0)
              acc += Rat(a.section.at(ii, i)) * file_vals[ii][kk] * Rat(b.section.at(kk, k));
        vals[i][k] = mod_one(acc);
      }
    PairingMatrix P = [&] {
      try {
        return make_pairing(a, b, vals, "pairing at level " + std::to_string(n));
      } catch (const input_error& e) {
        fail(lp + ".pairing", e.what());
      }
    }();
    as.push_back(a);
    bs.push_back(b);
    sys.levels.push_back({a, b, std::move(P)});
  }
  if (!j.contains("maps")) fail(path + ".maps", "missing");
  const Json& jm = j.at("maps");
  if (!jm.is_array()) fail(path + ".maps", "expected an array of transition blocks");
  for (std::size_t t = 0; t < jm.size(); ++t) {
    std::string mp = path + ".maps[" + std::to_string(t) + "]";
    const Json& tm = jm[t];
    if (!tm.is_object()) fail(mp, "expected a transition block");
    if (!tm.contains("m") || !tm.contains("n")) fail(mp, "missing level indices m, n");
    int m = static_cast<int>(long_from_json(tm.at("m"), mp + ".m"));
    int n = static_cast<int>(long_from_json(tm.at("n"), mp + ".n"));
    if (m < 0 || n > sys.max_level || m >= n) fail(mp, "levels must satisfy 0 <= m < n <= N");
    auto load = [&](const char* name, const FiniteModule& src, const FiniteModule& tgt) {
      if (!tm.contains(name)) fail(mp + "." + name, "missing");
      IntMat file_mat = matrix_from_json(tm.at(name), mp + "." + name, tgt.ambient_rank,
                                         src.ambient_rank);
      IntMat mat = tgt.coords * file_mat * src.section;
      try {
        return ModuleMap::make(src, tgt, std::move(mat), std::string(name) + " at " + mp);
      } catch (const input_error& e) {
        fail(mp + "." + name, e.what());
      }
    };
    TransitionPair tp{load("r_a", as[m], as[n]), load("r_b", bs[m], bs[n]),
                      load("k_a", as[n], as[m]), load("k_b", bs[n], bs[m])};
    sys.maps[{m, n}] = std::move(tp);
  }
  for (int m = 0; m <= sys.max_level; ++m)
    for (int n = m + 1; n <= sys.max_level; ++n)
      if (!sys.maps.count({m, n}))
        fail(path + ".maps", "missing transition block for levels (" + std::to_string(m) + "," +
                                 std::to_string(n) + ")");
  sys.check_shape();
  return sys;
}

Json elementary_to_json(const Config& cfg, const ElementaryModule& m) {
  Json j = Json::array();
  for (const auto& [xi, r] : m.factors) {
    Json f;
    f["xi"] = element_to_json(cfg, xi);
    f["r"] = r;
    j.push_back(std::move(f));
  }
  return j;
}

ElementaryModule elementary_from_json(const Config& cfg, const Json& j,
                                      const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of factors {xi, r}");
  ElementaryModule m;
  for (std::size_t t = 0; t < j.size(); ++t) {
    std::string fp = path + "[" + std::to_string(t) + "]";
    const Json& f = j[t];
    if (!f.is_object() || !f.contains("xi")) fail(fp + ".xi", "missing");
    int r = 1;
    if (f.contains("r")) r = static_cast<int>(long_from_json(f.at("r"), fp + ".r"));
    if (r < 1) fail(fp + ".r", "multiplicity must be >= 1");
    AlgebraElement xi = element_from_json(cfg, f.at("xi"), fp + ".xi");
    if (xi.is_zero()) fail(fp + ".xi", "zero factor");
    m.factors.emplace_back(std::move(xi), r);
  }
  return m;
}

Json character_to_json(const Character& w) {
  Json j;
  j["level"] = w.level;
  j["exps"] = w.exps;
  return j;
}

Json flat_to_json(const FlatLevel& f) {
  Json j;
  j["level"] = f.level;
  j["codim"] = f.codim();
  j["basis"] = matrix_to_json(f.basis);
  j["targets"] = f.targets;
  return j;
}

std::string element_to_text(const Config& cfg, const AlgebraElement& x) {
  AlgebraElement n = normalized(cfg, x);
  if (n.is_zero()) return "0";
  std::ostringstream out;
  if (n.denom != 1) out << "(1/" << n.denom.get_str() << ")*(";
  bool first = true;
  for (const auto& [v, c] : n.terms) {
    std::string cs;
    Cyclotomic cc = c.reduced_order();
    if (cc.order_exponent() == 0) {
      cs = cc.integer_value().get_str();
    } else {
      std::ostringstream co;
      co << "cyc" << cc.order_exponent() << "[";
      for (std::size_t i = 0; i < cc.coords().size(); ++i)
        co << (i ? "," : "") << cc.coords()[i].get_str();
      co << "]";
      cs = co.str();
    }
    if (!first) out << " + ";
    first = false;
    out << cs;
    for (int i = 0; i < cfg.d; ++i) {
      if (v[i] == 0) continue;
      out << "*g" << (i + 1);
      if (v[i] != 1) out << "^" << v[i];
    }
  }
  if (n.denom != 1) out << ")";
  return out.str();
}

Json report_to_json(const SystemReport& rep) {
  Json j;
  j["all_pass"] = rep.all_pass();
  Json sum;
  Json oa = Json::array(), ob = Json::array();
  for (const auto& o : rep.orders_a) oa.push_back(int_to_json(o));
  for (const auto& o : rep.orders_b) ob.push_back(int_to_json(o));
  sum["orders_a"] = std::move(oa);
  sum["orders_b"] = std::move(ob);
  Json da = Json::array(), db = Json::array();
  for (const auto& dv : rep.divisors_a) {
    Json row = Json::array();
    for (const auto& q : dv) row.push_back(int_to_json(q));
    da.push_back(std::move(row));
  }
  for (const auto& dv : rep.divisors_b) {
    Json row = Json::array();
    for (const auto& q : dv) row.push_back(int_to_json(q));
    db.push_back(std::move(row));
  }
  sum["divisors_a"] = std::move(da);
  sum["divisors_b"] = std::move(db);
  j["summary"] = std::move(sum);
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json cj;
    cj["axiom"] = c.axiom;
    cj["m"] = c.m;
    cj["n"] = c.n;
    cj["pass"] = c.pass;
    cj["detail"] = c.detail;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  return j;
}

std::string report_to_text(const SystemReport& rep) {
  std::ostringstream out;
  for (std::size_t n = 0; n < rep.orders_a.size(); ++n) {
    out << "level " << n << ": |a| = " << rep.orders_a[n].get_str()
        << ", |b| = " << rep.orders_b[n].get_str() << ", divisors_a = [";
    for (std::size_t i = 0; i < rep.divisors_a[n].size(); ++i)
      out << (i ? "," : "") << rep.divisors_a[n][i].get_str();
    out << "]\n";
  }
  for (const auto& c : rep.checks) {
    out << (c.pass ? "pass " : "FAIL ") << c.axiom;
    if (c.m >= 0) out << " (" << c.m << "," << c.n << ")";
    out << ": " << c.detail << "\n";
  }
  out << (rep.all_pass() ? "all axioms hold\n" : "axiom violations found\n");
  return out.str();
}

Json zeroset_to_json(const ZeroSetReport& rep) {
  Json j;
  j["level"] = rep.level;
  Json zeros = Json::array();
  for (const auto& z : rep.zeros) zeros.push_back(z.exps);
  j["zeros"] = std::move(zeros);
  Json cover = Json::array();
  for (const auto& f : rep.cover) cover.push_back(flat_to_json(f));
  j["cover"] = std::move(cover);
  Json res = Json::array();
  for (const auto& z : rep.residual) res.push_back(z.exps);
  j["residual"] = std::move(res);
  j["cover_exact"] = rep.cover_exact;
  j["full_codim_scan"] = rep.full_codim_scan;
  return j;
}

std::string zeroset_to_text(const ZeroSetReport& rep) {
  std::ostringstream out;
  out << "level " << rep.level << ": " << rep.zeros.size() << " zero character(s)\n";
  for (const auto& z : rep.zeros) {
    out << "  (";
    for (std::size_t i = 0; i < z.exps.size(); ++i) out << (i ? "," : "") << z.exps[i];
    out << ")\n";
  }
  for (const auto& f : rep.cover) {
    out << "flat codim " << f.codim() << ": rows ";
    for (std::size_t i = 0; i < f.basis.rows(); ++i) {
      out << "(";
      for (std::size_t k = 0; k < f.basis.cols(); ++k)
        out << (k ? "," : "") << f.basis.at(i, k).get_str();
      out << ")";
    }
    out << " targets (";
    for (std::size_t i = 0; i < f.targets.size(); ++i) out << (i ? "," : "") << f.targets[i];
    out << ")\n";
  }
  out << "residual: " << rep.residual.size() << "\n";
  return out.str();
}

Json ns_to_json(const NsReport& rep) {
  Json j;
  j["level"] = rep.level;
  j["verdict"] = rep.verdict == NsVerdict::Holds
                     ? "holds"
                     : rep.verdict == NsVerdict::Violated ? "violated" : "undetermined";
  j["note"] = rep.note;
  if (rep.witness) j["witness"] = flat_to_json(*rep.witness);
  j["zero_set"] = zeroset_to_json(rep.zero_report);
  return j;
}

std::string ns_to_text(const NsReport& rep) {
  std::ostringstream out;
  out << "ns-hypothesis at level " << rep.level << ": "
      << (rep.verdict == NsVerdict::Holds
              ? "holds"
              : rep.verdict == NsVerdict::Violated ? "violated" : "undetermined")
      << "\n"
      << rep.note << "\n";
  return out.str();
}

Json funeq_to_json(const FuneqReport& rep) {
  Json j;
  j["verdict"] = rep.verdict == FuneqVerdict::Pass
                     ? "pass"
                     : rep.verdict == FuneqVerdict::Fail ? "fail" : "undetermined";
  Json levels = Json::array();
  for (const auto& lv : rep.levels) {
    Json l;
    l["level"] = lv.level;
    l["orders_equal"] = lv.orders_equal;
    l["divisors_equal"] = lv.divisors_equal;
    l["iso"] = lv.iso == IsoVerdict::Yes ? "yes"
                                         : lv.iso == IsoVerdict::No ? "no" : "undetermined";
    l["note"] = lv.note;
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  j["stabilized"] = rep.invariants.all_stabilized;
  return j;
}

std::string funeq_to_text(const FuneqReport& rep) {
  std::ostringstream out;
  for (const auto& lv : rep.levels) {
    out << "level " << lv.level << ": orders " << (lv.orders_equal ? "equal" : "DIFFER")
        << ", divisors " << (lv.divisors_equal ? "equal" : "DIFFER") << ", equivariant iso "
        << (lv.iso == IsoVerdict::Yes ? "yes" : lv.iso == IsoVerdict::No ? "NO" : "undetermined");
    if (!lv.note.empty()) out << " (" << lv.note << ")";
    out << "\n";
  }
  out << "stabilization: " << (rep.invariants.all_stabilized ? "observed" : "NOT observed")
      << "\n";
  out << "verdict: "
      << (rep.verdict == FuneqVerdict::Pass
              ? "pass"
              : rep.verdict == FuneqVerdict::Fail ? "fail" : "undetermined")
      << "\n";
  return out.str();
}

Json fourier_to_json(const FourierCheck& rep) {
  Json j;
  j["round_trip_ok"] = rep.round_trip_ok;
  j["compatibility_ok"] = rep.compatibility_ok;
  j["samples"] = rep.samples;
  j["detail"] = rep.detail;
  return j;
}

std::string fourier_to_text(const FourierCheck& rep) {
  std::ostringstream out;
  out << "round trip: " << (rep.round_trip_ok ? "ok" : "FAIL") << "\n";
  out << "projective compatibility: " << (rep.compatibility_ok ? "ok" : "FAIL") << "\n";
  out << "samples: " << rep.samples << "\n";
  if (!rep.detail.empty()) out << rep.detail << "\n";
  return out.str();
}

Json growth_to_json(const GrowthProfile& rep) {
  Json j;
  j["ranks"] = rep.ranks;
  j["ratios"] = rep.ratios;
  j["fitted_constant"] = rep.fitted_constant;
  j["bound_holds"] = rep.bound_holds;
  j["eventually_constant"] = rep.eventually_constant;
  return j;
}

std::string growth_to_text(const GrowthProfile& rep) {
  std::ostringstream out;
  out << "free ranks:";
  for (long r : rep.ranks) out << " " << r;
  out << "\nfitted constant C = " << rep.fitted_constant << ", bound "
      << (rep.bound_holds ? "holds" : "FAILS") << ", eventually constant: "
      << (rep.eventually_constant ? "yes" : "no") << "\n";
  return out.str();
}

Json split_to_json(const Config& cfg, const SplitResult& rep) {
  Json j;
  j["first"] = elementary_to_json(cfg, rep.first);
  j["second"] = elementary_to_json(cfg, rep.second);
  j["warnings"] = rep.warnings;
  return j;
}

std::string split_to_text(const Config& cfg, const SplitResult& rep) {
  std::ostringstream out;
  out << "first part (" << rep.first.factors.size() << " factor(s)):\n";
  for (const auto& [xi, r] : rep.first.factors)
    out << "  (" << element_to_text(cfg, xi) << ")^" << r << "\n";
  out << "second part (" << rep.second.factors.size() << " factor(s)):\n";
  for (const auto& [xi, r] : rep.second.factors)
    out << "  (" << element_to_text(cfg, xi) << ")^" << r << "\n";
  for (const auto& w : rep.warnings) out << "warning: " << w << "\n";
  return out.str();
}

Json ideal_to_json(const Config& cfg, const IdealDescriptor& ideal) {
  Json j = Json::array();
  for (const auto& [xi, r] : ideal.factors) {
    Json f;
    f["xi"] = element_to_json(cfg, xi);
    f["r"] = r;
    j.push_back(std::move(f));
  }
  return j;
}

}  // namespace iwalab
