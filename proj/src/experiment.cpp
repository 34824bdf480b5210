#include "iet/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "iet/error.hpp"

namespace iet {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json int_json(const mpz_class& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

mpz_class int_from_json(const json& j) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) return mpz_class(j.get<std::string>());
  throw Error(Errc::parse_error, "expected an integer, got " + j.dump());
}

mpq_class exact_rational(const Scalar& s, const char* what) {
  if (s.kind() != ScalarKind::rational) {
    throw Error(Errc::bad_inputs, std::string(what) + " must be rational");
  }
  return s.rational_value();
}

std::string real_str(const Real& r) { return r.str(17); }

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& v : row) r.push_back(int_json(v));
    out.push_back(r);
  }
  return out;
}

std::ofstream open_out(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(fs::path(cfg.out) / fs::path(name).parent_path());
  std::ofstream f(fs::path(cfg.out) / name, std::ios::binary);
  if (!f) throw Error(Errc::bad_argument, "cannot write " + (fs::path(cfg.out) / name).string());
  return f;
}

struct Context {
  json config;
  std::string hash;
  Iet t;
};

Context load(const ExperimentConfig& cfg, const std::string& command) {
  Context c{config_json(cfg, command), "", Iet()};
  c.hash = fnv1a_hex(c.config.dump());
  c.t = iet_from_json(c.config["instance"]);
  return c;
}

json stamp(const Context& c) { return {{"config_hash", c.hash}, {"version", kVersion}}; }

std::string csv_header(const Context& c) {
  return std::string("# config_hash=") + c.hash + " version=" + kVersion + "\n";
}

void write_json(const ExperimentConfig& cfg, const std::string& name, const json& j) {
  auto f = open_out(cfg, name);
  f << j.dump(2) << "\n";
}

Roof make_roof(const Context& c) { return Roof(c.t, roof_from_json(c.t, c.config["roof"])); }

}  // namespace

std::vector<std::string> builtin_names() {
  return {"golden", "sqrt2", "genus2-loop", "unbounded-quotients", "euclid"};
}

Iet builtin_instance(const std::string& name) {
  const auto rot = Combinatorics::from_rows({"A", "B"}, {"A", "B"}, {"B", "A"});
  if (name == "golden") return self_similar(rot, {0, 1}).iet;
  if (name == "sqrt2") {
    return Iet::build(rot, {Scalar::quadratic(2, -1, 2, 2), Scalar::quadratic(0, 1, 2, 2)});
  }
  if (name == "genus2-loop") {
    const auto c = Combinatorics::from_rows({"A", "B", "C", "D"}, {"A", "B", "C", "D"},
                                            {"D", "C", "B", "A"});
    return self_similar(c, {0, 0, 1, 1, 0, 1, 1, 0, 0, 1}).iet;
  }
  if (name == "unbounded-quotients") {
    // alpha = [0; 1, 2, 3, ..., 60] as an exact rational.
    mpq_class alpha = 0;
    for (int a = 60; a >= 1; --a) alpha = 1 / (a + alpha);
    alpha.canonicalize();
    return Iet::build(rot, {Scalar::rational(1 - alpha), Scalar::rational(alpha)});
  }
  if (name == "euclid") {
    return Iet::build(rot, {Scalar::rational(mpq_class(3, 5)), Scalar::rational(mpq_class(2, 5))});
  }
  throw Error(Errc::bad_argument, "unknown builtin " + name);
}

json scalar_to_json(const Scalar& s) {
  switch (s.kind()) {
    case ScalarKind::rational: {
      const mpq_class v = s.rational_value();
      return {{"kind", "rational"}, {"num", int_json(v.get_num())}, {"den", int_json(v.get_den())}};
    }
    case ScalarKind::quadratic:
      return {{"kind", "quadratic"}, {"a", int_json(s.a())}, {"b", int_json(s.b())},
              {"q", int_json(s.q())},  {"D", s.field()}};
    case ScalarKind::floating:
      return {{"kind", "float"}, {"value", s.value().str(40)}, {"radius", s.radius().str(6)}};
  }
  return nullptr;
}

Scalar scalar_from_json(const json& j) {
  if (j.is_string()) return Scalar::parse_exact(j.get<std::string>());
  if (j.is_number_integer()) return Scalar::integer(j.get<long>());
  if (j.is_number_float()) return Scalar::floating(Real(j.get<double>()));
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::parse_error, "bad scalar " + j.dump());
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "rational") return Scalar::rational(int_from_json(j.at("num")), int_from_json(j.at("den")));
  if (kind == "quadratic") {
    return Scalar::quadratic(int_from_json(j.at("a")), int_from_json(j.at("b")),
                             int_from_json(j.at("q")), j.at("D").get<long>());
  }
  if (kind == "float") {
    const auto& v = j.at("value");
    return Scalar::floating(v.is_string() ? Real::from_string(v.get<std::string>()) : Real(v.get<double>()));
  }
  throw Error(Errc::parse_error, "unknown scalar kind " + kind);
}

json iet_to_json(const Iet& t) {
  const auto& c = t.comb();
  json j;
  j["alphabet"] = c.alphabet;
  for (int e = 0; e < 2; ++e) {
    json row = json::array();
    for (int a : c.order(e)) row.push_back(c.alphabet[a]);
    j[e == 0 ? "pi0" : "pi1"] = row;
  }
  json lengths = json::array();
  for (const auto& l : t.lengths()) lengths.push_back(scalar_to_json(l));
  j["lengths"] = lengths;
  return j;
}

Iet iet_from_json(const json& j) {
  try {
    const auto alphabet = j.at("alphabet").get<std::vector<std::string>>();
    const auto comb = Combinatorics::from_rows(alphabet, j.at("pi0").get<std::vector<std::string>>(),
                                               j.at("pi1").get<std::vector<std::string>>());
    std::vector<Scalar> lengths;
    for (const auto& l : j.at("lengths")) lengths.push_back(scalar_from_json(l));
    return Iet::build(comb, lengths);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("instance JSON: ") + e.what());
  }
}

namespace {

json read_json_source(const std::string& source) {
  try {
    if (!source.empty() && source.front() == '{') return json::parse(source);
    std::ifstream f(source);
    if (!f) throw Error(Errc::parse_error, "cannot open " + source);
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, source + ": " + e.what());
  }
}

}  // namespace

json resolve_instance(const std::string& source) {
  for (const auto& n : builtin_names()) {
    if (n == source) return iet_to_json(builtin_instance(n));
  }
  return iet_to_json(iet_from_json(read_json_source(source)));
}

json roof_to_json(const Iet& t, const RoofSpec& spec) {
  json j;
  json cp = json::object(), cm = json::object();
  for (int a = 0; a < t.d(); ++a) {
    if (!spec.c_plus[a].is_zero()) cp[t.comb().alphabet[a]] = scalar_to_json(spec.c_plus[a]);
    if (!spec.c_minus[a].is_zero()) cm[t.comb().alphabet[a]] = scalar_to_json(spec.c_minus[a]);
  }
  j["Cplus"] = cp;
  j["Cminus"] = cm;
  json g = json::array();
  for (const auto& term : spec.g) g.push_back({term.freq, real_str(term.a), real_str(term.b)});
  j["g"] = g;
  j["f0"] = spec.f0 ? json(real_str(*spec.f0)) : json(nullptr);
  j["f_min"] = real_str(spec.f_min);
  return j;
}

RoofSpec roof_from_json(const Iet& t, const json& j) {
  try {
    RoofSpec s;
    s.c_plus.assign(t.d(), Scalar());
    s.c_minus.assign(t.d(), Scalar());
    if (j.contains("Cplus")) {
      for (const auto& [name, v] : j.at("Cplus").items()) s.c_plus[t.comb().letter(name)] = scalar_from_json(v);
    }
    if (j.contains("Cminus")) {
      for (const auto& [name, v] : j.at("Cminus").items()) s.c_minus[t.comb().letter(name)] = scalar_from_json(v);
    }
    auto real_of = [](const json& v) {
      return v.is_string() ? Real::from_string(v.get<std::string>()) : Real(v.get<double>());
    };
    if (j.contains("g")) {
      for (const auto& term : j.at("g")) {
        s.g.push_back({term.at(0).get<long>(), real_of(term.at(1)), real_of(term.at(2))});
      }
    }
    if (j.contains("f0") && !j.at("f0").is_null()) s.f0 = real_of(j.at("f0"));
    if (j.contains("f_min")) s.f_min = real_of(j.at("f_min"));
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("roof JSON: ") + e.what());
  }
}

json resolve_roof(const Iet& t, const std::string& source) {
  if (source == "symmetric") return roof_to_json(t, symmetric_single_pair(t));
  return roof_to_json(t, roof_from_json(t, read_json_source(source)));
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json config_json(const ExperimentConfig& cfg, const std::string& command) {
  json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["instance"] = resolve_instance(cfg.instance);
  const Iet t = iet_from_json(j["instance"]);
  if (command == "induct") {
    j["schedule"] = cfg.schedule;
    j["depth"] = cfg.depth;
  } else if (command == "certify") {
    j["K"] = cfg.K;
  } else if (command == "gaps") {
    j["n_max"] = cfg.n_max;
  } else {
    j["roof"] = resolve_roof(t, cfg.roof);
    j["seed"] = cfg.seed;
    j["precision_bits"] = cfg.precision_bits;
    j["samples"] = cfg.samples;
    if (command == "audit") {
      j["K"] = cfg.K;
    } else {
      j["scales"] = cfg.scales;
      j["pairs"] = cfg.pairs;
      j["mode"] = cfg.mode;
      j["eps"] = cfg.eps;
      j["N"] = cfg.N;
      j["n_max"] = cfg.n_max;
      j["constants"] = cfg.constants == "measure" ? json("measure") : read_json_source(cfg.constants);
    }
  }
  return j;
}

ConstantInputs measure_constants(const Roof& roof, const ExperimentConfig& cfg) {
  const Iet& t = roof.iet();
  ConstantInputs in;
  in.c = mpq_class(1.1 * balance_constant_c(t, cfg.n_max));
  in.C = mpq_class(balance_matrix_constant(t, 30));
  in.d = t.d();
  in.C_tilde = exact_rational(roof.c_tilde(), "sum of singularity coefficients");
  const double m = canc_audit(roof, 8, cfg.samples, cfg.seed).m_prime_upto(8);
  in.M_prime = mpq_class(cfg.mode == "strict" ? 2 * m : m);
  in.D = mpq_class(estimate_D(roof).D);
  in.eps = exact_rational(Scalar::parse_exact(cfg.eps), "eps");
  in.N = cfg.N;
  return in;
}

ConstantInputs constants_from_json(const json& j) {
  auto q = [&](const char* key) {
    const json& v = j.at(key);
    return v.is_number_float() ? mpq_class(v.get<double>()) : exact_rational(scalar_from_json(v), key);
  };
  try {
    ConstantInputs in;
    in.c = q("c");
    in.C = q("C");
    in.d = j.at("d").get<int>();
    in.C_tilde = q("C_tilde");
    in.M_prime = q("M_prime");
    in.D = q("D");
    in.eps = q("eps");
    in.N = j.at("N").get<long>();
    return in;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("constants JSON: ") + e.what());
  }
}

json constants_to_json(const RatnerConstants& k) {
  auto q = [](const mpq_class& v) { return scalar_to_json(Scalar::rational(v)); };
  json in = {{"c", q(k.in.c)},           {"C", q(k.in.C)},   {"d", k.in.d},
             {"C_tilde", q(k.in.C_tilde)}, {"M_prime", q(k.in.M_prime)},
             {"D", q(k.in.D)},           {"eps", q(k.in.eps)}, {"N", k.in.N}};
  return {{"inputs", in},
          {"H", k.H.get_d()},
          {"p_low", k.p_low.get_d()},
          {"kappa", k.kappa.get_d()},
          {"delta", k.delta.get_d()}};
}

int cmd_induct(const ExperimentConfig& cfg, std::ostream& err) {
  if (cfg.depth < 0) {
    err << "depth must be >= 0\n";
    return kExitUsage;
  }
  if (cfg.schedule != "raw" && cfg.schedule != "zorich" && cfg.schedule != "mmy") {
    err << "schedule must be raw, zorich or mmy\n";
    return kExitUsage;
  }
  const Context c = load(cfg, "induct");
  Trace trace(c.t);
  Schedule s;
  try {
    const int K = static_cast<int>(cfg.depth);
    if (cfg.schedule == "raw") {
      s = raw_schedule(trace, K);
    } else if (cfg.schedule == "zorich") {
      s = zorich_schedule(trace, K);
    } else {
      s = mmy_schedule(trace, c.t.d() - 1, K);
    }
  } catch (const Error& e) {
    if (e.code() != Errc::tied_lengths) throw;
    err << "TiedLengths at step " << e.index().value_or(-1) << "\n";
    return kExitInduction;
  }
  const auto& names = c.t.comb().alphabet;
  auto f = open_out(cfg, "trace.jsonl");
  json head = stamp(c);
  head["config"] = c.config;
  f << head.dump() << "\n";
  const long last = s.times.empty() ? 0 : s.times.back();
  for (long n = 0; n < last; ++n) {
    json lengths = json::array();
    for (const auto& l : trace.lengths(n + 1)) lengths.push_back(scalar_to_json(l));
    json rec = {{"step", n},
                {"eps", trace.eps(n)},
                {"winner", names[trace.winner(n)]},
                {"theta_nonzero", {names[trace.winner(n)], names[trace.loser(n)]}},
                {"lengths", lengths}};
    f << rec.dump() << "\n";
  }
  json blocks = stamp(c);
  blocks["schedule"] = cfg.schedule;
  blocks["times"] = s.times;
  blocks["blocks"] = json::array();
  blocks["norms"] = json::array();
  for (const auto& b : s.blocks) {
    blocks["blocks"].push_back(matrix_json(b));
    blocks["norms"].push_back(int_json(sup_norm(b)));
  }
  write_json(cfg, "blocks.json", blocks);
  return kExitOk;
}

int cmd_certify(const ExperimentConfig& cfg, std::ostream& err) {
  if (cfg.K < 1) {
    err << "K must be >= 1\n";
    return kExitUsage;
  }
  const Context c = load(cfg, "certify");
  BoundedTypeCertificate cert;
  try {
    cert = bounded_type_certificate(c.t, cfg.K);
  } catch (const Error& e) {
    if (e.code() != Errc::tied_lengths) throw;
    err << "TiedLengths at step " << e.index().value_or(-1) << "\n";
    return kExitInduction;
  }
  json j = stamp(c);
  j["instance_hash"] = fnv1a_hex(c.config["instance"].dump());
  j["schedule"] = "mmy";
  j["K"] = cert.K;
  j["times"] = cert.times;
  j["norms"] = json::array();
  for (const auto& n : cert.norms) j["norms"].push_back(int_json(n));
  j["C_K"] = int_json(cert.C_K);
  j["periodic"] = cert.period ? json{{"period", *cert.period}, {"cycle_start", cert.cycle_start}}
                              : json(nullptr);
  j["certified"] = cert.certified;
  int code = kExitOk;
  if (cert.certified) {
    const mpz_class C = balance_matrix_constant(c.t, cfg.K);
    const BalanceAudit audit = balance_audit(c.t, cfg.K, Scalar::rational(C, 1));
    j["audit"] = {{"C", int_json(C)}, {"pass", audit.pass()}};
    auto f = open_out(cfg, "balance_audit.csv");
    f << csv_header(c) << "check,pass,count,witness\n";
    for (const auto& l : audit.lines) {
      f << l.name << "," << (l.pass ? 1 : 0) << "," << l.checks << ",\"" << l.witness << "\"\n";
      if (!l.pass) err << "audit " << l.name << " failed: " << l.witness << "\n";
    }
    if (!audit.pass()) code = kExitCertification;
  }
  write_json(cfg, "certificate.json", j);
  return code;
}

int cmd_gaps(const ExperimentConfig& cfg, std::ostream& err) {
  if (cfg.n_max < 1) {
    err << "n_max must be >= 1\n";
    return kExitUsage;
  }
  const Context c = load(cfg, "gaps");
  auto f = open_out(cfg, "gaps.csv");
  f << csv_header(c) << "n,j,scope,letter,min_gap,max_gap\n";
  f << std::setprecision(17);
  double cstar = 0;
  scan_partitions(c.t, cfg.n_max, [&](const GapExtremes& g) {
    const std::string letter = g.min_letter >= 0 ? c.t.comb().alphabet[g.min_letter] : "";
    f << g.n << "," << g.min_j << "," << scope_name(g.min_scope) << "," << letter << ","
      << g.min_gap << "," << g.max_gap << "\n";
    cstar = std::max({cstar, 1.0 / (g.n * g.min_gap), g.n * g.max_gap});
    return true;
  });
  json j = stamp(c);
  j["n_max"] = cfg.n_max;
  j["c_star"] = cstar;
  write_json(cfg, "gaps_summary.json", j);
  return kExitOk;
}

int cmd_audit(const ExperimentConfig& cfg, std::ostream& err) {
  if (cfg.K < 0 || cfg.samples < 1) {
    err << "K must be >= 0 and samples >= 1\n";
    return kExitUsage;
  }
  const Context c = load(cfg, "audit");
  WorkingPrecision wp(cfg.precision_bits);
  const Roof roof = make_roof(c);
  const CancAudit a = canc_audit(roof, cfg.K, cfg.samples, cfg.seed);
  auto f = open_out(cfg, "canc_audit.csv");
  f << csv_header(c) << "k,samples,R_max,R_q99\n" << std::setprecision(17);
  for (const auto& r : a.rows) f << r.k << "," << r.samples << "," << r.r_max << "," << r.r_q99 << "\n";
  json j = stamp(c);
  j["M_prime"] = a.m_prime;
  j["f0"] = real_str(roof.f0());
  write_json(cfg, "canc_summary.json", j);
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& err) {
  if (cfg.mode != "strict" && cfg.mode != "adaptive") {
    err << "mode must be strict or adaptive\n";
    return kExitUsage;
  }
  if (cfg.pairs < 0 || cfg.jobs < 1 || cfg.precision_bits < 53) {
    err << "pairs must be >= 0, jobs >= 1, precision-bits >= 53\n";
    return kExitUsage;
  }
  const Context c = load(cfg, "sweep");
  WorkingPrecision wp(cfg.precision_bits);
  const Roof roof = make_roof(c);
  std::vector<Scalar> scales;
  for (const auto& s : cfg.scales) scales.push_back(Scalar::parse_exact(s));

  const ConstantInputs in = cfg.constants == "measure"
                                ? measure_constants(roof, cfg)
                                : constants_from_json(c.config["constants"]);
  const RatnerConstants k = derive_constants(in);
  const PipelineOptions opt{cfg.mode == "strict" ? Mode::strict : Mode::adaptive,
                            static_cast<mpfr_prec_t>(cfg.precision_bits)};
  const SweepReport rep =
      cfg.pairs == 0 ? SweepReport{opt.mode, {}, {}}
                     : swr_sweep(roof, k, scales, cfg.pairs, cfg.seed, opt, cfg.jobs);

  json summary = stamp(c);
  summary["mode"] = mode_name(rep.mode);
  summary["constants"] = constants_to_json(k);
  summary["pairs"] = static_cast<long>(rep.pairs.size());
  summary["failed"] = rep.failed();
  summary["scales"] = json::array();
  for (const auto& s : rep.scales) {
    json b = json::object(), fl = json::object();
    for (const auto& [name, n] : s.branches) b[name] = n;
    for (const auto& [name, n] : s.failures) fl[name] = n;
    summary["scales"].push_back({{"eta", s.eta.str()},
                                 {"pairs", s.pairs},
                                 {"success_fraction", s.pairs ? double(s.ok) / s.pairs : 0.0},
                                 {"forward", s.forward},
                                 {"backward", s.backward},
                                 {"odl_both", s.odl_both},
                                 {"branches", b},
                                 {"p_min", s.p_min},
                                 {"p_max", s.p_max},
                                 {"p_abs_min", s.p_abs_min},
                                 {"p_abs_max", s.p_abs_max},
                                 {"p_in_P", s.p_in_P},
                                 {"P", {k.p_low.get_d(), k.H.get_d()}},
                                 {"min_L_over_M", s.min_L_over_M},
                                 {"max_deviation", s.max_deviation},
                                 {"failures", fl}});
  }
  write_json(cfg, "sweep_summary.json", summary);

  auto f = open_out(cfg, "sweep_pairs.csv");
  f << csv_header(c) << "eta,x,y,direction,branch,k,M,L,p,deviation,status\n";
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    const auto& p = rep.pairs[i];
    f << p.eta.str() << "," << p.x.str() << "," << p.y.str() << ",";
    if (p.result.cert) {
      const auto& d = *p.result.cert;
      f << (d.direction == Direction::forward ? "forward" : "backward") << "," << d.branch << ","
        << d.k << "," << d.M << "," << d.L << "," << real_str(d.p) << "," << real_str(d.deviation);
    } else {
      f << ",,,,,,";
    }
    f << "," << p.result.status << "\n";
    if (!p.result.cert) {
      json w = stamp(c);
      w["instance"] = c.config["instance"];
      w["roof"] = c.config["roof"];
      w["constants"] = constants_to_json(k);
      w["mode"] = cfg.mode;
      w["precision_bits"] = cfg.precision_bits;
      w["pair"] = {{"index", i}, {"eta", scalar_to_json(p.eta)}, {"x", scalar_to_json(p.x)},
                   {"y", scalar_to_json(p.y)}};
      w["status"] = p.result.status;
      w["detail"] = p.result.detail;
      write_json(cfg, "witnesses/pair_" + std::to_string(i) + ".json", w);
    }
  }
  if (rep.failed() > 0) {
    err << rep.failed() << " of " << rep.pairs.size() << " pairs failed\n";
    return kExitSweep;
  }
  return kExitOk;
}

}  // namespace iet
