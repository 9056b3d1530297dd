#include "ggc/cli.hpp"

#include <glob.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ggc/bivar.hpp"
#include "ggc/cas.hpp"
#include "ggc/criteria.hpp"

namespace ggc::cli {

namespace {

using nlohmann::json;

std::int64_t parse_int(const std::string& s, const std::string& what) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw Error(ErrorCode::InvalidArgument, what + ": expected a decimal integer, got '" + s + "'");
  return v;
}

std::vector<std::int64_t> parse_list(const std::string& s, char sep, const std::string& what) {
  std::vector<std::int64_t> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(parse_int(item, what));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, what + ": empty list");
  return out;
}

// rows ';', entries ',', coefficients (ascending) ':'
SeriesMatrix parse_matrix(const std::string& s, std::int64_t p, int prec) {
  SeriesMatrix m;
  std::string row, ent;
  std::istringstream rows(s);
  while (std::getline(rows, row, ';')) {
    std::vector<PowerSeries> r;
    std::istringstream ents(row);
    while (std::getline(ents, ent, ',')) r.push_back(PowerSeries::from_integers(p, prec, parse_list(ent, ':', "--matrix")));
    m.push_back(std::move(r));
  }
  if (m.empty()) throw Error(ErrorCode::InvalidArgument, "--matrix: empty");
  for (const auto& r : m)
    if (r.size() != m.size()) throw Error(ErrorCode::InvalidArgument, "--matrix: not square");
  return m;
}

struct Options {
  std::string format = "text";
  bool verbose = false;
  std::int64_t p = 0;
  std::int64_t d = 0;
  int prec = 10;
  int cutoff = 0;
  std::string coeffs;
  std::string engine_path;
  int timeout = 0;
  // check / fetch
  std::string record_path;
  bool fetch = false;
  std::string tasks = "class_group,aux";
  int depth = 2;
  std::string generators;
  int layer = 1;
  bool diff = false;
  // algebra
  std::string root;
  int m = 0;
  std::string matrix;
  std::string orientation = "t";
  // report
  std::vector<std::string> patterns;
};

PowerSeries series_arg(const Options& o) {
  if (o.coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "--coeffs is required");
  const auto c = parse_list(o.coeffs, ',', "--coeffs");
  if (o.cutoff > 0) return PowerSeries::truncated(o.p, o.prec, c, o.cutoff);
  return PowerSeries::from_integers(o.p, o.prec, c);
}

void require_p(const Options& o) {
  if (!is_prime(o.p)) throw Error(ErrorCode::InvalidArgument, "--p must be a prime");
}

cas::EngineConfig engine_config(const Options& o) {
  cas::EngineConfig c = cas::EngineConfig::from_env();
  if (!o.engine_path.empty()) c.path = o.engine_path;
  if (o.timeout > 0) c.timeout = std::chrono::seconds(o.timeout);
  return c;
}

std::vector<cas::Task> fetch_tasks(const Options& o) {
  std::vector<cas::Task> tasks;
  std::string name;
  std::istringstream in(o.tasks);
  while (std::getline(in, name, ',')) {
    const auto kind = cas::parse_task_kind(name == "aux" ? "aux_class_number" : name);
    if (!kind) throw Error(ErrorCode::TaskUnsupported, "unknown task '" + name + "'");
    cas::Task t;
    t.kind = *kind;
    t.depth = o.depth;
    t.layer = o.layer;
    std::string g;
    std::istringstream gs(o.generators);
    while (std::getline(gs, g, ',')) t.generators.push_back(g);
    tasks.push_back(t);
  }
  return tasks;
}

std::optional<FieldRecord> try_bundled(std::int64_t p, std::int64_t d) {
  try {
    return load_bundled(p, d);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataMissing) throw;
    return std::nullopt;
  }
}

void print_verdict(const FieldRecord& rec, const Verdict& v, const Options& o, std::ostream& out) {
  if (o.format == "json") {
    out << verdict_to_json(v).dump(2) << "\n";
    return;
  }
  out << "p=" << rec.p << " d=" << rec.d << ": " << to_string(v.level) << "\n";
  for (const auto& e : v.trace) {
    out << "  " << e.criterion << ": " << e.outcome << " [" << e.anchor << "]";
    if (e.inputs.contains("failed")) out << " " << e.inputs["failed"].get<std::string>();
    out << "\n";
    if (o.verbose) out << "    " << e.inputs.dump() << "\n";
  }
  if (!v.reason.empty()) out << "reason: " << v.reason << "\n";
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  FieldRecord rec;
  if (!o.record_path.empty()) {
    if (o.fetch) throw Error(ErrorCode::InvalidArgument, "give a record path or --fetch, not both");
    rec = load_record_file(o.record_path);
  } else {
    if (o.p == 0 || o.d == 0) throw Error(ErrorCode::InvalidArgument, "check needs a record path or --p and --d");
    const std::optional<FieldRecord> base = try_bundled(o.p, o.d);
    if (!o.fetch) {
      if (!base) throw Error(ErrorCode::DataMissing, "no bundled record for d=" + std::to_string(o.d));
      rec = *base;
    } else {
      try {
        const FieldRecord got = cas::cas_fetch(o.p, o.d, fetch_tasks(o), engine_config(o), base ? &*base : nullptr);
        rec = base ? overlay_record(*base, got) : got;
        validate_record(rec);
      } catch (const Error& e) {
        if ((e.code() != ErrorCode::EngineMissing && e.code() != ErrorCode::Timeout) || !base) throw;
        err << "warning: " << e.what() << "; using the bundled record\n";
        rec = *base;
      }
    }
  }
  const Verdict v = verdict_pipeline(rec);
  print_verdict(rec, v, o, out);
  return v.level == VerdictLevel::Inconclusive ? 2 : 0;
}

int cmd_fetch(const Options& o, std::ostream& out) {
  if (o.p == 0 || o.d == 0) throw Error(ErrorCode::InvalidArgument, "fetch needs --p and --d");
  const std::optional<FieldRecord> base = try_bundled(o.p, o.d);
  const FieldRecord got = cas::cas_fetch(o.p, o.d, fetch_tasks(o), engine_config(o), base ? &*base : nullptr);
  if (!o.diff) {
    out << serialize_record(got);
    return 0;
  }
  if (!base) throw Error(ErrorCode::DataMissing, "no bundled record to compare with");
  const RecordDiff diff = record_diff(*base, overlay_record(*base, got));
  if (diff.empty()) out << "no differences\n";
  for (const auto& l : diff.lines) out << l << "\n";
  return diff.empty() ? 0 : 2;
}

// Algebra commands print one text value or a JSON object.
void emit(const Options& o, std::ostream& out, const std::string& text, const json& j) {
  if (o.format == "json")
    out << j.dump(2) << "\n";
  else
    out << text << "\n";
}

int cmd_prepare(const Options& o, std::ostream& out) {
  require_p(o);
  const Preparation prep = weierstrass_prepare(series_arg(o));
  const std::string P = prep.distinguished.poly().str(), U = prep.unit.str();
  emit(o, out,
       "mu=" + std::to_string(prep.mu) + " lambda=" + std::to_string(prep.distinguished.lambda()) + "\nP = " + P +
           "\nU = " + U + "\nslack=" + std::to_string(prep.slack),
       {{"mu", prep.mu}, {"lambda", prep.distinguished.lambda()}, {"P", P}, {"U", U}, {"slack", prep.slack}});
  return 0;
}

int cmd_hensel(const Options& o, std::ostream& out) {
  require_p(o);
  if (o.root.empty()) throw Error(ErrorCode::InvalidArgument, "--root is required");
  const std::int64_t r0 = parse_int(o.root, "--root");
  const HenselRoot r = hensel_lift_root(series_arg(o), PadicInt(o.p, o.prec, r0));
  emit(o, out, "root=" + r.root.str() + " certified=" + std::to_string(r.certified_prec),
       {{"root", r.root.str()}, {"certified_prec", r.certified_prec}});
  return 0;
}

int cmd_newton(const Options& o, std::ostream& out) {
  require_p(o);
  const PowerSeries h = series_arg(o);
  const NewtonPolygon np = newton_polygon(h);
  const Irreducibility irr = irreducible_by_newton(h);
  std::string text;
  json segs = json::array();
  for (const auto& s : np.segments) segs.push_back({{"slope", s.slope.str()}, {"length", s.length}});
  if (np.segments.size() == 1) {
    text = "single segment slope " + np.segments[0].slope.str();
  } else {
    text = std::to_string(np.segments.size()) + " segments:";
    for (std::size_t i = 0; i < np.segments.size(); ++i)
      text += std::string(i ? "," : "") + " slope " + np.segments[i].slope.str() + " length " +
              std::to_string(np.segments[i].length);
  }
  text += std::string(": ") + to_string(irr);
  emit(o, out, text, {{"segments", segs}, {"irreducibility", to_string(irr)}});
  return 0;
}

int cmd_invariants(const Options& o, std::ostream& out) {
  require_p(o);
  const PowerSeries h = series_arg(o);
  const Valuation mu = mu_invariant(h);
  const LambdaInvariant lambda = lambda_invariant(h);
  const std::string lam = lambda.determined() ? std::to_string(*lambda.value) : "undetermined";
  std::string text = "mu=" + mu.str() + " lambda=" + lam;
  json j = {{"mu", mu.str()}, {"lambda", lam}};
  try {
    const Valuation g0 = extract_T_factor(h).cofactor.coeff(0).valuation();
    text += " g0_val=" + g0.str();
    j["g0_val"] = g0.str();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AmbiguousMultiplicity && e.code() != ErrorCode::InvalidArgument) throw;
  }
  emit(o, out, text, j);
  return 0;
}

int cmd_nu(const Options& o, std::ostream& out) {
  require_p(o);
  const PowerSeries nu = nu_polynomial(o.m, o.p, o.prec, o.cutoff > 0 ? o.cutoff : kDefaultCutoff);
  emit(o, out, nu.str("S", false), {{"nu", nu.str("S", false)}, {"prec", o.prec}});
  return 0;
}

int cmd_det(const Options& o, std::ostream& out) {
  require_p(o);
  if (o.matrix.empty()) throw Error(ErrorCode::InvalidArgument, "--matrix is required");
  const Orientation orient = o.orientation == "s" ? Orientation::SDiagonal : Orientation::TDiagonal;
  const BivarSeries f = char_det(parse_matrix(o.matrix, o.p, o.prec), orient);
  emit(o, out, f.str(), {{"det", f.str()}});
  return 0;
}

struct ReportRow {
  std::optional<std::pair<std::int64_t, std::int64_t>> key;
  std::string path;
  std::vector<std::string> cells;
  bool ok = false;
};

std::string cell(const json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

ReportRow report_row(const std::string& path) {
  ReportRow row;
  row.path = path;
  try {
    const FieldRecord rec = load_record_file(path);
    row.key = std::pair{rec.p, rec.d};
    const Verdict v = verdict_pipeline(rec);
    std::string lambda = "?", mu = "?", g0 = "?", rational = "?";
    for (const auto& e : v.trace) {
      if (e.criterion == "char-analysis" && e.outcome == "ok") {
        lambda = cell(e.inputs["lambda_cyc"]);
        mu = cell(e.inputs["mu"]) == "0" ? "0" : ">0";
        g0 = cell(e.inputs["g0_val"]);
      }
      if (e.criterion == "p-split-p-rational")
        rational = e.outcome == "true" ? "yes" : e.outcome == "false" ? "no" : "?";
    }
    const std::string s = rec.s_exp ? std::to_string(*rec.s_exp) : "?";
    const std::string verdict = v.level == VerdictLevel::GGCHolds       ? "GGC"
                                : v.level == VerdictLevel::WeakGGCHolds ? "weak GGC"
                                                                        : "inconclusive";
    row.cells = {std::to_string(rec.p), std::to_string(rec.d), lambda, mu, g0, s, rational, verdict};
    row.ok = true;
  } catch (const Error& e) {
    // salvage p and d for the ordering when the JSON itself parses
    try {
      std::ifstream in(path);
      const json j = json::parse(in);
      row.key = std::pair{j.at("p").get<std::int64_t>(), j.at("d").get<std::int64_t>()};
    } catch (const std::exception&) {
    }
    const std::string p = row.key ? std::to_string(row.key->first) : "?";
    const std::string d = row.key ? std::to_string(row.key->second) : "?";
    row.cells = {p, d, "-", "-", "-", "-", "-", std::string("inconclusive (error: ") + e.what() + ")"};
  }
  return row;
}

std::vector<std::string> expand(const std::vector<std::string>& patterns) {
  std::set<std::string> paths;
  for (const auto& pat : patterns) {
    if (pat.find_first_of("*?[") == std::string::npos) {
      paths.insert(pat);
      continue;
    }
    glob_t g{};
    if (::glob(pat.c_str(), 0, nullptr, &g) == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) paths.insert(g.gl_pathv[i]);
    ::globfree(&g);
  }
  return {paths.begin(), paths.end()};
}

int cmd_report(const Options& o, std::ostream& out) {
  const std::vector<std::string> paths = expand(o.patterns);
  std::vector<std::future<ReportRow>> jobs;
  for (const auto& path : paths) jobs.push_back(std::async(std::launch::async, report_row, path));
  std::vector<ReportRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.key.has_value() != b.key.has_value()) return a.key.has_value();
    if (a.key != b.key) return a.key < b.key;
    return a.path < b.path;
  });
  const std::vector<std::string> header = {"p", "d", "lambda_cyc", "mu", "g0_val", "s", "p-rational", "verdict"};
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json j = {{"path", r.path}, {"ok", r.ok}};
      for (std::size_t i = 0; i < header.size(); ++i) j[header[i]] = r.cells[i];
      arr.push_back(j);
    }
    out << arr.dump(2) << "\n";
  } else {
    auto line = [&](const std::vector<std::string>& cells) {
      out << "|";
      for (const auto& c : cells) out << " " << c << " |";
      out << "\n";
    };
    line(header);
    line(std::vector<std::string>(header.size(), "---"));
    for (const auto& r : rows) line(r.cells);
  }
  const bool any_ok = std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.ok; });
  return any_ok ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Weak GGC checks for imaginary quadratic fields with p split", "ggc"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("-v,--verbose", o.verbose, "print criterion inputs");

  auto field_opts = [&](CLI::App* c) {
    c->add_option("--p", o.p, "prime");
    c->add_option("--d", o.d, "square-free d for k = Q(sqrt(-d))");
    c->add_option("--engine-path", o.engine_path, "external engine binary");
    c->add_option("--timeout", o.timeout, "engine timeout in seconds")->check(CLI::PositiveNumber);
    c->add_option("--tasks", o.tasks, "class_group,aux,layer_class_numbers,capitulation");
    c->add_option("--depth", o.depth, "last layer for layer_class_numbers");
    c->add_option("--generators", o.generators, "capitulation generators, e.g. p5,p19");
    c->add_option("--layer", o.layer, "capitulation layer");
  };

  CLI::App* check = app.add_subcommand("check", "run the verdict pipeline on a record");
  check->add_option("record", o.record_path, "record JSON");
  check->add_flag("--fetch", o.fetch, "refresh fields from the external engine");
  field_opts(check);

  CLI::App* fetch = app.add_subcommand("fetch", "compute fields with the external engine");
  fetch->add_flag("--diff", o.diff, "compare with the bundled record instead of printing");
  field_opts(fetch);

  CLI::App* report = app.add_subcommand("report", "markdown table over records");
  report->add_option("records", o.patterns, "paths or glob patterns");

  CLI::App* algebra = app.add_subcommand("algebra", "standalone series algebra");
  algebra->require_subcommand(1);
  algebra->fallthrough();
  auto algebra_cmd = [&](const std::string& name, const std::string& help) {
    CLI::App* c = algebra->add_subcommand(name, help);
    c->add_option("--p", o.p, "prime")->required();
    c->add_option("--prec", o.prec, "p-adic precision exponent")->check(CLI::PositiveNumber);
    c->add_option("--cutoff", o.cutoff, "known modulo X^cutoff (default: exact polynomial)");
    return c;
  };
  CLI::App* prepare = algebra_cmd("prepare", "Weierstrass preparation");
  prepare->add_option("--coeffs", o.coeffs, "ascending integer coefficients");
  CLI::App* hensel = algebra_cmd("hensel", "lift a simple root");
  hensel->add_option("--coeffs", o.coeffs, "ascending integer coefficients");
  hensel->add_option("--root", o.root, "approximate root")->required();
  CLI::App* newton = algebra_cmd("newton", "Newton polygon and irreducibility");
  newton->add_option("--coeffs", o.coeffs, "ascending integer coefficients");
  CLI::App* invariants = algebra_cmd("invariants", "mu, lambda and vp(g(0)) for h = T^a g");
  invariants->add_option("--coeffs", o.coeffs, "ascending integer coefficients");
  CLI::App* nu = algebra_cmd("nu", "((1+S)^(p^m) - 1)/S");
  nu->add_option("--m", o.m, "m")->required()->check(CLI::NonNegativeNumber);
  CLI::App* det = algebra_cmd("det", "det(T*I - F(S))");
  det->add_option("--matrix", o.matrix, "rows ';', entries ',', coefficients ':'");
  det->add_option("--orientation", o.orientation, "t: X = T, s: X = S")->check(CLI::IsMember({"t", "s"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*check) return cmd_check(o, out, err);
    if (*fetch) return cmd_fetch(o, out);
    if (*report) return cmd_report(o, out);
    if (*prepare) return cmd_prepare(o, out);
    if (*hensel) return cmd_hensel(o, out);
    if (*newton) return cmd_newton(o, out);
    if (*invariants) return cmd_invariants(o, out);
    if (*nu) return cmd_nu(o, out);
    if (*det) return cmd_det(o, out);
  } catch (const Error& e) {
    err << "ggc: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "ggc: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ggc::cli
