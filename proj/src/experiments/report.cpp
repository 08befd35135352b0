#include "rcb/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rcb/error.hpp"
#include "rcb/two_copy.hpp"

namespace rcb {

const char* mode_name(ValueMode m) {
  switch (m) {
    case ValueMode::ExactRational: return "exact-rational";
    case ValueMode::ExactFloat: return "exact-float";
    case ValueMode::ClosedForm: return "closed-form";
    case ValueMode::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

Verdict& RunResult::check_le(const std::string& name, double lhs, double rhs, double tol) {
  verdicts.push_back({name, lhs <= rhs + tol, lhs, rhs, true});
  return verdicts.back();
}

Verdict& RunResult::claim(const std::string& name, bool holds, double lhs, double rhs) {
  verdicts.push_back({name, holds, lhs, rhs, false});
  return verdicts.back();
}

const Quantity* RunResult::find(const std::string& name) const {
  for (const auto& q : scalars)
    if (q.name == name) return &q;
  return nullptr;
}

double RunResult::value(const std::string& name) const {
  const Quantity* q = find(name);
  if (!q) fail(ErrorKind::InvalidArgument, "no scalar named " + name + " in " + experiment);
  return q->value;
}

const Verdict* RunResult::verdict(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

const Table* RunResult::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

bool RunResult::bounds_hold() const {
  for (const auto& v : verdicts)
    if (v.bound && !v.holds) return false;
  return true;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

nlohmann::json number(double x) {
  if (!std::isfinite(x)) return format_number(x);
  return x;
}

}  // namespace

nlohmann::json to_json(const RunResult& r) {
  using nlohmann::json;
  json out;
  out["experiment"] = r.experiment;
  out["config"] = r.config;
  json scalars = json::array();
  for (const auto& q : r.scalars) {
    json s{{"name", q.name}, {"value", number(q.value)}, {"mode", mode_name(q.mode)}};
    if (q.standard_error) s["stderr"] = number(*q.standard_error);
    scalars.push_back(std::move(s));
  }
  out["scalars"] = std::move(scalars);
  json verdicts = json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back({{"name", v.name},
                        {"holds", v.holds},
                        {"kind", v.bound ? "bound" : "claim"},
                        {"lhs", number(v.lhs)},
                        {"rhs", number(v.rhs)},
                        {"slack", number(v.slack())}});
  out["verdicts"] = std::move(verdicts);
  json tables = json::object();
  for (const auto& t : r.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json jr = json::array();
      for (double x : row) jr.push_back(number(x));
      rows.push_back(std::move(jr));
    }
    tables[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
  }
  out["tables"] = std::move(tables);
  out["warnings"] = r.warnings;
  out["provenance"] = {{"library", "rcbound"},
                       {"version", RCB_VERSION},
                       {"max_states", EnumerationLimits{}.max_states},
                       {"max_overlap_pairs", kMaxOverlapPairs},
                       {"seed", r.config.contains("seed") ? r.config["seed"] : json(nullptr)},
                       {"bounds_hold", r.bounds_hold()}};
  return out;
}

std::string to_json_text(const RunResult& r) { return to_json(r).dump(2) + "\n"; }

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string scalars_csv(const RunResult& r) {
  std::string out = "name,value,stderr,mode\n";
  for (const auto& q : r.scalars)
    out += csv_field(q.name) + "," + format_number(q.value) + "," +
           (q.standard_error ? format_number(*q.standard_error) : "") + "," + mode_name(q.mode) + "\n";
  return out;
}

std::string verdicts_csv(const RunResult& r) {
  std::string out = "name,holds,kind,lhs,rhs,slack\n";
  for (const auto& v : r.verdicts)
    out += csv_field(v.name) + "," + (v.holds ? "1" : "0") + "," + (v.bound ? "bound" : "claim") + "," +
           format_number(v.lhs) + "," + format_number(v.rhs) + "," + format_number(v.slack()) + "\n";
  return out;
}

std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + csv_field(t.columns[c]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
    out += "\n";
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open " + p.string() + " for writing");
  f << text;
  if (!f) fail(ErrorKind::Io, "write to " + p.string() + " failed");
}

}  // namespace

std::vector<std::filesystem::path> emit(const RunResult& r, const std::filesystem::path& dir, OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    written.push_back(dir / name);
    write_file(written.back(), text);
  };
  if (format == OutputFormat::Json) {
    put(r.experiment + ".json", to_json_text(r));
  } else {
    put(r.experiment + "_scalars.csv", scalars_csv(r));
    put(r.experiment + "_verdicts.csv", verdicts_csv(r));
    for (const auto& t : r.tables) put(r.experiment + "_" + t.name + ".csv", table_csv(t));
  }
  return written;
}

}  // namespace rcb
