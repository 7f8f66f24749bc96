#include "report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ldplab::report {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void append_rows(std::ostringstream& os, const std::vector<ldp::LdpRow>& rows) {
  for (const auto& r : rows) {
    os << r.n << "," << num(r.x) << "," << (r.in_region ? 1 : 0) << ","
       << r.hits << "," << r.reps << "," << num(r.ratio_hat) << ","
       << num(r.ci_halfwidth) << "," << num(r.b_plus_ref) << ","
       << num(r.b_plus_ref_ci) << "\n";
  }
}

constexpr const char* kLdpHeader =
    "n,x,in_region,hits,reps,ratio_hat,ci_halfwidth,b_plus_ref,b_plus_ref_ci\n";

}  // namespace

std::string csv_ldp_rows(const std::vector<ldp::LdpRow>& rows,
                         const std::string& provenance) {
  std::ostringstream os;
  os << "# " << provenance << "\n" << kLdpHeader;
  append_rows(os, rows);
  return os.str();
}

std::string csv_ldp(const ldp::LdpTable& table, const std::string& provenance) {
  std::ostringstream os;
  os << "# " << provenance << "\n";
  if (!table.region_rule.empty()) os << "# rule=" << table.region_rule << "\n";
  for (const auto& note : table.notes) os << "# note: " << note << "\n";
  os << "side," << kLdpHeader;
  for (const auto& r : table.rows) {
    os << "right,";
    std::vector<ldp::LdpRow> one{r};
    std::ostringstream tmp;
    append_rows(tmp, one);
    os << tmp.str();
  }
  for (const auto& r : table.left_rows) {
    os << "left,";
    std::vector<ldp::LdpRow> one{r};
    std::ostringstream tmp;
    append_rows(tmp, one);
    os << tmp.str();
  }
  return os.str();
}

std::string csv_condition(const ldp::ConditionReport& report,
                          const std::string& provenance) {
  std::ostringstream os;
  os << "# " << provenance << "\n";
  os << "condition,k,param,statistic,threshold,se,pass\n";
  for (const auto& e : report.entries) {
    os << report.condition << "," << e.k << "," << num(e.param) << ","
       << num(e.statistic) << "," << num(e.threshold) << "," << num(e.se) << ","
       << (e.pass ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string csv_body(const std::string& csv) {
  std::istringstream is(csv);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line))
    if (line.empty() || line[0] != '#') os << line << "\n";
  return os.str();
}

void write_bundle(const std::string& dir, const ReportBundle& bundle) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, content] : bundle.csv) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    f << content;
  }
  {
    std::ofstream f(fs::path(dir) / "summary.json", std::ios::binary);
    f << bundle.summary.dump(2) << "\n";
  }
  {
    std::ofstream f(fs::path(dir) / "manifest.json", std::ios::binary);
    f << bundle.manifest.dump(2) << "\n";
  }
}

}  // namespace ldplab::report
