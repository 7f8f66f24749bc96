#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "ldp.hpp"

namespace ldplab::report {

struct ReportBundle {
  nlohmann::json summary;
  std::map<std::string, std::string> csv;  // filename -> file content
  nlohmann::json manifest;
};

// CSV files carry one comment header line (provenance, may vary across
// worker counts), then a fixed column header and LF-terminated body rows.
std::string csv_ldp(const ldp::LdpTable& table, const std::string& provenance);
std::string csv_ldp_rows(const std::vector<ldp::LdpRow>& rows,
                         const std::string& provenance);
std::string csv_condition(const ldp::ConditionReport& report,
                          const std::string& provenance);

// Strips comment lines; used by the byte-identity contract across workers.
std::string csv_body(const std::string& csv);

void write_bundle(const std::string& dir, const ReportBundle& bundle);

}  // namespace ldplab::report
