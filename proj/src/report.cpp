#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcb/error.hpp"
#include "mcb/harness.hpp"

namespace mcb {

namespace {

// Shortest round-trip representation; stable across runs and platforms.
std::string real(double v) { return nlohmann::json(v).dump(); }

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << contents;
  out.close();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string report_csv(const CoverageReport& report) {
  std::ostringstream csv;
  if (report.experiment == "check_collapse") {
    csv << "theta_label,n,selector,select_correct_rate,collapse_rate,agreement_mean,reps\n";
    for (const auto& c : report.cells) {
      const CollapseEstimate e = collapse_estimate(c);
      csv << c.theta_label << ',' << c.n << ',' << selector_name(c.selector) << ','
          << real(e.select_correct_rate) << ',' << real(e.collapse_rate) << ','
          << real(e.agreement_mean) << ',' << c.reps << '\n';
    }
    return csv.str();
  }
  csv << "theta_label,selector,cp,mean_width,collapse_rate,select_correct_rate,reps\n";
  for (const auto& c : report.cells) {
    csv << c.theta_label << ',' << selector_name(c.selector) << ',' << real(c.cp()) << ','
        << real(c.mean_width()) << ',' << real(c.collapse_rate()) << ','
        << real(c.select_correct_rate()) << ',' << c.reps << '\n';
  }
  return csv.str();
}

nlohmann::json report_json(const CoverageReport& report) {
  nlohmann::json j;
  j["experiment"] = report.experiment;
  j["config"] = to_json(report.config);
  j["parameters"] = report.parameters;
  j["seeds"] = report.seeds;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json cell;
    cell["theta_label"] = c.theta_label;
    cell["selector"] = to_json(c.selector);
    cell["bootstrap"] = bootstrap_name(c.bootstrap);
    cell["n"] = c.n;
    cell["B"] = c.B;
    cell["reps"] = c.reps;
    cell["theta"] = c.theta;
    cell["m_star"] = c.m_star.to_string();
    cell["cp"] = c.cp();
    cell["cp_se"] = c.standard_error(c.cp());
    cell["mean_width"] = c.mean_width();
    cell["collapse_rate"] = c.collapse_rate();
    cell["collapse_rate_se"] = c.standard_error(c.collapse_rate());
    cell["select_correct_rate"] = c.select_correct_rate();
    cell["select_correct_rate_se"] = c.standard_error(c.select_correct_rate());
    cell["full_collapse_rate"] = c.full_collapse_rate();
    cell["full_collapse_rate_se"] = c.standard_error(c.full_collapse_rate());
    cell["agreement_mean"] = c.agreement_mean();
    cell["counts"] = {{"covered", c.covered},
                      {"collapsed", c.collapsed},
                      {"selected_true", c.selected_true},
                      {"full_collapse", c.full_collapse},
                      {"width_sum", c.width_sum},
                      {"agreement_hits", c.agreement_hits}};
    j["cells"].push_back(std::move(cell));
  }
  j["cp_star"] = nlohmann::json::object();
  for (const auto& s : report.cp_star) j["cp_star"][s.selector] = s.value;
  j["wall_time"] = report.wall_time;
  return j;
}

void emit_report(const CoverageReport& report, const std::string& dir, const std::string& stem) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  write_file(root / (stem + ".csv"), report_csv(report));
  write_file(root / (stem + ".json"), report_json(report).dump(2) + "\n");
  write_file(root / "config.json", to_json(report.config).dump(2) + "\n");
}

}  // namespace mcb
