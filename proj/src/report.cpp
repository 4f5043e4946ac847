#include "declab/report.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace declab {

Report::Report(std::string command, std::string config_echo)
    : command_(std::move(command)), config_echo_(std::move(config_echo)) {}

std::string Report::fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Report::add_check(const std::string& anchor, double value, double ceiling,
                       bool pass) {
  checks_.push_back(Check{anchor, value, ceiling, pass});
}

void Report::add_info(const std::string& anchor, double value) {
  checks_.push_back(Check{anchor, value, 0.0, true});
}

void Report::add_convergence(const std::string& what, double coarse, double fine) {
  convergence_.push_back(Conv{what, coarse, fine});
}

void Report::add_row(const std::vector<std::pair<std::string, std::string>>& row) {
  rows_.push_back(row);
}

bool Report::all_pass() const {
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> Report::failing() const {
  std::vector<std::string> out;
  for (const auto& c : checks_)
    if (!c.pass) out.push_back(c.anchor);
  return out;
}

std::string Report::json() const {
  std::string s = "{\n";
  s += "  \"version\": \"" + std::string(kVersion) + "\",\n";
  s += "  \"command\": \"" + command_ + "\",\n";
  s += "  \"config\": " + (config_echo_.empty() ? "{}" : config_echo_) + ",\n";
  s += "  \"checks\": [\n";
  for (std::size_t i = 0; i < checks_.size(); ++i) {
    const auto& c = checks_[i];
    s += "    {\"anchor\": \"" + c.anchor + "\", \"value\": " + fmt(c.value) +
         ", \"ceiling\": " + fmt(c.ceiling) + ", \"pass\": " + (c.pass ? "true" : "false") +
         "}";
    s += (i + 1 < checks_.size()) ? ",\n" : "\n";
  }
  s += "  ],\n";
  s += "  \"self_convergence\": [\n";
  for (std::size_t i = 0; i < convergence_.size(); ++i) {
    const auto& c = convergence_[i];
    double rel = std::max(std::abs(c.coarse), std::abs(c.fine)) > 0
                     ? std::abs(c.coarse - c.fine) /
                           std::max(std::abs(c.coarse), std::abs(c.fine))
                     : 0.0;
    s += "    {\"what\": \"" + c.what + "\", \"coarse\": " + fmt(c.coarse) +
         ", \"fine\": " + fmt(c.fine) + ", \"rel_change\": " + fmt(rel) + "}";
    s += (i + 1 < convergence_.size()) ? ",\n" : "\n";
  }
  s += "  ],\n";
  s += "  \"rows\": [\n";
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    s += "    {";
    for (std::size_t c = 0; c < rows_[r].size(); ++c) {
      s += "\"" + rows_[r][c].first + "\": \"" + rows_[r][c].second + "\"";
      if (c + 1 < rows_[r].size()) s += ", ";
    }
    s += "}";
    s += (r + 1 < rows_.size()) ? ",\n" : "\n";
  }
  s += "  ],\n";
  s += std::string("  \"pass\": ") + (all_pass() ? "true" : "false") + "\n";
  s += "}\n";
  return s;
}

std::string Report::csv() const {
  std::string s;
  if (!rows_.empty()) {
    // header from the first row's keys
    for (std::size_t c = 0; c < rows_[0].size(); ++c) {
      s += rows_[0][c].first;
      s += (c + 1 < rows_[0].size()) ? "," : "\n";
    }
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        s += row[c].second;
        s += (c + 1 < row.size()) ? "," : "\n";
      }
    }
  }
  s += "anchor,value,ceiling,pass\n";
  for (const auto& c : checks_) {
    s += c.anchor + "," + fmt(c.value) + "," + fmt(c.ceiling) + "," +
         (c.pass ? "1" : "0") + "\n";
  }
  return s;
}

void Report::write(const std::string& path, const std::string& format) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << (format == "csv" ? csv() : json());
}

}  // namespace declab
