#pragma once

#include <string>
#include <vector>

namespace declab {

inline constexpr const char* kVersion = "0.1.0";

// One verified inequality or measured quantity inside a run. `anchor` is the
// stable machine-readable name of the checked property.
struct Check {
  std::string anchor;
  double value = 0.0;
  double ceiling = 0.0;  // 0 when informational
  bool pass = true;
};

// Deterministic JSON/CSV report: fixed key order, fixed float formatting, so
// identical configs and seeds produce identical bytes.
class Report {
 public:
  Report(std::string command, std::string config_echo);

  void add_check(const std::string& anchor, double value, double ceiling, bool pass);
  void add_info(const std::string& anchor, double value);
  void add_convergence(const std::string& what, double coarse, double fine);
  void add_row(const std::vector<std::pair<std::string, std::string>>& row);  // CSV rows

  bool all_pass() const;
  std::vector<std::string> failing() const;

  std::string json() const;
  std::string csv() const;
  void write(const std::string& path, const std::string& format) const;

  static std::string fmt(double v);

 private:
  std::string command_;
  std::string config_echo_;
  std::vector<Check> checks_;
  struct Conv {
    std::string what;
    double coarse, fine;
  };
  std::vector<Conv> convergence_;
  std::vector<std::vector<std::pair<std::string, std::string>>> rows_;
};

}  // namespace declab
