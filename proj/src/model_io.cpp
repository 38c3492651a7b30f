#include "cokrig/model_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

constexpr std::array<const char*, 7> kMaternKeys{"sigma11", "sigma22", "rho12", "nu",
                                                 "alpha11", "alpha22", "alpha12"};
constexpr std::array<const char*, 8> kGwKeys{"sigma11", "sigma22", "rho12", "mu",
                                             "kappa",   "beta11",  "beta22", "beta12"};

template <std::size_t N>
std::array<double, N> read_keys(const Json& j, const std::array<const char*, N>& keys,
                                const char* kind) {
  for (const auto& item : j.items()) {
    if (std::find_if(keys.begin(), keys.end(),
                     [&](const char* k) { return item.key() == k; }) == keys.end())
      throw ParseError(std::string(kind) + " model: unexpected key \"" + item.key() + "\"");
  }
  std::array<double, N> out{};
  for (std::size_t k = 0; k < N; ++k) {
    const auto it = j.find(keys[k]);
    if (it == j.end())
      throw ParseError(std::string(kind) + " model: missing key \"" + keys[k] + "\"");
    if (!it->is_number())
      throw ParseError(std::string(kind) + " model: key \"" + keys[k] + "\" is not a number");
    out[k] = it->template get<double>();
  }
  return out;
}

}  // namespace

Json to_json(const BivMatern& th) {
  return Json{{"sigma11", th.sigma11}, {"sigma22", th.sigma22}, {"rho12", th.rho12},
              {"nu", th.nu},           {"alpha11", th.alpha11}, {"alpha22", th.alpha22},
              {"alpha12", th.alpha12}};
}

Json to_json(const BivGW& la) {
  return Json{{"sigma11", la.sigma11}, {"sigma22", la.sigma22}, {"rho12", la.rho12},
              {"mu", la.mu},           {"kappa", la.kappa},     {"beta11", la.beta11},
              {"beta22", la.beta22},   {"beta12", la.beta12}};
}

Json to_json(const BivModel& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

BivModel model_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("model: expected a JSON object");
  const bool has_nu = j.contains("nu");
  const bool has_mu = j.contains("mu");
  if (has_nu == has_mu)
    throw ParseError("model: exactly one of \"nu\" (Matern) and \"mu\" (Wendland) is required");
  if (has_nu) {
    const auto v = read_keys(j, kMaternKeys, "Matern");
    return BivMatern{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  }
  const auto v = read_keys(j, kGwKeys, "Wendland");
  return BivGW{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

BivModel read_model_file(const std::filesystem::path& path) {
  try {
    return model_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    const std::string what = e.what();
    if (what.rfind(path.string(), 0) == 0 || what.rfind("cannot open", 0) == 0) throw;
    throw ParseError(path.string() + ": " + what);
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw ParseError("error writing " + path.string());
}

Json to_json(const CompatReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations) violations.push_back(v);
  return Json{{"compatible", report.compatible},
              {"residuals",
               Json{{"11", report.residuals[0]},
                    {"22", report.residuals[1]},
                    {"12", report.residuals[2]}}},
              {"violations", violations},
              {"tolerance", report.tolerance}};
}

Json to_json(const PredictionReport& report) {
  Json reasons = Json::array();
  for (const auto& r : report.instability_reasons) reasons.push_back(r);
  return Json{{"weights", report.weights},
              {"mspe_mis_under_true", report.mspe_mis_under_true},
              {"mspe_true_under_true", report.mspe_true_under_true},
              {"mspe_mis_under_mis", report.mspe_mis_under_mis},
              {"ratio_efficiency", report.ratio_efficiency},
              {"ratio_variance", report.ratio_variance},
              {"sk_mspe", report.sk_mspe},
              {"sk_over_ck", report.sk_over_ck},
              {"unstable", report.unstable},
              {"degenerate", report.degenerate},
              {"instability_reasons", reasons}};
}

Json to_json(const TailDiagnostic& diag) {
  return Json{{"label", "diagnostic"},
              {"verdict", to_string(diag.verdict)},
              {"slope", diag.slope},
              {"z_min", diag.z_min},
              {"z_max", diag.z_max},
              {"points", diag.points}};
}

}  // namespace cokrig
