#include "tauforge/loop_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "tauforge/errors.hpp"

namespace tauforge {

using nlohmann::json;

std::string loop_to_json(const MatrixLoop& a) {
  json j;
  j["n"] = a.n();
  j["N"] = a.N();
  j["M"] = a.M();
  json coeffs = json::array();
  for (int k = -a.N(); k <= a.N(); ++k) {
    const CMatrix c = a.coeff(k);
    for (int col = 0; col < a.n(); ++col)
      for (int row = 0; row < a.n(); ++row) {
        if (c(row, col) == cplx(0.0)) continue;
        coeffs.push_back({k, row, col, c(row, col).real(), c(row, col).imag()});
      }
  }
  j["coeffs"] = coeffs;
  return j.dump();
}

MatrixLoop loop_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("loop record is not valid JSON: ") + e.what());
  }
  try {
    const int n = j.at("n").get<int>();
    const int N = j.at("N").get<int>();
    const int M = j.contains("M") ? j.at("M").get<int>() : kDefaultSamples;
    std::vector<CMatrix> modes(2 * N + 1, CMatrix::Zero(n, n));
    for (const auto& e : j.at("coeffs")) {
      const int k = e.at(0).get<int>(), row = e.at(1).get<int>(), col = e.at(2).get<int>();
      if (std::abs(k) > N || row < 0 || row >= n || col < 0 || col >= n)
        throw ConfigError("loop record entry out of range");
      modes[k + N](row, col) = cplx(e.at(3).get<double>(), e.at(4).get<double>());
    }
    return MatrixLoop::from_coeffs(N, M, modes);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed loop record: ") + e.what());
  }
}

void write_loop_file(const std::string& path, const MatrixLoop& a) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << loop_to_json(a) << '\n';
}

MatrixLoop read_loop_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return loop_from_json(ss.str());
}

}  // namespace tauforge
