// SPDX-License-Identifier: Apache-2.0
#include "posmap/cli/documents.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace posmap::cli {
namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

int read_positive_int(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) parse_fail(path, std::string("missing \"") + key + "\"");
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    parse_fail(path + "/" + key, "expected a positive integer");
  return static_cast<int>(v.get<long long>());
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& a) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) data.push_back(Json::array({a(i, j).real(), a(i, j).imag()}));
  return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(data)}};
}

Json vector_to_json(const ComplexVector& v) { return matrix_to_json(ComplexMatrix(v)); }

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected a matrix object");
  const int rows = read_positive_int(j, "rows", path);
  const int cols = read_positive_int(j, "cols", path);
  if (!j.contains("data") || !j.at("data").is_array()) parse_fail(path, "missing \"data\" array");
  const Json& data = j.at("data");
  if (data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw Error(ErrorCode::DimensionMismatch, path + "/data: expected " + std::to_string(rows * cols) +
                                                  " entries for " + std::to_string(rows) + "x" +
                                                  std::to_string(cols) + ", found " + std::to_string(data.size()));
  ComplexMatrix a(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const std::size_t k = static_cast<std::size_t>(r * cols + c);
      const Json& entry = data[k];
      const std::string where = path + "/data/" + std::to_string(k);
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number())
        parse_fail(where, "expected a [re, im] pair");
      a(r, c) = cplx(entry[0].get<double>(), entry[1].get<double>());
    }
  require_finite(a, path.c_str());
  return a;
}

ComplexVector vector_from_json(const Json& j, const std::string& path) {
  const ComplexMatrix a = matrix_from_json(j, path);
  if (a.cols() != 1) throw Error(ErrorCode::DimensionMismatch, path + ": expected a column vector");
  return a.col(0);
}

Json parse_document(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, source + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

Json read_document(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, file + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_document(buffer.str(), file);
}

MapDocument map_from_document(const Json& doc) {
  if (!doc.is_object()) parse_fail("/", "expected a map document object");
  MapDocument out{read_positive_int(doc, "m", ""), read_positive_int(doc, "n", ""), "", "",
                  LinearMapRep::zero(1, 1)};
  if (!doc.contains("encoding") || !doc.at("encoding").is_string()) parse_fail("/encoding", "missing encoding");
  out.encoding = doc.at("encoding").get<std::string>();
  if (doc.contains("name") && doc.at("name").is_string()) out.name = doc.at("name").get<std::string>();
  const int m = out.m;
  const int n = out.n;
  const auto expect = [](const ComplexMatrix& a, int rows, int cols, const std::string& path) {
    if (a.rows() != rows || a.cols() != cols)
      throw Error(ErrorCode::DimensionMismatch, path + ": expected " + std::to_string(rows) + "x" +
                                                    std::to_string(cols) + ", found " + std::to_string(a.rows()) +
                                                    "x" + std::to_string(a.cols()));
  };

  if (out.encoding == "choi") {
    if (!doc.contains("choi")) parse_fail("/choi", "missing Choi matrix");
    const ComplexMatrix h = matrix_from_json(doc.at("choi"), "/choi");
    expect(h, m * n, m * n, "/choi");
    out.map = map_of_choi(h, m, n);
  } else if (out.encoding == "unit-action") {
    if (!doc.contains("units") || !doc.at("units").is_array()) parse_fail("/units", "missing unit images");
    const Json& units = doc.at("units");
    if (units.size() != static_cast<std::size_t>(m * m))
      throw Error(ErrorCode::DimensionMismatch,
                  "/units: expected " + std::to_string(m * m) + " images, found " + std::to_string(units.size()));
    std::vector<ComplexMatrix> images;
    for (std::size_t k = 0; k < units.size(); ++k) {
      const std::string path = "/units/" + std::to_string(k);
      images.push_back(matrix_from_json(units[k], path));
      expect(images.back(), n, n, path);
    }
    out.map = LinearMapRep(m, n, std::move(images));
  } else if (out.encoding == "kraus") {
    if (!doc.contains("kraus") || !doc.at("kraus").is_array() || doc.at("kraus").empty())
      parse_fail("/kraus", "missing operator list");
    std::vector<ComplexMatrix> kraus;
    for (std::size_t k = 0; k < doc.at("kraus").size(); ++k) {
      const std::string path = "/kraus/" + std::to_string(k);
      kraus.push_back(matrix_from_json(doc.at("kraus")[k], path));
      expect(kraus.back(), n, m, path);
    }
    std::vector<double> weights(kraus.size(), 1.0);
    if (doc.contains("weights")) {
      const Json& w = doc.at("weights");
      if (!w.is_array() || w.size() != kraus.size())
        throw Error(ErrorCode::DimensionMismatch, "/weights: expected " + std::to_string(kraus.size()) + " numbers");
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (!w[k].is_number()) parse_fail("/weights/" + std::to_string(k), "expected a number");
        weights[k] = w[k].get<double>();
      }
    }
    out.map = LinearMapRep::from_conjugations(kraus, weights);
  } else {
    parse_fail("/encoding", "unknown encoding \"" + out.encoding + "\"");
  }
  return out;
}

Json map_document(const LinearMapRep& phi, const std::string& name) {
  return Json{{"m", phi.m()}, {"n", phi.n()}, {"encoding", "choi"}, {"name", name}, {"choi", matrix_to_json(choi_of_map(phi))}};
}

ComplexMatrix state_from_document(const Json& doc, const std::string& key) {
  if (doc.is_object() && doc.contains(key)) return matrix_from_json(doc.at(key), "/" + key);
  return matrix_from_json(doc, "/");
}

std::string digest(const Json& doc) {
  const std::string text = doc.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, hash);
  return buf;
}

}  // namespace posmap::cli
