#include "bcolab/serialize.hpp"

#include "bcolab/error.hpp"

namespace bcolab {

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Vector(m.row(r).transpose())));
  return out;
}

Vector vector_from_json(const Json& j) {
  require(j.is_array(), Errc::InvalidArgument, "json: expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Matrix matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), Errc::InvalidArgument, "json: expected a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)]);
    require(row.size() == cols, Errc::InvalidArgument, "json: ragged matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

Json to_json(const ConvexBody& body) {
  switch (body.kind()) {
    case ConvexBody::Kind::Polytope: {
      Json normals = Json::array(), offsets = Json::array();
      for (const auto& h : body.halfspaces()) {
        normals.push_back(to_json(h.normal));
        offsets.push_back(h.offset);
      }
      return {{"kind", "polytope"},
              {"normals", normals},
              {"offsets", offsets},
              {"bbox", {{"lo", to_json(body.bbox_lo())}, {"hi", to_json(body.bbox_hi())}}}};
    }
    case ConvexBody::Kind::Ellipsoid:
      return {{"kind", "ellipsoid"}, {"center", to_json(body.center())}, {"shape", to_json(body.shape())}};
    case ConvexBody::Kind::LevelSet:
      break;
  }
  throw Error(Errc::InvalidArgument, "json: level-set bodies are not serializable");
}

ConvexBody body_from_json(const Json& j) {
  require(j.is_object() && j.contains("kind"), Errc::InvalidArgument, "json: body needs a kind");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "polytope") {
    const Json& normals = j.at("normals");
    const Json& offsets = j.at("offsets");
    require(normals.size() == offsets.size(), Errc::InvalidArgument,
            "json: normals and offsets differ in length");
    std::vector<Halfspace> hs;
    for (std::size_t i = 0; i < normals.size(); ++i)
      hs.push_back({vector_from_json(normals[i]), offsets[i].get<double>()});
    return ConvexBody::polytope(std::move(hs));
  }
  if (kind == "ellipsoid") return ConvexBody::ellipsoid(vector_from_json(j.at("center")), matrix_from_json(j.at("shape")));
  throw Error(Errc::InvalidArgument, "json: unknown body kind '" + kind + "'");
}

Json to_json(const PositionResult& r) {
  return {{"T", to_json(r.transform)},
          {"residual", r.residual},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

Json to_json(const FiniteMeasure& m) {
  Json support = Json::array();
  for (const auto& p : m.support) support.push_back(to_json(p));
  return {{"support", support}, {"weights", m.weights}};
}

FiniteMeasure measure_from_json(const Json& j) {
  FiniteMeasure m;
  for (const auto& p : j.at("support")) m.support.push_back(vector_from_json(p));
  m.weights = j.at("weights").get<std::vector<double>>();
  m.validate();
  return m;
}

Json to_json(const ClassLabel& c) {
  Json out = {{"tag", c.tag_name()}, {"level", c.level}, {"witness_psi", c.witness}};
  if (c.tag == ClassLabel::Tag::Feps) {
    out["level_index"] = c.level_index;
    out["epsilon"] = c.epsilon;
  }
  return out;
}

Json to_json(const ids::SweepSummary& s) {
  return {{"seeds", s.seeds},
          {"mean_regret", s.mean_regret},
          {"regret_se", s.regret_se},
          {"bound_value", s.bound_value},
          {"beta_hat", s.beta_hat},
          {"pilot_beta", s.pilot_beta},
          {"cover_size", s.cover_size},
          {"cover_radius", s.cover_radius},
          {"log_cover", s.log_cover},
          {"mean_sum_2v", s.mean_sum_2v},
          {"sum_2v_se", s.sum_2v_se}};
}

}  // namespace bcolab
